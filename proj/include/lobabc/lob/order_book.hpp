#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

namespace lobabc::lob {

enum class Side : std::uint8_t { Bid, Ask };

constexpr Side opposite(Side s) { return s == Side::Bid ? Side::Ask : Side::Bid; }
const char* to_string(Side s);

using Price = std::int64_t;     // integer ticks
using Quantity = std::int64_t;  // shares
using OrderId = std::uint64_t;

struct LobConfig {
  double tick_size = 0.01;
  int l_d = 1;  // aggressive levels: -l_d+1 .. 0
  int l_p = 5;  // passive levels: 1 .. l_p

  int l_t() const { return l_d + l_p; }
  int first_level() const { return 1 - l_d; }
  // Index into per-level vectors for level s.
  int index_of(int level) const { return level - first_level(); }
  int level_at(int index) const { return index + first_level(); }
  void validate() const;
};

struct Order {
  OrderId id = 0;
  Side side = Side::Bid;
  Price price = 0;
  Quantity size = 0;
  std::uint64_t seq = 0;
};

struct Trade {
  Price price = 0;
  Quantity size = 0;
  Side aggressor_side = Side::Bid;
  OrderId passive_order_id = 0;
};

bool operator==(const Trade& a, const Trade& b);

// Post-matching view of a book change, as an exchange feed would report it:
// an aggressive order shows up only as executions against resting orders.
struct BookEvent {
  enum class Kind : std::uint8_t { Submit, Execute, Cancel };
  std::int64_t ts_ms = 0;  // left at 0 by the book; stamped by the caller
  Kind kind = Kind::Submit;
  OrderId id = 0;
  Side side = Side::Bid;  // side of the resting order
  Price price = 0;
  Quantity size = 0;
};

struct LimitResult {
  std::vector<Trade> trades;
  std::optional<OrderId> resting_id;  // set when a remainder rests
  Quantity rested = 0;
};

struct MarketResult {
  std::vector<Trade> trades;
  Quantity unfilled = 0;  // dropped remainder when the opposite side runs dry
};

// Share and order-count profile of the actively modelled band, indexed by
// LobConfig::index_of(level). Bid level s sits at ref_ask - s, ask level s at
// ref_bid + s. Anything resting outside the band is reported as frozen.
struct LevelVolumes {
  std::vector<Quantity> bid_shares, ask_shares;
  std::vector<Quantity> bid_orders, ask_orders;
  Quantity frozen_bid_shares = 0, frozen_ask_shares = 0;
};

class OrderBook {
 public:
  using Queue = std::deque<Order>;
  using BidLevels = std::map<Price, Queue, std::greater<Price>>;
  using AskLevels = std::map<Price, Queue, std::less<Price>>;

  OrderBook() = default;

  // Matches the marketable part against the opposite side in price-time
  // priority; any remainder rests at `price` behind existing orders.
  LimitResult submit_limit(Side side, Price price, Quantity size);

  // Walks the opposite side best price first, FIFO within a level.
  MarketResult submit_market(Side side, Quantity size);

  // Removes the `count` oldest orders at a level in full. Throws
  // std::logic_error when count exceeds the queue length.
  void cancel_at_level(Side side, Price price, std::size_t count);

  // Feed-replay primitives. They never match; add_resting refuses orders that
  // would cross the book or reuse a live id.
  // execute_order and cancel_order reduce a live order by `size`; they fail
  // for unknown ids and sizes above what is left.
  bool add_resting(OrderId id, Side side, Price price, Quantity size);
  bool execute_order(OrderId id, Quantity size);
  bool cancel_order(OrderId id, Quantity size);

  std::optional<Price> best_bid() const;
  std::optional<Price> best_ask() const;
  bool two_sided() const { return !bids_.empty() && !asks_.empty(); }

  Quantity volume_at(Side side, Price price) const;
  std::size_t order_count_at(Side side, Price price) const;
  const Queue* queue_at(Side side, Price price) const;
  Quantity total_volume(Side side) const;
  std::size_t total_orders(Side side) const;

  // Volumes of the k-th best populated price levels, k = 1..depth (0 if absent).
  std::vector<Quantity> depth_volumes(Side side, std::size_t depth) const;

  const BidLevels& bids() const { return bids_; }
  const AskLevels& asks() const { return asks_; }

  // Reference prices (best quotes at the start of the current interval).
  Price ref_bid() const { return ref_bid_; }
  Price ref_ask() const { return ref_ask_; }
  void set_references(Price bid, Price ask);
  // Re-fixes the references to the current best quotes; a side with no
  // orders keeps its previous reference.
  void fix_references();

  LevelVolumes level_volumes(const LobConfig& config) const;

  // Price of level s on a side relative to the opposite reference.
  Price level_price(Side side, int level) const {
    return side == Side::Bid ? ref_ask_ - level : ref_bid_ + level;
  }

  std::uint64_t next_seq() const { return next_seq_; }

  // Appends every subsequent book change to `log` (null stops recording).
  void record_events(std::vector<BookEvent>* log) { log_ = log; }

 private:
  template <class Levels>
  void match_against(Levels& levels, Side aggressor, std::optional<Price> limit,
                     Quantity& remaining, std::vector<Trade>& trades);
  void rest(Side side, Price price, Quantity size, OrderId id);
  void erase_index(OrderId id) { index_.erase(id); }
  bool reduce(OrderId id, Quantity size, BookEvent::Kind kind);
  void emit(BookEvent::Kind kind, OrderId id, Side side, Price price, Quantity size) {
    if (log_) log_->push_back({0, kind, id, side, price, size});
  }

  BidLevels bids_;
  AskLevels asks_;
  std::unordered_map<OrderId, std::pair<Side, Price>> index_;
  Price ref_bid_ = 0;
  Price ref_ask_ = 0;
  std::uint64_t next_seq_ = 1;
  OrderId next_id_ = 1;
  std::vector<BookEvent>* log_ = nullptr;
};

}  // namespace lobabc::lob
