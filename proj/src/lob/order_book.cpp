#include "lobabc/lob/order_book.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace lobabc::lob {

const char* to_string(Side s) { return s == Side::Bid ? "bid" : "ask"; }

void LobConfig::validate() const {
  if (!(tick_size > 0)) throw std::invalid_argument("tick_size must be positive");
  if (l_d < 1) throw std::invalid_argument("l_d must be >= 1");
  if (l_p < 1) throw std::invalid_argument("l_p must be >= 1");
}

bool operator==(const Trade& a, const Trade& b) {
  return a.price == b.price && a.size == b.size && a.aggressor_side == b.aggressor_side &&
         a.passive_order_id == b.passive_order_id;
}

template <class Levels>
void OrderBook::match_against(Levels& levels, Side aggressor, std::optional<Price> limit,
                              Quantity& remaining, std::vector<Trade>& trades) {
  while (remaining > 0 && !levels.empty()) {
    auto level = levels.begin();
    const Price px = level->first;
    if (limit) {
      const bool crosses = aggressor == Side::Bid ? px <= *limit : px >= *limit;
      if (!crosses) break;
    }
    Queue& queue = level->second;
    while (remaining > 0 && !queue.empty()) {
      Order& resting = queue.front();
      const Quantity fill = std::min(remaining, resting.size);
      trades.push_back(Trade{px, fill, aggressor, resting.id});
      emit(BookEvent::Kind::Execute, resting.id, opposite(aggressor), px, fill);
      remaining -= fill;
      resting.size -= fill;  // partial fill keeps time priority
      if (resting.size == 0) {
        erase_index(resting.id);
        queue.pop_front();
      }
    }
    if (queue.empty()) levels.erase(level);
  }
}

void OrderBook::rest(Side side, Price price, Quantity size, OrderId id) {
  Order order{id, side, price, size, next_seq_++};
  if (side == Side::Bid)
    bids_[price].push_back(order);
  else
    asks_[price].push_back(order);
  index_[id] = {side, price};
  emit(BookEvent::Kind::Submit, id, side, price, size);
}

LimitResult OrderBook::submit_limit(Side side, Price price, Quantity size) {
  if (size < 1) throw std::invalid_argument("limit order size must be >= 1");
  LimitResult result;
  Quantity remaining = size;
  if (side == Side::Bid)
    match_against(asks_, side, price, remaining, result.trades);
  else
    match_against(bids_, side, price, remaining, result.trades);
  if (remaining > 0) {
    const OrderId id = next_id_++;
    rest(side, price, remaining, id);
    result.resting_id = id;
    result.rested = remaining;
  }
  return result;
}

MarketResult OrderBook::submit_market(Side side, Quantity size) {
  MarketResult result;
  if (size < 1) return result;
  Quantity remaining = size;
  if (side == Side::Bid)
    match_against(asks_, side, std::nullopt, remaining, result.trades);
  else
    match_against(bids_, side, std::nullopt, remaining, result.trades);
  result.unfilled = remaining;
  return result;
}

void OrderBook::cancel_at_level(Side side, Price price, std::size_t count) {
  if (count == 0) return;
  auto apply = [&](auto& levels) {
    auto it = levels.find(price);
    if (it == levels.end() || it->second.size() < count)
      throw std::logic_error("cancel count exceeds orders resting at level " +
                             std::to_string(price));
    Queue& queue = it->second;
    for (std::size_t i = 0; i < count; ++i) {
      const Order& o = queue.front();
      emit(BookEvent::Kind::Cancel, o.id, side, price, o.size);
      erase_index(o.id);
      queue.pop_front();
    }
    if (queue.empty()) levels.erase(it);
  };
  if (side == Side::Bid)
    apply(bids_);
  else
    apply(asks_);
}

bool OrderBook::add_resting(OrderId id, Side side, Price price, Quantity size) {
  if (size < 1 || index_.count(id)) return false;
  if (side == Side::Bid && !asks_.empty() && price >= asks_.begin()->first) return false;
  if (side == Side::Ask && !bids_.empty() && price <= bids_.begin()->first) return false;
  rest(side, price, size, id);
  next_id_ = std::max(next_id_, id + 1);
  return true;
}

namespace {

template <class Levels>
bool reduce_order(Levels& levels, Price price, OrderId id, Quantity size, bool& removed) {
  auto it = levels.find(price);
  if (it == levels.end()) return false;
  auto& queue = it->second;
  auto pos = std::find_if(queue.begin(), queue.end(), [&](const Order& o) { return o.id == id; });
  if (pos == queue.end() || size > pos->size) return false;
  removed = size == pos->size;
  if (removed)
    queue.erase(pos);
  else
    pos->size -= size;
  if (queue.empty()) levels.erase(it);
  return true;
}

}  // namespace

bool OrderBook::execute_order(OrderId id, Quantity size) {
  return reduce(id, size, BookEvent::Kind::Execute);
}

bool OrderBook::cancel_order(OrderId id, Quantity size) {
  return reduce(id, size, BookEvent::Kind::Cancel);
}

bool OrderBook::reduce(OrderId id, Quantity size, BookEvent::Kind kind) {
  auto it = index_.find(id);
  if (it == index_.end() || size < 1) return false;
  const auto [side, price] = it->second;
  bool removed = false;
  const bool ok = side == Side::Bid ? reduce_order(bids_, price, id, size, removed)
                                    : reduce_order(asks_, price, id, size, removed);
  if (ok) emit(kind, id, side, price, size);
  if (ok && removed) index_.erase(it);
  return ok;
}

std::optional<Price> OrderBook::best_bid() const {
  if (bids_.empty()) return std::nullopt;
  return bids_.begin()->first;
}

std::optional<Price> OrderBook::best_ask() const {
  if (asks_.empty()) return std::nullopt;
  return asks_.begin()->first;
}

const OrderBook::Queue* OrderBook::queue_at(Side side, Price price) const {
  if (side == Side::Bid) {
    auto it = bids_.find(price);
    return it == bids_.end() ? nullptr : &it->second;
  }
  auto it = asks_.find(price);
  return it == asks_.end() ? nullptr : &it->second;
}

Quantity OrderBook::volume_at(Side side, Price price) const {
  const Queue* q = queue_at(side, price);
  if (!q) return 0;
  Quantity v = 0;
  for (const auto& o : *q) v += o.size;
  return v;
}

std::size_t OrderBook::order_count_at(Side side, Price price) const {
  const Queue* q = queue_at(side, price);
  return q ? q->size() : 0;
}

Quantity OrderBook::total_volume(Side side) const {
  Quantity v = 0;
  auto sum = [&](const auto& levels) {
    for (const auto& [px, q] : levels)
      for (const auto& o : q) v += o.size;
  };
  if (side == Side::Bid)
    sum(bids_);
  else
    sum(asks_);
  return v;
}

std::size_t OrderBook::total_orders(Side side) const {
  std::size_t n = 0;
  auto sum = [&](const auto& levels) {
    for (const auto& [px, q] : levels) n += q.size();
  };
  if (side == Side::Bid)
    sum(bids_);
  else
    sum(asks_);
  return n;
}

std::vector<Quantity> OrderBook::depth_volumes(Side side, std::size_t depth) const {
  std::vector<Quantity> out(depth, 0);
  auto fill = [&](const auto& levels) {
    std::size_t k = 0;
    for (auto it = levels.begin(); it != levels.end() && k < depth; ++it, ++k)
      for (const auto& o : it->second) out[k] += o.size;
  };
  if (side == Side::Bid)
    fill(bids_);
  else
    fill(asks_);
  return out;
}

void OrderBook::set_references(Price bid, Price ask) {
  ref_bid_ = bid;
  ref_ask_ = ask;
}

void OrderBook::fix_references() {
  if (auto b = best_bid()) ref_bid_ = *b;
  if (auto a = best_ask()) ref_ask_ = *a;
}

LevelVolumes OrderBook::level_volumes(const LobConfig& config) const {
  const auto n = static_cast<std::size_t>(config.l_t());
  LevelVolumes out;
  out.bid_shares.assign(n, 0);
  out.ask_shares.assign(n, 0);
  out.bid_orders.assign(n, 0);
  out.ask_orders.assign(n, 0);
  const int lo = config.first_level();
  const int hi = config.l_p;
  for (const auto& [px, q] : bids_) {
    const auto level = static_cast<int>(ref_ask_ - px);
    Quantity shares = 0;
    for (const auto& o : q) shares += o.size;
    if (level < lo || level > hi) {
      out.frozen_bid_shares += shares;
      continue;
    }
    const auto i = static_cast<std::size_t>(config.index_of(level));
    out.bid_shares[i] += shares;
    out.bid_orders[i] += static_cast<Quantity>(q.size());
  }
  for (const auto& [px, q] : asks_) {
    const auto level = static_cast<int>(px - ref_bid_);
    Quantity shares = 0;
    for (const auto& o : q) shares += o.size;
    if (level < lo || level > hi) {
      out.frozen_ask_shares += shares;
      continue;
    }
    const auto i = static_cast<std::size_t>(config.index_of(level));
    out.ask_shares[i] += shares;
    out.ask_orders[i] += static_cast<Quantity>(q.size());
  }
  return out;
}

}  // namespace lobabc::lob
