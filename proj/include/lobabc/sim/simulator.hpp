#pragma once

#include <stdexcept>
#include <vector>

#include "lobabc/agents/order_flow.hpp"
#include "lobabc/lob/order_book.hpp"
#include "lobabc/sim/lob_path.hpp"
#include "lobabc/sim/model.hpp"
#include "lobabc/util/rng.hpp"

namespace lobabc::sim {

struct InitialBook {
  lob::Price best_bid = 2700;
  lob::Price spread = 2;
  int levels = 5;
  int orders_per_level = 3;
  lob::Quantity order_size = 3;
};

struct SimConfig {
  double interval_seconds = 10;
  std::size_t intervals = 3060;  // 8.5 hours
  std::size_t snapshot_stride = 1;  // in intervals
  InitialBook initial;
  std::size_t max_one_sided = 30;  // consecutive intervals before aborting
  void validate() const;
};

// Per-interval draws. Counts are in orders, indexed like LobConfig::index_of.
struct FlowRealization {
  Eigen::VectorXd lo_bid_intensity, lo_ask_intensity;
  Eigen::VectorXd cancel_bid_intensity, cancel_ask_intensity;
  double mo_buy_intensity = 0, mo_sell_intensity = 0;
  std::vector<agents::Count> lo_bid, lo_ask;
  std::vector<agents::Count> cancel_bid_cap, cancel_ask_cap;
  std::vector<agents::Count> cancel_bid, cancel_ask;
  agents::Count mo_buy_cap = 0, mo_sell_cap = 0;
  agents::Count mo_buy = 0, mo_sell = 0;
};

// Share flows of one interval, for conservation checks.
struct VolumeLedger {
  lob::Quantity submitted = 0;  // limit order shares
  lob::Quantity cancelled = 0;
  lob::Quantity executed = 0;   // resting shares removed by trades
  lob::Quantity mo_submitted = 0;
  lob::Quantity mo_unfilled = 0;
  lob::Quantity mo_buy_volume = 0;
  lob::Quantity mo_sell_volume = 0;
};

struct StepResult {
  FlowRealization flow;
  std::vector<lob::Trade> trades;
  VolumeLedger ledger;
};

// Phase order in one interval. The default is the model's; the others exist
// so tests can confirm the order matters.
enum class PhaseOrder { Model, MarketFirst };

class SimulationAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

lob::OrderBook initial_book(const SimConfig& config);

// One interval: passive LOs, aggressive LOs, cancellations, market orders,
// then the references are re-fixed to the new best quotes.
StepResult step(lob::OrderBook& book, const AgentParams& params, Rng& rng,
                PhaseOrder order = PhaseOrder::Model);

// With `events` set, the day is also written out as a post-matching event
// feed: the initial book at time 0, then each interval's changes spread
// evenly over (start, end] in milliseconds.
LobPath simulate_day(const AgentParams& params, const SimConfig& config, Rng& rng,
                     std::vector<lob::BookEvent>* events = nullptr);

}  // namespace lobabc::sim
