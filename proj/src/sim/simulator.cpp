#include "lobabc/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lobabc::sim {

using lob::Price;
using lob::Quantity;
using lob::Side;

void SimConfig::validate() const {
  if (!(interval_seconds > 0)) throw std::invalid_argument("interval length must be positive");
  if (intervals < 1) throw std::invalid_argument("need at least one interval");
  if (snapshot_stride < 1) throw std::invalid_argument("snapshot stride must be >= 1");
  if (initial.spread < 1 || initial.levels < 1 || initial.orders_per_level < 0 ||
      initial.order_size < 1)
    throw std::invalid_argument("bad initial book profile");
}

lob::OrderBook initial_book(const SimConfig& config) {
  const auto& ib = config.initial;
  lob::OrderBook book;
  const Price best_ask = ib.best_bid + ib.spread;
  for (int s = 0; s < ib.levels; ++s)
    for (int i = 0; i < ib.orders_per_level; ++i) {
      book.submit_limit(Side::Bid, ib.best_bid - s, ib.order_size);
      book.submit_limit(Side::Ask, best_ask + s, ib.order_size);
    }
  book.set_references(ib.best_bid, best_ask);
  return book;
}

namespace {

struct PendingLimit {
  Side side;
  Price price;
  Quantity size;
};

struct PendingMarket {
  Side side;
  Quantity size;
};

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  // Fisher-Yates with our own uniform draw so the order is library-independent.
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(v[i - 1], v[std::min(j, i - 1)]);
  }
}

void collect_limits(const lob::OrderBook& book, const lob::LobConfig& cfg, Side side,
                    const std::vector<agents::Count>& counts, bool aggressive,
                    const agents::OrderSizeDist& sizes, Rng& rng,
                    std::vector<PendingLimit>& out) {
  for (int i = 0; i < cfg.l_t(); ++i) {
    const int level = cfg.level_at(i);
    if ((level <= 0) != aggressive) continue;
    const auto n = counts[static_cast<std::size_t>(i)];
    for (auto q : agents::sample_order_sizes(sizes, n, rng))
      out.push_back({side, book.level_price(side, level), q});
  }
}

void record(const std::vector<lob::Trade>& trades, StepResult& out) {
  for (const auto& t : trades) {
    out.ledger.executed += t.size;
    out.trades.push_back(t);
  }
}

void limit_phase(lob::OrderBook& book, std::vector<PendingLimit>& orders, Rng& rng,
                 StepResult& out) {
  shuffle(orders, rng);
  for (const auto& o : orders) {
    out.ledger.submitted += o.size;
    record(book.submit_limit(o.side, o.price, o.size).trades, out);
  }
}

std::vector<agents::Count> level_counts(const lob::OrderBook& book, const lob::LobConfig& cfg,
                                        Side side) {
  std::vector<agents::Count> caps(static_cast<std::size_t>(cfg.l_t()));
  for (int i = 0; i < cfg.l_t(); ++i)
    caps[static_cast<std::size_t>(i)] = static_cast<agents::Count>(
        book.order_count_at(side, book.level_price(side, cfg.level_at(i))));
  return caps;
}

void cancel_phase(lob::OrderBook& book, const AgentParams& p, Rng& rng, StepResult& out) {
  const auto& cfg = p.lob;
  auto& f = out.flow;
  f.cancel_bid_intensity = agents::draw_intensities(p.cancel_bid, rng);
  f.cancel_ask_intensity = agents::draw_intensities(p.cancel_ask, rng);
  f.cancel_bid_cap = level_counts(book, cfg, Side::Bid);
  f.cancel_ask_cap = level_counts(book, cfg, Side::Ask);
  f.cancel_bid = agents::sample_truncated_counts(f.cancel_bid_intensity, f.cancel_bid_cap, rng);
  f.cancel_ask = agents::sample_truncated_counts(f.cancel_ask_intensity, f.cancel_ask_cap, rng);
  for (Side side : {Side::Bid, Side::Ask}) {
    const auto& counts = side == Side::Bid ? f.cancel_bid : f.cancel_ask;
    for (int i = 0; i < cfg.l_t(); ++i) {
      const auto n = static_cast<std::size_t>(counts[static_cast<std::size_t>(i)]);
      if (n == 0) continue;
      const Price px = book.level_price(side, cfg.level_at(i));
      const auto* q = book.queue_at(side, px);
      for (std::size_t k = 0; k < n; ++k) out.ledger.cancelled += (*q)[k].size;
      book.cancel_at_level(side, px, n);
    }
  }
}

void market_phase(lob::OrderBook& book, const AgentParams& p, Rng& rng, StepResult& out) {
  const auto& cfg = p.lob;
  auto& f = out.flow;
  // Opposite-side resting orders on passive levels 1..l_p.
  auto passive_orders = [&](Side resting) {
    agents::Count r = 0;
    for (int s = 1; s <= cfg.l_p; ++s)
      r += static_cast<agents::Count>(book.order_count_at(resting, book.level_price(resting, s)));
    return r;
  };
  f.mo_buy_cap = passive_orders(Side::Ask);
  f.mo_sell_cap = passive_orders(Side::Bid);
  f.mo_buy_intensity = agents::draw_intensities(p.mo_buy, rng)[0];
  f.mo_sell_intensity = agents::draw_intensities(p.mo_sell, rng)[0];
  f.mo_buy = agents::sample_truncated_poisson(f.mo_buy_intensity, f.mo_buy_cap, rng);
  f.mo_sell = agents::sample_truncated_poisson(f.mo_sell_intensity, f.mo_sell_cap, rng);

  std::vector<PendingMarket> orders;
  for (auto q : agents::sample_order_sizes(p.mo_size, f.mo_buy, rng))
    orders.push_back({Side::Bid, q});
  for (auto q : agents::sample_order_sizes(p.mo_size, f.mo_sell, rng))
    orders.push_back({Side::Ask, q});
  shuffle(orders, rng);
  for (const auto& o : orders) {
    auto res = book.submit_market(o.side, o.size);
    out.ledger.mo_submitted += o.size;
    out.ledger.mo_unfilled += res.unfilled;
    (o.side == Side::Bid ? out.ledger.mo_buy_volume : out.ledger.mo_sell_volume) +=
        o.size - res.unfilled;
    record(res.trades, out);
  }
}

}  // namespace

StepResult step(lob::OrderBook& book, const AgentParams& p, Rng& rng, PhaseOrder order) {
  StepResult out;
  auto& f = out.flow;
  const auto& cfg = p.lob;

  f.lo_bid_intensity = agents::draw_intensities(p.lo_bid, rng);
  f.lo_ask_intensity = agents::draw_intensities(p.lo_ask, rng);
  f.lo_bid = agents::sample_lo_counts(f.lo_bid_intensity, rng);
  f.lo_ask = agents::sample_lo_counts(f.lo_ask_intensity, rng);

  std::vector<PendingLimit> passive, aggressive;
  collect_limits(book, cfg, Side::Bid, f.lo_bid, false, p.lo_size, rng, passive);
  collect_limits(book, cfg, Side::Ask, f.lo_ask, false, p.lo_size, rng, passive);
  collect_limits(book, cfg, Side::Bid, f.lo_bid, true, p.lo_size, rng, aggressive);
  collect_limits(book, cfg, Side::Ask, f.lo_ask, true, p.lo_size, rng, aggressive);

  if (order == PhaseOrder::MarketFirst) market_phase(book, p, rng, out);
  limit_phase(book, passive, rng, out);
  limit_phase(book, aggressive, rng, out);
  cancel_phase(book, p, rng, out);
  if (order == PhaseOrder::Model) market_phase(book, p, rng, out);

  book.fix_references();
  return out;
}

LobPath simulate_day(const AgentParams& params, const SimConfig& config, Rng& rng,
                     std::vector<lob::BookEvent>* events) {
  config.validate();
  params.lob.validate();
  lob::OrderBook book = initial_book(config);
  if (events) {
    // Initial orders become submissions at time 0.
    for (const auto& [px, q] : book.bids())
      for (const auto& o : q) events->push_back({0, lob::BookEvent::Kind::Submit, o.id, o.side, px, o.size});
    for (const auto& [px, q] : book.asks())
      for (const auto& o : q) events->push_back({0, lob::BookEvent::Kind::Submit, o.id, o.side, px, o.size});
  }
  std::vector<lob::BookEvent> interval_events;
  book.record_events(events ? &interval_events : nullptr);
  const auto interval_ms = static_cast<std::int64_t>(std::llround(config.interval_seconds * 1000));
  LobPath path;
  path.tick_size = params.lob.tick_size;
  path.snapshots.reserve(config.intervals / config.snapshot_stride);

  double last_mid =
      0.5 * static_cast<double>(2 * config.initial.best_bid + config.initial.spread) *
      params.lob.tick_size;
  std::size_t one_sided = 0;
  Snapshot pending;
  for (std::size_t t = 1; t <= config.intervals; ++t) {
    const StepResult r = step(book, params, rng);
    if (events) {
      const auto m = static_cast<std::int64_t>(interval_events.size());
      const auto start = static_cast<std::int64_t>(t - 1) * interval_ms;
      for (std::int64_t k = 0; k < m; ++k) {
        auto e = interval_events[static_cast<std::size_t>(k)];
        e.ts_ms = start + ((k + 1) * interval_ms + m - 1) / m;
        events->push_back(e);
      }
      interval_events.clear();
    }
    pending.mo_buy_volume += r.ledger.mo_buy_volume;
    pending.mo_sell_volume += r.ledger.mo_sell_volume;
    pending.trade_count += r.trades.size();
    for (const auto& tr : r.trades) pending.traded_volume += tr.size;

    one_sided = book.two_sided() ? 0 : one_sided + 1;
    if (one_sided > config.max_one_sided)
      throw SimulationAborted("book one-sided for " + std::to_string(one_sided) +
                              " consecutive intervals at t=" + std::to_string(t));

    if (t % config.snapshot_stride == 0) {
      Snapshot s = take_snapshot(book, static_cast<double>(t) * config.interval_seconds,
                                 params.lob.tick_size, last_mid);
      last_mid = s.mid;
      s.mo_buy_volume = pending.mo_buy_volume;
      s.mo_sell_volume = pending.mo_sell_volume;
      s.trade_count = pending.trade_count;
      s.traded_volume = pending.traded_volume;
      pending = Snapshot{};
      path.snapshots.push_back(s);
    }
  }
  return path;
}

}  // namespace lobabc::sim
