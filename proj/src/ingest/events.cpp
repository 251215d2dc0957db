#include "lobabc/ingest/events.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lobabc::ingest {

const char* to_string(Action a) {
  switch (a) {
    case Action::Submit: return "submit";
    case Action::Execute: return "execute";
    case Action::Cancel: return "cancel";
  }
  return "?";
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <class T>
bool parse_int(const std::string& s, T& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    if constexpr (std::is_unsigned_v<T>) {
      if (s[0] == '-') return false;
      out = static_cast<T>(std::stoull(s, &pos));
    } else {
      out = static_cast<T>(std::stoll(s, &pos));
    }
  } catch (const std::exception&) {
    return false;
  }
  return pos == s.size();
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace

ParseResult parse_events(std::istream& in) {
  ParseResult result;
  std::string line;
  if (!std::getline(in, line) || strip(line) != kEventHeader)
    throw std::runtime_error(std::string("event file: header must be '") + kEventHeader + "'");
  std::size_t lineno = 1;
  std::int64_t last_ts = std::numeric_limits<std::int64_t>::min();
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(line);
    if (line.empty()) continue;
    auto fail = [&](std::string msg) { result.errors.push_back({lineno, std::move(msg)}); };
    const auto cells = split(line);
    if (cells.size() != 6) {
      fail("expected 6 fields, got " + std::to_string(cells.size()));
      continue;
    }
    LobEvent e;
    if (!parse_int(cells[0], e.ts_ms)) { fail("bad timestamp '" + cells[0] + "'"); continue; }
    if (!parse_int(cells[1], e.id)) { fail("bad order id '" + cells[1] + "'"); continue; }
    if (cells[2] == "bid" || cells[2] == "B" || cells[2] == "buy")
      e.side = lob::Side::Bid;
    else if (cells[2] == "ask" || cells[2] == "S" || cells[2] == "sell")
      e.side = lob::Side::Ask;
    else { fail("bad side '" + cells[2] + "'"); continue; }
    if (cells[3] == "submit")
      e.kind = Action::Submit;
    else if (cells[3] == "execute")
      e.kind = Action::Execute;
    else if (cells[3] == "cancel")
      e.kind = Action::Cancel;
    else { fail("bad action '" + cells[3] + "'"); continue; }
    if (!parse_int(cells[4], e.price)) { fail("bad price '" + cells[4] + "'"); continue; }
    if (!parse_int(cells[5], e.size)) { fail("bad size '" + cells[5] + "'"); continue; }
    if (e.size < 1) { fail("size must be >= 1"); continue; }
    if (e.ts_ms < last_ts) { fail("timestamp goes backwards"); continue; }
    last_ts = e.ts_ms;
    result.events.push_back(e);
  }
  return result;
}

ParseResult load_events(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open event file " + file);
  return parse_events(in);
}

void write_events(const std::vector<LobEvent>& events, std::ostream& out) {
  out << kEventHeader << '\n';
  for (const auto& e : events)
    out << e.ts_ms << ',' << e.id << ',' << lob::to_string(e.side) << ',' << to_string(e.kind)
        << ',' << e.price << ',' << e.size << '\n';
}

void save_events(const std::vector<LobEvent>& events, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write event file " + file);
  write_events(events, out);
}

sim::LobPath replay_to_snapshots(const std::vector<LobEvent>& events,
                                 const ReplayOptions& options, ReplayReport* report) {
  if (!(options.stride_seconds > 0)) throw std::invalid_argument("stride must be positive");
  const auto stride_ms = static_cast<std::int64_t>(std::llround(options.stride_seconds * 1000));
  if (stride_ms < 1) throw std::invalid_argument("stride below one millisecond");

  std::size_t count = options.snapshots;
  if (count == 0 && !events.empty() && events.back().ts_ms > options.start_ms)
    count = static_cast<std::size_t>((events.back().ts_ms - options.start_ms) / stride_ms);

  ReplayReport local;
  ReplayReport& rep = report ? *report : local;
  rep = ReplayReport{};

  lob::OrderBook book;
  sim::LobPath path;
  path.tick_size = options.tick_size;
  double last_mid = std::nan("");
  std::size_t next = 0;
  sim::Snapshot activity;

  auto apply = [&](const LobEvent& e) {
    bool ok = false;
    switch (e.kind) {
      case Action::Submit: ok = book.add_resting(e.id, e.side, e.price, e.size); break;
      case Action::Execute: ok = book.execute_order(e.id, e.size); break;
      case Action::Cancel: ok = book.cancel_order(e.id, e.size); break;
    }
    if (!ok) {
      rep.skipped.push_back({next, std::string(to_string(e.kind)) + " of order " +
                                       std::to_string(e.id) + " does not fit the book"});
      return;
    }
    ++rep.applied;
    if (e.kind == Action::Submit) rep.submitted += e.size;
    if (e.kind == Action::Cancel) rep.cancelled += e.size;
    if (e.kind == Action::Execute) {
      rep.executed += e.size;
      activity.traded_volume += e.size;
      ++activity.trade_count;
      // Executions against asks are buyer initiated.
      (e.side == lob::Side::Ask ? activity.mo_buy_volume : activity.mo_sell_volume) += e.size;
    }
  };

  // Pre-session events set the opening book, whose mid seeds the carry.
  while (next < events.size() && events[next].ts_ms <= options.start_ms) {
    ++next;
    apply(events[next - 1]);
  }
  if (const auto b = book.best_bid(), a = book.best_ask(); b && a)
    last_mid = 0.5 * static_cast<double>(*b + *a) * options.tick_size;

  for (std::size_t k = 1; k <= count; ++k) {
    const std::int64_t boundary = options.start_ms + static_cast<std::int64_t>(k) * stride_ms;
    while (next < events.size() && events[next].ts_ms <= boundary) {
      ++next;
      apply(events[next - 1]);
    }
    if (std::isnan(last_mid)) {
      const auto b = book.best_bid(), a = book.best_ask();
      last_mid = b && a ? 0.5 * static_cast<double>(*b + *a) * options.tick_size
                 : b    ? static_cast<double>(*b) * options.tick_size
                 : a    ? static_cast<double>(*a) * options.tick_size
                        : 0.0;
    }
    auto s = sim::take_snapshot(book, static_cast<double>(k * stride_ms) / 1000.0,
                                options.tick_size, last_mid);
    last_mid = s.mid;
    s.mo_buy_volume = activity.mo_buy_volume;
    s.mo_sell_volume = activity.mo_sell_volume;
    s.traded_volume = activity.traded_volume;
    s.trade_count = activity.trade_count;
    activity = sim::Snapshot{};
    path.snapshots.push_back(s);
  }
  while (next < events.size()) {
    ++next;
    apply(events[next - 1]);
  }
  rep.resting = book.total_volume(lob::Side::Bid) + book.total_volume(lob::Side::Ask);
  return path;
}

auxiliary::AuxSummary summarize_observed(const sim::LobPath& path, double return_delta_seconds) {
  return auxiliary::summarize(path, return_delta_seconds);
}

}  // namespace lobabc::ingest
