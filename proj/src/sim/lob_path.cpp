#include "lobabc/sim/lob_path.hpp"

#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace lobabc::sim {

lob::Quantity Snapshot::total_depth() const {
  lob::Quantity v = 0;
  for (std::size_t k = 0; k < kDepth; ++k) v += bid_volume[k] + ask_volume[k];
  return v;
}

double LobPath::mean_spread() const {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& s : snapshots)
    if (s.two_sided) {
      sum += s.spread;
      ++n;
    }
  return n ? sum / static_cast<double>(n) : 0;
}

lob::Quantity LobPath::traded_volume() const {
  lob::Quantity v = 0;
  for (const auto& s : snapshots) v += s.traded_volume;
  return v;
}

Snapshot take_snapshot(const lob::OrderBook& book, double time, double tick_size,
                       double last_mid) {
  Snapshot s;
  s.time = time;
  const auto bid = book.best_bid();
  const auto ask = book.best_ask();
  s.two_sided = bid && ask;
  if (s.two_sided) {
    s.mid = 0.5 * static_cast<double>(*bid + *ask) * tick_size;
    s.spread = static_cast<double>(*ask - *bid) * tick_size;
  } else {
    s.mid = last_mid;
  }
  const auto bids = book.depth_volumes(lob::Side::Bid, kDepth);
  const auto asks = book.depth_volumes(lob::Side::Ask, kDepth);
  std::copy(bids.begin(), bids.end(), s.bid_volume.begin());
  std::copy(asks.begin(), asks.end(), s.ask_volume.begin());
  return s;
}

void write_csv(const LobPath& path, std::ostream& out) {
  out << "timestamp,mid,spread";
  for (std::size_t k = 1; k <= kDepth; ++k) out << ",bid_vol_" << k;
  for (std::size_t k = 1; k <= kDepth; ++k) out << ",ask_vol_" << k;
  out << '\n' << std::setprecision(17);
  for (const auto& s : path.snapshots) {
    out << s.time << ',' << s.mid << ',' << s.spread;
    for (auto v : s.bid_volume) out << ',' << v;
    for (auto v : s.ask_volume) out << ',' << v;
    out << '\n';
  }
}

LobPath read_csv(std::istream& in, double tick_size) {
  LobPath path;
  path.tick_size = tick_size;
  std::string line;
  if (!std::getline(in, line) || line.rfind("timestamp,mid,spread", 0) != 0)
    throw std::runtime_error("snapshot CSV: unexpected header");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != 3 + 2 * kDepth)
      throw std::runtime_error("snapshot CSV: wrong column count on line " +
                               std::to_string(lineno));
    Snapshot s;
    s.time = vals[0];
    s.mid = vals[1];
    s.spread = vals[2];
    s.two_sided = s.spread > 0;
    for (std::size_t k = 0; k < kDepth; ++k) {
      s.bid_volume[k] = static_cast<lob::Quantity>(vals[3 + k]);
      s.ask_volume[k] = static_cast<lob::Quantity>(vals[3 + kDepth + k]);
    }
    path.snapshots.push_back(s);
  }
  return path;
}

void save_csv(const LobPath& path, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file);
  write_csv(path, out);
}

LobPath load_csv(const std::string& file, double tick_size) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file);
  return read_csv(in, tick_size);
}

std::string to_json(const LobPath& path) {
  nlohmann::json j;
  j["tick_size"] = path.tick_size;
  auto& rows = j["snapshots"] = nlohmann::json::array();
  for (const auto& s : path.snapshots) {
    rows.push_back({{"timestamp", s.time},
                    {"mid", s.mid},
                    {"spread", s.spread},
                    {"two_sided", s.two_sided},
                    {"bid_vol", s.bid_volume},
                    {"ask_vol", s.ask_volume},
                    {"mo_buy_volume", s.mo_buy_volume},
                    {"mo_sell_volume", s.mo_sell_volume},
                    {"traded_volume", s.traded_volume},
                    {"trade_count", s.trade_count}});
  }
  return j.dump();
}

LobPath from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  LobPath path;
  path.tick_size = j.at("tick_size").get<double>();
  for (const auto& r : j.at("snapshots")) {
    Snapshot s;
    s.time = r.at("timestamp").get<double>();
    s.mid = r.at("mid").get<double>();
    s.spread = r.at("spread").get<double>();
    s.two_sided = r.at("two_sided").get<bool>();
    s.bid_volume = r.at("bid_vol").get<std::array<lob::Quantity, kDepth>>();
    s.ask_volume = r.at("ask_vol").get<std::array<lob::Quantity, kDepth>>();
    s.mo_buy_volume = r.value("mo_buy_volume", lob::Quantity{0});
    s.mo_sell_volume = r.value("mo_sell_volume", lob::Quantity{0});
    s.traded_volume = r.value("traded_volume", lob::Quantity{0});
    s.trade_count = r.value("trade_count", std::size_t{0});
    path.snapshots.push_back(s);
  }
  return path;
}

}  // namespace lobabc::sim
