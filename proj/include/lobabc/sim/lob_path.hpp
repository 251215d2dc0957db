#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "lobabc/lob/order_book.hpp"

namespace lobabc::sim {

inline constexpr std::size_t kDepth = 5;

struct Snapshot {
  double time = 0;    // seconds since session start
  double mid = 0;     // price units; last valid mid if one-sided
  double spread = 0;  // price units; 0 if one-sided
  bool two_sided = true;
  std::array<lob::Quantity, kDepth> bid_volume{};
  std::array<lob::Quantity, kDepth> ask_volume{};
  // Activity since the previous snapshot.
  lob::Quantity mo_buy_volume = 0;
  lob::Quantity mo_sell_volume = 0;
  lob::Quantity traded_volume = 0;
  std::size_t trade_count = 0;

  lob::Quantity total_depth() const;
};

struct LobPath {
  double tick_size = 0.01;
  std::vector<Snapshot> snapshots;

  double mean_spread() const;
  lob::Quantity traded_volume() const;
};

// Reads the book's top of book and depth into a snapshot. `last_mid` (price
// units) is carried when a side is empty.
Snapshot take_snapshot(const lob::OrderBook& book, double time, double tick_size,
                       double last_mid);

// CSV: timestamp,mid,spread,bid_vol_1..5,ask_vol_1..5
void write_csv(const LobPath& path, std::ostream& out);
LobPath read_csv(std::istream& in, double tick_size = 0.01);
void save_csv(const LobPath& path, const std::string& file);
LobPath load_csv(const std::string& file, double tick_size = 0.01);

std::string to_json(const LobPath& path);
LobPath from_json(const std::string& text);

}  // namespace lobabc::sim
