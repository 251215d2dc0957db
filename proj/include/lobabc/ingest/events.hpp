#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lobabc/auxiliary/summary.hpp"
#include "lobabc/lob/order_book.hpp"
#include "lobabc/sim/lob_path.hpp"

namespace lobabc::ingest {

// One feed row. Prices are integer ticks; converting exchange prices to ticks
// is the caller's job.
using LobEvent = lob::BookEvent;
using Action = lob::BookEvent::Kind;

const char* to_string(Action a);

inline constexpr const char* kEventHeader = "ts_ms,order_id,side,action,price_ticks,size";

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

struct ParseResult {
  std::vector<LobEvent> events;
  std::vector<RowError> errors;
};

// Throws std::runtime_error when the header is wrong; bad rows (including
// sizes below 1 and timestamps going backwards) are skipped and reported.
ParseResult parse_events(std::istream& in);
ParseResult load_events(const std::string& file);

void write_events(const std::vector<LobEvent>& events, std::ostream& out);
void save_events(const std::vector<LobEvent>& events, const std::string& file);

struct ReplayOptions {
  double stride_seconds = 10;
  std::int64_t start_ms = 0;  // session start; snapshot k is at start + k * stride
  std::size_t snapshots = 0;  // 0: up to the last event
  double tick_size = 0.01;
};

struct ReplayReport {
  std::size_t applied = 0;
  std::vector<RowError> skipped;  // line = index in the event list, 1-based
  // Share conservation: submitted = executed + cancelled + resting.
  lob::Quantity submitted = 0, executed = 0, cancelled = 0, resting = 0;
};

// Replays the feed into a book and samples it after the last event at or
// before each stride boundary. Events the book cannot apply are skipped.
sim::LobPath replay_to_snapshots(const std::vector<LobEvent>& events,
                                 const ReplayOptions& options = {},
                                 ReplayReport* report = nullptr);

// The observed-data summary; the same code path as simulated data.
auxiliary::AuxSummary summarize_observed(const sim::LobPath& path,
                                         double return_delta_seconds = 60);

}  // namespace lobabc::ingest
