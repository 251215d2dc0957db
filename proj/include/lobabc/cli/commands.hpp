#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lobabc/cli/config.hpp"

namespace lobabc::cli {

enum ExitCode : int { kOk = 0, kInternalError = 1, kBadInput = 2, kCollapsed = 3 };

// Thrown for user errors (bad paths, bounds, schemas); maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int cmd_init(const std::string& file, bool force, std::ostream& log);

struct SimulateOptions {
  std::string theta_file;                   // JSON, optional
  std::map<std::string, double> overrides;  // name=value pairs on top
  bool write_events = false;
};
int cmd_simulate(const RunConfig& config, const SimulateOptions& options, std::ostream& log);

int cmd_summarize(const RunConfig& config, const std::string& input, std::ostream& log);

int cmd_calibrate_smc(const RunConfig& config, std::ostream& log);
int cmd_calibrate_moea(const RunConfig& config, std::ostream& log);

// Reads particles.csv from an SMC run directory and population.csv from a
// MOEA run directory.
int cmd_compare(const std::string& smc_dir, const std::string& moea_dir,
                const std::string& output, std::ostream& log);

// Minimal CSV table used by the compare step and the tests.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t column(const std::string& name) const;  // throws InputError
  double number(std::size_t row, const std::string& name) const;
};
CsvTable read_table(const std::string& file);

struct MethodStats {
  std::size_t count = 0;
  double min_d1 = 0, median_d1 = 0, min_d2 = 0, median_d2 = 0;
};
MethodStats method_stats(const std::vector<double>& d1, const std::vector<double>& d2);

}  // namespace lobabc::cli
