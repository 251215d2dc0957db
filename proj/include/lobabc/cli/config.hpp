#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "lobabc/auxiliary/summary.hpp"
#include "lobabc/moea/moea.hpp"
#include "lobabc/sim/model.hpp"
#include "lobabc/sim/simulator.hpp"
#include "lobabc/smc/abc_smc.hpp"

namespace lobabc::cli {

// Settings of the genetic operators shared by SMC and MOEA runs, plus the
// inverse-Wishart mixture used both as the covariance prior and as its
// mutation law.
struct GeneticSettings {
  double smc_crossover_prob = 0.05;
  double moea_crossover_prob = 0.7;
  double eta_c = 5;
  double element_cross_prob = 0.5;
  double mutation_prob = 0.2;
  double eta_m = 10;
  double wide_weight = 0.05;
  double local_dof = 20;
  double wide_dof = 10;
};

struct RunConfig {
  std::optional<std::uint64_t> seed = 1;
  std::size_t workers = 0;  // 0: LOBABC_WORKERS or hardware concurrency
  std::string observed;     // event CSV, snapshot CSV or snapshot JSON
  std::string output = "out";
  double replay_stride_seconds = 10;
  double return_delta_seconds = 60;

  sim::SimConfig sim;
  sim::ReferenceModel model;
  smc::SmcConfig smc;
  moea::MoeaConfig moea;
  GeneticSettings genetic;
  auxiliary::DistanceConfig distance;

  std::size_t resolved_workers() const;
};

// Defaults for the calibration blocks: 20 iterations, N = 200, q = 0.9,
// alpha = 0.1.
RunConfig default_config();

std::string to_json(const RunConfig& config, int indent = 2);
// Missing keys keep their defaults; unknown keys are an error.
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::string& file);

// FNV-1a over the canonical JSON of the config.
std::uint64_t config_hash(const RunConfig& config);

}  // namespace lobabc::cli
