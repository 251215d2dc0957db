#pragma once

#include <array>
#include <functional>
#include <vector>

#include "lobabc/auxiliary/summary.hpp"
#include "lobabc/genetic/covariance.hpp"
#include "lobabc/smc/abc_smc.hpp"

namespace lobabc::moea {

using Objectives = std::array<double, 2>;

// a <= b in both objectives and < in at least one.
bool dominates(const Objectives& a, const Objectives& b);

// Pareto layering, rank 1 = non-dominated. NaN objectives are rejected;
// +inf is allowed and simply ranks last.
std::vector<int> nondominated_sort(const std::vector<Objectives>& points);

struct RankedSolution {
  sim::ThetaVector theta;
  auxiliary::AuxSummary summary;
  Objectives objectives{};
  int rank = 0;
  std::size_t generation = 0;  // generation in which it was created
};

struct MoeaConfig {
  std::size_t population = 200;
  std::size_t generations = 20;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  double crossover_prob = 0.7;  // overrides the model's SMC value
  double history_decay = 0.8;
  bool moment_match = true;
  bool fit_scales = true;

  void validate() const;
};

struct MoeaResult {
  std::vector<RankedSolution> population;          // final, sorted by rank
  std::vector<std::vector<RankedSolution>> fronts;  // rank-1 set per generation
  auxiliary::DistanceConfig distance;
};

using GenerationCallback = std::function<void(std::size_t, const std::vector<RankedSolution>&)>;

// Generational elitist search over (d1, d2). Parents come from binary
// tournaments on rank; children use SBX with the tournament partner (never
// an identical one), polynomial mutation, and covariance blocks redrawn from
// the mixture whose local scale tracks the rank-weighted history.
MoeaResult run_moea(const smc::AbcModel& model, const auxiliary::AuxSummary& observed,
                    const MoeaConfig& config, const auxiliary::DistanceConfig& distance = {},
                    const GenerationCallback& on_generation = {});

}  // namespace lobabc::moea
