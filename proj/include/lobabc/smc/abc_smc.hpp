#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lobabc/auxiliary/summary.hpp"
#include "lobabc/genetic/kernel.hpp"
#include "lobabc/sim/theta.hpp"
#include "lobabc/util/rng.hpp"

namespace lobabc::smc {

enum class KernelType { Gaussian, Uniform };
enum class ResampleScheme { Stratified, Multinomial };

ResampleScheme parse_resample_scheme(const std::string& name);
const char* to_string(ResampleScheme s);

// Unnormalized ABC kernel: exp(-d^2 / (2 eps^2)) or 1{d <= eps}.
double kernel_weight(double d, double eps, KernelType type = KernelType::Gaussian);
double log_kernel_weight(double d, double eps, KernelType type = KernelType::Gaussian);

double ess(const std::vector<double>& weights);

// Offspring indices, each parent i appearing N*W_i times in expectation.
std::vector<std::size_t> resample_indices(const std::vector<double>& weights,
                                          ResampleScheme scheme, Rng& rng);

// Left-continuous inverse of the weighted empirical CDF.
double weighted_quantile(const std::vector<double>& values, const std::vector<double>& weights,
                         double q);

// Tolerance whose Gaussian kernel puts the q-quantile of the current distances
// at its own q-quantile: eps = qhat / (sqrt(2) erfinv(2q - 1)). Returns +inf
// when q <= 0.5, where the matching has no positive solution.
double quantile_matched_tolerance(double qhat, double q);

double adapt_tolerance(const std::vector<double>& distances, const std::vector<double>& weights,
                       double q, double alpha, double eps_prev, double eps_floor);

struct Replicate {
  auxiliary::AuxSummary summary;
  auxiliary::DistancePair distance;
};

struct Particle {
  sim::ThetaVector theta;
  double weight = 0;
  std::vector<Replicate> replicates;
  std::size_t ancestor = 0;
};

// Prior, simulator and mutation kernel of a calibration problem. log_prior
// must be a normalized log density; the evidence recursion relies on it.
struct AbcModel {
  sim::ParameterSpace space;
  std::function<double(const sim::ThetaVector&)> log_prior;
  std::function<sim::ThetaVector(Rng&)> sample_prior;
  // Returns a non-converged summary on simulation failure.
  std::function<auxiliary::AuxSummary(const sim::ThetaVector&, Rng&)> simulate;
  genetic::GeneticConfig kernel;
};

struct SmcConfig {
  std::size_t particles = 200;
  std::size_t iterations = 20;
  std::size_t replicates = 1;
  double quantile = 0.9;
  double alpha = 0.1;
  double eps_floor = 0;
  double ess_fraction = 0.5;  // resample when ESS < ess_fraction * N
  ResampleScheme resampling = ResampleScheme::Stratified;
  KernelType kernel = KernelType::Gaussian;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  bool fit_scales = true;     // standardize summaries by the prior-predictive spread
  bool stop_at_floor = false;  // end once eps reaches eps_floor

  void validate() const;
};

struct IterationTrace {
  std::size_t iteration = 0;
  double eps = 0;
  double ess_before = 0;
  bool resampled = false;
  double ess = 0;
  double log_evidence = 0;
  std::size_t moved = 0;
  std::size_t simulated = 0;
  double min_distance = 0;
  double median_distance = 0;
  std::vector<std::size_t> weight_histogram;  // 10 bins on [0, max weight]
};

struct SmcResult {
  std::vector<Particle> particles;
  std::vector<IterationTrace> trace;
  auxiliary::DistanceConfig distance;
  std::vector<double> initial_distances;  // per-particle mean, first population
  bool collapsed = false;
  std::string diagnostic;

  sim::ThetaVector map() const;
  sim::ThetaVector mmse() const;
  std::vector<double> weights() const;
};

class WeightCollapse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-particle combined distance averaged over replicates.
double mean_distance(const Particle& p);

// log of prior(theta) * mean_s K_eps(d_s).
double log_target(const AbcModel& model, const Particle& p, double eps, KernelType type);

using IterationCallback = std::function<void(const IterationTrace&, const std::vector<Particle>&)>;

// Runs the sampler. On total weight collapse the result carries collapsed =
// true, the diagnostic and the trace up to that point.
SmcResult run_smc(const AbcModel& model, const auxiliary::AuxSummary& observed,
                  const SmcConfig& config, const auxiliary::DistanceConfig& distance = {},
                  const IterationCallback& on_iteration = {});

}  // namespace lobabc::smc
