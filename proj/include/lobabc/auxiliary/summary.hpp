#pragma once

#include <string>
#include <vector>

#include "lobabc/sim/lob_path.hpp"

namespace lobabc::auxiliary {

struct GarchFit {
  double mean = 0;
  double omega = 0, alpha = 0, beta = 0;
  double log_likelihood = 0;
  bool converged = false;
};

// x_t = drift + e_t + theta * e_{t-1} on the differenced series.
struct Ma1Fit {
  double theta = 0;
  double drift = 0;
  double innovation_variance = 0;
  double css = 0;
  bool converged = false;
};

// Auxiliary coefficient vectors for one dataset. beta1 holds (omega, a, b)
// and beta2 (theta, drift, innovation variance); other models may fill them
// with whatever summary they use.
struct AuxSummary {
  std::vector<double> beta1;
  std::vector<double> beta2;
  double mean_return = 0;
  double log_likelihood = 0;
  std::size_t forward_filled = 0;  // grid points with a one-sided book
  bool converged = false;
};

struct LogReturns {
  std::vector<double> values;
  std::size_t forward_filled = 0;
};

// Log mid-price ratios on the grid of snapshots whose timestamps are
// multiples of delta_seconds.
LogReturns log_returns(const sim::LobPath& path, double delta_seconds = 60);

// Total depth over the five best levels of both sides, one value per snapshot.
std::vector<double> depth_series(const sim::LobPath& path);

// Gaussian QML for r_t = mu + e_t, h_t = omega + a e_{t-1}^2 + b h_{t-1}.
// Throws std::invalid_argument for fewer than 100 points or zero variance.
GarchFit fit_garch11(const std::vector<double>& returns);

// ARIMA(0,1,1): differences the level series, then conditional sum of squares.
Ma1Fit fit_ma1_on_diff(const std::vector<double>& levels);
Ma1Fit fit_ma1(const std::vector<double>& series);

AuxSummary summarize(const sim::LobPath& path, double return_delta_seconds = 60);

struct DistancePair {
  double d1 = 0, d2 = 0, combined = 0;
};

struct DistanceConfig {
  std::vector<double> scale1, scale2;  // per-coordinate divisors; empty = 1
  double w1 = 1, w2 = 1;
  bool include_mean = false;  // append the GARCH mean to beta1
};

DistancePair distance(const AuxSummary& observed, const AuxSummary& simulated,
                      const DistanceConfig& config);

// Standard deviation of each coordinate over the converged summaries;
// coordinates without spread get 1.
void fit_scales(DistanceConfig& config, const std::vector<AuxSummary>& population);

std::string to_json(const AuxSummary& s);
AuxSummary summary_from_json(const std::string& text);

}  // namespace lobabc::auxiliary
