#pragma once

#include <Eigen/Dense>
#include <deque>
#include <vector>

#include "lobabc/util/rng.hpp"

namespace lobabc::genetic {

// Sigma ~ IW(scale, dof), mean scale / (dof - d - 1). Needs dof > d - 1.
Eigen::MatrixXd sample_inverse_wishart(const Eigen::MatrixXd& scale, double dof, Rng& rng);
double inverse_wishart_log_density(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& scale,
                                   double dof);

// Two-component inverse-Wishart mixture (1 - w1) IW(local, p1) + w1 IW(wide, p2).
struct CovarianceMixture {
  Eigen::MatrixXd local_scale;
  Eigen::MatrixXd wide_scale;
  double w1 = 0.05;
  double p1 = 20;
  double p2 = 10;

  int dim() const { return static_cast<int>(local_scale.rows()); }
  void validate() const;
  Eigen::MatrixXd sample(Rng& rng) const;
  double log_density(const Eigen::MatrixXd& sigma) const;

  // Mixture whose local component has mean `centre`, wide component scale
  // equal to `wide` (identity if empty).
  static CovarianceMixture centred(const Eigen::MatrixXd& centre, double w1, double p1,
                                   double p2, Eigen::MatrixXd wide = {});
};

// Generation history for the adaptive local scale: each generation stores the
// rank-weighted mean (weights 1/rank) of its matrices. Generations are
// combined with weights decay^lag, lag 1 being the most recent.
class ScaleHistory {
 public:
  explicit ScaleHistory(double decay = 0.8) : decay_(decay) {}

  void add_generation(const std::vector<Eigen::MatrixXd>& matrices,
                      const std::vector<int>& ranks);
  bool empty() const { return generations_.empty(); }
  std::size_t size() const { return generations_.size(); }

  // Discounted average of the generation means.
  Eigen::MatrixXd weighted_mean() const;

 private:
  double decay_;
  std::vector<Eigen::MatrixXd> generations_;
};

enum class CovarianceMode { Static, Adaptive };

// Draws a new matrix. Static mode samples the fixed mixture. Adaptive mode
// replaces the local scale by one fitted to the history: with moment_match the
// local component's mean equals the history average, otherwise the average
// is used as the scale itself.
Eigen::MatrixXd mutate_covariance(const CovarianceMixture& mixture, CovarianceMode mode,
                                  const ScaleHistory* history, bool moment_match, Rng& rng);

// Nearest SPD matrix in Frobenius norm (symmetrize, clip eigenvalues).
Eigen::MatrixXd nearest_spd(const Eigen::MatrixXd& m, double floor = 1e-10);

}  // namespace lobabc::genetic
