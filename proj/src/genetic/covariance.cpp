#include "lobabc/genetic/covariance.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace lobabc::genetic {

namespace {

double log_multivariate_gamma(double a, int d) {
  double r = 0.25 * d * (d - 1) * std::log(std::numbers::pi);
  for (int j = 0; j < d; ++j) r += std::lgamma(a - 0.5 * j);
  return r;
}

}  // namespace

Eigen::MatrixXd sample_inverse_wishart(const Eigen::MatrixXd& scale, double dof, Rng& rng) {
  const auto d = scale.rows();
  if (!(dof > static_cast<double>(d) - 1))
    throw std::invalid_argument("inverse-Wishart dof must exceed d - 1");
  // Bartlett decomposition of the Wishart(scale^-1, dof) precision.
  const Eigen::MatrixXd precision_scale =
      scale.llt().solve(Eigen::MatrixXd::Identity(d, d));
  const Eigen::MatrixXd l = precision_scale.llt().matrixL();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < d; ++i) {
    std::chi_squared_distribution<double> chi(dof - static_cast<double>(i));
    a(i, i) = std::sqrt(chi(rng));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = normal(rng);
  }
  const Eigen::MatrixXd la = l * a;
  const Eigen::MatrixXd precision = la * la.transpose();
  Eigen::MatrixXd sigma = precision.llt().solve(Eigen::MatrixXd::Identity(d, d));
  return 0.5 * (sigma + sigma.transpose());
}

double inverse_wishart_log_density(const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& scale,
                                   double dof) {
  const auto d = static_cast<int>(sigma.rows());
  Eigen::LLT<Eigen::MatrixXd> ls(sigma), lp(scale);
  if (ls.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const double logdet_sigma = 2 * Eigen::MatrixXd(ls.matrixL()).diagonal().array().log().sum();
  const double logdet_scale = 2 * Eigen::MatrixXd(lp.matrixL()).diagonal().array().log().sum();
  const double trace = ls.solve(scale).trace();
  return 0.5 * dof * logdet_scale - 0.5 * dof * d * std::numbers::ln2 -
         log_multivariate_gamma(0.5 * dof, d) - 0.5 * (dof + d + 1) * logdet_sigma - 0.5 * trace;
}

void CovarianceMixture::validate() const {
  const int d = dim();
  if (d < 1 || wide_scale.rows() != d || wide_scale.cols() != d || local_scale.cols() != d)
    throw std::invalid_argument("covariance mixture scales differ in size");
  if (!(w1 >= 0 && w1 < 1)) throw std::invalid_argument("w1 must lie in [0, 1)");
  if (!(p1 > d + 1) || !(p2 > d + 1)) throw std::invalid_argument("IW dof must exceed d + 1");
}

Eigen::MatrixXd CovarianceMixture::sample(Rng& rng) const {
  if (uniform01(rng) < w1) return sample_inverse_wishart(wide_scale, p2, rng);
  return sample_inverse_wishart(local_scale, p1, rng);
}

double CovarianceMixture::log_density(const Eigen::MatrixXd& sigma) const {
  const double a = std::log1p(-w1) + inverse_wishart_log_density(sigma, local_scale, p1);
  if (w1 <= 0) return a;
  const double b = std::log(w1) + inverse_wishart_log_density(sigma, wide_scale, p2);
  const double m = std::max(a, b);
  if (!std::isfinite(m)) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

CovarianceMixture CovarianceMixture::centred(const Eigen::MatrixXd& centre, double w1, double p1,
                                             double p2, Eigen::MatrixXd wide) {
  const auto d = centre.rows();
  CovarianceMixture m;
  m.local_scale = (p1 - static_cast<double>(d) - 1) * centre;
  m.wide_scale = wide.size() ? std::move(wide) : Eigen::MatrixXd::Identity(d, d);
  m.w1 = w1;
  m.p1 = p1;
  m.p2 = p2;
  m.validate();
  return m;
}

void ScaleHistory::add_generation(const std::vector<Eigen::MatrixXd>& matrices,
                                  const std::vector<int>& ranks) {
  if (matrices.empty() || matrices.size() != ranks.size())
    throw std::invalid_argument("scale history needs one rank per matrix");
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(matrices[0].rows(), matrices[0].cols());
  double total = 0;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    if (ranks[i] < 1) throw std::invalid_argument("ranks start at 1");
    const double w = 1.0 / ranks[i];
    acc += w * matrices[i];
    total += w;
  }
  generations_.push_back(acc / total);
}

Eigen::MatrixXd ScaleHistory::weighted_mean() const {
  if (generations_.empty()) throw std::logic_error("empty scale history");
  const auto n = generations_.size();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(generations_[0].rows(), generations_[0].cols());
  double total = 0;
  for (std::size_t s = 0; s < n; ++s) {
    const double w = std::pow(decay_, static_cast<double>(n - s));
    acc += w * generations_[s];
    total += w;
  }
  return acc / total;
}

Eigen::MatrixXd mutate_covariance(const CovarianceMixture& mixture, CovarianceMode mode,
                                  const ScaleHistory* history, bool moment_match, Rng& rng) {
  if (mode == CovarianceMode::Static || !history || history->empty()) return mixture.sample(rng);
  CovarianceMixture adapted = mixture;
  const Eigen::MatrixXd avg = history->weighted_mean();
  adapted.local_scale = moment_match ? (mixture.p1 - mixture.dim() - 1) * avg : avg;
  return adapted.sample(rng);
}

Eigen::MatrixXd nearest_spd(const Eigen::MatrixXd& m, double floor) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(floor);
  Eigen::MatrixXd out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace lobabc::genetic
