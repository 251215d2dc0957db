#include "lobabc/sim/theta.hpp"

#include <cmath>
#include <stdexcept>

namespace lobabc::sim {

bool operator==(const ThetaVector& a, const ThetaVector& b) {
  if (a.scalars != b.scalars || a.covariances.size() != b.covariances.size()) return false;
  for (std::size_t i = 0; i < a.covariances.size(); ++i) {
    const auto& x = a.covariances[i];
    const auto& y = b.covariances[i];
    if (x.rows() != y.rows() || x.cols() != y.cols() || x != y) return false;
  }
  return true;
}

void ParameterSpace::add(std::string name, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("empty bounds for " + name);
  names.push_back(std::move(name));
  lower.push_back(lo);
  upper.push_back(hi);
}

void ParameterSpace::add_covariance(std::string name, int dim) {
  if (dim < 1) throw std::invalid_argument("covariance dimension must be >= 1");
  covariance_names.push_back(std::move(name));
  covariance_dims.push_back(dim);
}

bool is_spd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0 || !m.allFinite()) return false;
  if (!m.isApprox(m.transpose(), 1e-10)) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

void ParameterSpace::validate(const ThetaVector& theta) const {
  if (theta.scalars.size() != size())
    throw std::invalid_argument("theta has " + std::to_string(theta.scalars.size()) +
                                " scalars, expected " + std::to_string(size()));
  for (std::size_t k = 0; k < size(); ++k) {
    const double x = theta.scalars[k];
    if (!std::isfinite(x) || x < lower[k] || x > upper[k])
      throw std::invalid_argument(names[k] + " = " + std::to_string(x) + " outside [" +
                                  std::to_string(lower[k]) + ", " + std::to_string(upper[k]) +
                                  "]");
  }
  if (theta.covariances.size() != covariance_count())
    throw std::invalid_argument("theta has wrong number of covariance blocks");
  for (std::size_t c = 0; c < covariance_count(); ++c) {
    const auto& m = theta.covariances[c];
    if (m.rows() != covariance_dims[c] || !is_spd(m))
      throw std::invalid_argument(covariance_names[c] + " is not a " +
                                  std::to_string(covariance_dims[c]) + "x" +
                                  std::to_string(covariance_dims[c]) + " SPD matrix");
  }
}

bool ParameterSpace::contains(const ThetaVector& theta) const {
  try {
    validate(theta);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

std::size_t ParameterSpace::index_of(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return k;
  throw std::out_of_range("unknown parameter " + name);
}

}  // namespace lobabc::sim
