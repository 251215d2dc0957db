#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace lobabc::sim {

// Calibrated parameters: a flat block of bounded scalars plus zero or more
// SPD matrix blocks.
struct ThetaVector {
  std::vector<double> scalars;
  std::vector<Eigen::MatrixXd> covariances;
};

// Exact equality of every entry.
bool operator==(const ThetaVector& a, const ThetaVector& b);

struct ParameterSpace {
  std::vector<std::string> names;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> covariance_names;
  std::vector<int> covariance_dims;

  std::size_t size() const { return names.size(); }
  std::size_t covariance_count() const { return covariance_names.size(); }
  void add(std::string name, double lo, double hi);
  void add_covariance(std::string name, int dim);

  // Shape, bound and SPD checks. validate throws std::invalid_argument with a
  // message naming the offending coordinate.
  bool contains(const ThetaVector& theta) const;
  void validate(const ThetaVector& theta) const;
  std::size_t index_of(const std::string& name) const;
};

bool is_spd(const Eigen::MatrixXd& m);

}  // namespace lobabc::sim
