#pragma once

#include <Eigen/Dense>
#include <functional>

namespace lobabc {

struct BfgsOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;
  double value_tolerance = 1e-12;  // relative change in f
  double fd_step = 1e-6;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0;
  bool converged = false;
  int iterations = 0;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, double h);

// Unconstrained BFGS with central-difference gradients and a backtracking
// Armijo line search. Non-finite objective values are treated as +inf.
MinimizeResult bfgs_minimize(const Objective& f, Eigen::VectorXd x0,
                             const BfgsOptions& opt = {});

}  // namespace lobabc
