#include "lobabc/util/optimize.hpp"

#include <cmath>
#include <limits>

namespace lobabc {

namespace {

double safe(const Objective& f, const Eigen::VectorXd& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + step;
    const double fp = safe(f, xp);
    xp[i] = x[i] - step;
    const double fm = safe(f, xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2 * step);
  }
  return g;
}

MinimizeResult bfgs_minimize(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& opt) {
  const auto n = x0.size();
  MinimizeResult res;
  res.x = std::move(x0);
  res.value = safe(f, res.x);
  if (!std::isfinite(res.value)) return res;

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g = numeric_gradient(f, res.x, opt.fd_step);
  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    if (!g.allFinite()) return res;
    if (g.lpNorm<Eigen::Infinity>() < opt.gradient_tolerance) {
      res.converged = true;
      return res;
    }
    Eigen::VectorXd dir = -h_inv * g;
    double slope = g.dot(dir);
    if (slope >= 0) {
      h_inv.setIdentity();
      dir = -g;
      slope = -g.squaredNorm();
    }
    double t = 1;
    double f_new = 0;
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      x_new = res.x + t * dir;
      f_new = safe(f, x_new);
      if (f_new <= res.value + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No descent possible at this resolution; call it a stationary point.
      res.converged = g.lpNorm<Eigen::Infinity>() < 1e3 * opt.gradient_tolerance;
      return res;
    }
    const Eigen::VectorXd g_new = numeric_gradient(f, x_new, opt.fd_step);
    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd y = g_new - g;
    const double change = std::abs(res.value - f_new);
    res.x = x_new;
    g = g_new;
    const double prev = res.value;
    res.value = f_new;
    if (change <= opt.value_tolerance * std::max(1.0, std::abs(prev))) {
      res.converged = true;
      return res;
    }
    const double sy = s.dot(y);
    if (sy > 1e-12) {
      const double rho = 1 / sy;
      const Eigen::MatrixXd i_n = Eigen::MatrixXd::Identity(n, n);
      h_inv = (i_n - rho * s * y.transpose()) * h_inv * (i_n - rho * y * s.transpose()) +
              rho * s * s.transpose();
    }
  }
  return res;
}

}  // namespace lobabc
