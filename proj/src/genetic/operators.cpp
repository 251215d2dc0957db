#include "lobabc/genetic/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lobabc::genetic {

double sbx_spread_limit(double xi, double xj, Bounds b) {
  const double lo = std::min(xi, xj), hi = std::max(xi, xj);
  return 1 + 2 * std::min(lo - b.lower, b.upper - hi) / (hi - lo);
}

namespace {

double sbx_alpha(double limit, double eta) { return 2 - std::pow(limit, -(eta + 1)); }

}  // namespace

double sbx_cross(double xi, double xj, Bounds b, double eta, Rng& rng) {
  if (xi == xj) throw std::logic_error("SBX requires distinct parents");
  const double limit = sbx_spread_limit(xi, xj, b);
  const double alpha = sbx_alpha(limit, eta);
  const double u = uniform01(rng);
  const double spread = u <= 1 / alpha ? std::pow(alpha * u, 1 / (eta + 1))
                                       : std::pow(1 / (2 - alpha * u), 1 / (eta + 1));
  const double child = 0.5 * ((1 - spread) * xi + (1 + spread) * xj);
  return std::clamp(child, b.lower, b.upper);
}

double sbx_density(double child, double xi, double xj, Bounds b, double eta) {
  if (xi == xj) return 0;
  const double gap = xj - xi;
  const double spread = (2 * child - xi - xj) / gap;
  const double limit = sbx_spread_limit(xi, xj, b);
  if (spread < 0 || spread > limit) return 0;
  const double alpha = sbx_alpha(limit, eta);
  const double f = spread <= 1 ? (eta + 1) * std::pow(spread, eta) / alpha
                               : (eta + 1) * std::pow(spread, -(eta + 2)) / alpha;
  return 2 / std::abs(gap) * f;
}

namespace {

double boundary_distance(double x, Bounds b) {
  return std::min(x - b.lower, b.upper - x) / b.width();
}

}  // namespace

bool poly_can_move(double x, Bounds b) { return boundary_distance(x, b) > 0; }

double poly_mutate(double x, Bounds b, double eta, Rng& rng) {
  const double delta = boundary_distance(x, b);
  if (!(delta > 0)) return x;
  const double a = std::pow(1 - delta, eta + 1);
  const double g = uniform01(rng);
  const double step = g < 0.5 ? std::pow(2 * g + (1 - 2 * g) * a, 1 / (eta + 1)) - 1
                              : 1 - std::pow(2 * (1 - g) + 2 * (g - 0.5) * a, 1 / (eta + 1));
  return std::clamp(x + step * b.width(), b.lower, b.upper);
}

double poly_density(double y, double x, Bounds b, double eta) {
  const double delta = boundary_distance(x, b);
  if (!(delta > 0)) return 0;
  const double step = (y - x) / b.width();
  if (std::abs(step) > delta) return 0;
  const double norm = 2 * (1 - std::pow(1 - delta, eta + 1));
  const double f = step <= 0 ? (eta + 1) * std::pow(1 + step, eta) / norm
                             : (eta + 1) * std::pow(1 - step, eta) / norm;
  return f / b.width();
}

}  // namespace lobabc::genetic
