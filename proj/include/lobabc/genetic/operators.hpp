#pragma once

#include "lobabc/util/rng.hpp"

namespace lobabc::genetic {

struct Bounds {
  double lower = 0;
  double upper = 1;
  double width() const { return upper - lower; }
  bool contains(double x) const { return x >= lower && x <= upper; }
};

// Largest spread factor that keeps the child of (xi, xj) inside the bounds.
double sbx_spread_limit(double xi, double xj, Bounds b);

// Simulated binary crossover: child = ((1 - s) xi + (1 + s) xj) / 2 with the
// spread s drawn from the bounded SBX law. Throws std::logic_error when the
// parents are equal.
double sbx_cross(double xi, double xj, Bounds b, double eta, Rng& rng);

// Exact density of sbx_cross's output. Zero outside [mid, mid + limit*(xj-xi)/2]
// (oriented towards xj).
double sbx_density(double child, double xi, double xj, Bounds b, double eta);

// Boundary-aware polynomial mutation. The boundary distance is
// min(x - L, U - x) / (U - L); at a bound the move is degenerate and x is
// returned unchanged.
double poly_mutate(double x, Bounds b, double eta, Rng& rng);
double poly_density(double y, double x, Bounds b, double eta);
bool poly_can_move(double x, Bounds b);

}  // namespace lobabc::genetic
