#include "lobabc/auxiliary/summary.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "lobabc/util/optimize.hpp"

namespace lobabc::auxiliary {

LogReturns log_returns(const sim::LobPath& path, double delta_seconds) {
  if (!(delta_seconds > 0)) throw std::invalid_argument("return interval must be positive");
  LogReturns out;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : path.snapshots) {
    const double k = s.time / delta_seconds;
    if (std::abs(k - std::round(k)) > 1e-9) continue;
    if (!s.two_sided) ++out.forward_filled;
    if (!(s.mid > 0)) throw std::runtime_error("mid price undefined on return grid");
    if (!std::isnan(prev)) out.values.push_back(std::log(s.mid / prev));
    prev = s.mid;
  }
  if (out.values.empty()) throw std::invalid_argument("need at least two grid points");
  return out;
}

std::vector<double> depth_series(const sim::LobPath& path) {
  std::vector<double> out;
  out.reserve(path.snapshots.size());
  for (const auto& s : path.snapshots) out.push_back(static_cast<double>(s.total_depth()));
  return out;
}

namespace {

double logistic(double x) { return 1 / (1 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1 - p)); }

constexpr double kMaxPersistence = 0.9999;

struct GarchParams {
  double omega, alpha, beta;
};

// Unconstrained coordinates: log omega, logit of persistence a+b, logit of
// the a share of it.
GarchParams decode(const Eigen::VectorXd& u) {
  const double persistence = kMaxPersistence * logistic(u[1]);
  const double share = logistic(u[2]);
  return {std::exp(u[0]), persistence * share, persistence * (1 - share)};
}

Eigen::VectorXd encode(const GarchParams& p) {
  const double persistence = p.alpha + p.beta;
  return Eigen::Vector3d(std::log(p.omega), logit(persistence / kMaxPersistence),
                         logit(p.alpha / persistence));
}

// Negative Gaussian log-likelihood (without the 2*pi term) of standardized
// residuals, variance recursion started at the sample variance.
double garch_nll(const std::vector<double>& e, double var0, const GarchParams& p) {
  double h = var0;
  double nll = 0;
  double prev_e2 = var0;
  for (double x : e) {
    h = p.omega + p.alpha * prev_e2 + p.beta * h;
    if (!(h > 0) || !std::isfinite(h)) return std::numeric_limits<double>::infinity();
    nll += 0.5 * (std::log(h) + x * x / h);
    prev_e2 = x * x;
  }
  return nll;
}

}  // namespace

GarchFit fit_garch11(const std::vector<double>& returns) {
  const auto n = returns.size();
  if (n < 100) throw std::invalid_argument("GARCH fit needs at least 100 returns");
  const double mean = std::accumulate(returns.begin(), returns.end(), 0.0) / n;
  double var = 0;
  for (double r : returns) var += (r - mean) * (r - mean);
  var /= n;
  // Relative floor: a constant series leaves only rounding noise in var.
  if (!(var > 1e-24 * mean * mean) || !(var > 0) || !std::isfinite(var))
    throw std::invalid_argument("GARCH fit needs returns with nonzero variance");

  // Fit on unit-variance residuals so the optimizer sees O(1) numbers; omega
  // is rescaled afterwards, which makes the fit scale equivariant.
  const double sd = std::sqrt(var);
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = (returns[i] - mean) / sd;

  const Objective f = [&](const Eigen::VectorXd& u) { return garch_nll(e, 1.0, decode(u)); };
  const GarchParams starts[] = {{0.05, 0.05, 0.90}, {0.2, 0.10, 0.70}, {0.6, 0.20, 0.20}};
  BfgsOptions opt;
  opt.max_iterations = 300;
  opt.gradient_tolerance = 1e-6;
  opt.value_tolerance = 1e-14;

  MinimizeResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    MinimizeResult r = bfgs_minimize(f, encode(s), opt);
    if (r.value < best.value) best = r;
  }

  GarchFit fit;
  fit.mean = mean;
  if (!std::isfinite(best.value)) return fit;
  const GarchParams p = decode(best.x);
  fit.omega = p.omega * var;
  fit.alpha = p.alpha;
  fit.beta = p.beta;
  fit.log_likelihood = -best.value - 0.5 * static_cast<double>(n) * (std::log(var) +
                                                                      std::log(2 * std::numbers::pi));
  fit.converged = best.converged;
  return fit;
}

namespace {

double css(const std::vector<double>& z, double theta) {
  double e_prev = 0, total = 0;
  for (double x : z) {
    const double e = x - theta * e_prev;
    total += e * e;
    e_prev = e;
  }
  return total;
}

}  // namespace

Ma1Fit fit_ma1(const std::vector<double>& series) {
  const auto n = series.size();
  if (n < 100) throw std::invalid_argument("MA(1) fit needs at least 100 points");
  Ma1Fit fit;
  fit.drift = std::accumulate(series.begin(), series.end(), 0.0) / n;
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = series[i] - fit.drift;

  constexpr double kEdge = 0.999;
  constexpr int kGrid = 200;
  const double step = 2 * kEdge / kGrid;
  double best_theta = 0, best = css(z, 0.0);
  for (int i = 0; i <= kGrid; ++i) {
    const double th = -kEdge + i * step;
    const double v = css(z, th);
    // Ties go to the smaller |theta|.
    if (v < best || (v == best && std::abs(th) < std::abs(best_theta))) {
      best = v;
      best_theta = th;
    }
  }
  // Golden-section refinement inside the bracketing grid cell pair.
  double lo = std::max(-kEdge, best_theta - step), hi = std::min(kEdge, best_theta + step);
  const double g = (std::sqrt(5.0) - 1) / 2;
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = css(z, a), fb = css(z, b);
  for (int it = 0; it < 80 && hi - lo > 1e-10; ++it) {
    if (fa <= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = css(z, a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = css(z, b);
    }
  }
  const double mid = 0.5 * (lo + hi);
  const double fm = css(z, mid);
  if (fm < best) {
    best = fm;
    best_theta = mid;
  }
  fit.theta = best_theta;
  fit.css = best;
  fit.innovation_variance = best / static_cast<double>(n);
  fit.converged = std::isfinite(best) && std::abs(best_theta) < 1;
  return fit;
}

Ma1Fit fit_ma1_on_diff(const std::vector<double>& levels) {
  if (levels.size() < 101) throw std::invalid_argument("MA(1) fit needs at least 100 differences");
  std::vector<double> diff(levels.size() - 1);
  for (std::size_t i = 1; i < levels.size(); ++i) diff[i - 1] = levels[i] - levels[i - 1];
  return fit_ma1(diff);
}

AuxSummary summarize(const sim::LobPath& path, double return_delta_seconds) {
  AuxSummary s;
  const LogReturns r = log_returns(path, return_delta_seconds);
  s.forward_filled = r.forward_filled;
  GarchFit g;
  try {
    g = fit_garch11(r.values);
  } catch (const std::invalid_argument&) {
    g.converged = false;  // e.g. a price path that never moved
  }
  const Ma1Fit m = fit_ma1_on_diff(depth_series(path));
  s.beta1 = {g.omega, g.alpha, g.beta};
  s.beta2 = {m.theta, m.drift, m.innovation_variance};
  s.mean_return = g.mean;
  s.log_likelihood = g.log_likelihood;
  s.converged = g.converged && m.converged;
  return s;
}

namespace {

std::vector<double> first_block(const AuxSummary& s, bool include_mean) {
  std::vector<double> v = s.beta1;
  if (include_mean) v.push_back(s.mean_return);
  return v;
}

double scaled_norm(const std::vector<double>& a, const std::vector<double>& b,
                   const std::vector<double>& scale) {
  if (a.size() != b.size()) throw std::invalid_argument("summary vectors differ in length");
  double sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double s = i < scale.size() ? scale[i] : 1.0;
    const double d = (a[i] - b[i]) / s;
    sum += d * d;
  }
  return std::sqrt(sum);
}

std::vector<double> spread(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const std::size_t k = rows.front().size();
  std::vector<double> out(k, 1.0);
  if (rows.size() < 2) return out;
  for (std::size_t j = 0; j < k; ++j) {
    double mean = 0;
    for (const auto& r : rows) mean += r[j];
    mean /= static_cast<double>(rows.size());
    double var = 0;
    for (const auto& r : rows) var += (r[j] - mean) * (r[j] - mean);
    var /= static_cast<double>(rows.size() - 1);
    const double sd = std::sqrt(var);
    out[j] = sd > 0 && std::isfinite(sd) ? sd : 1.0;
  }
  return out;
}

}  // namespace

DistancePair distance(const AuxSummary& observed, const AuxSummary& simulated,
                      const DistanceConfig& config) {
  DistancePair d;
  if (!observed.converged || !simulated.converged) {
    d.d1 = d.d2 = d.combined = std::numeric_limits<double>::infinity();
    return d;
  }
  d.d1 = scaled_norm(first_block(observed, config.include_mean),
                     first_block(simulated, config.include_mean), config.scale1);
  d.d2 = scaled_norm(observed.beta2, simulated.beta2, config.scale2);
  d.combined = std::sqrt(config.w1 * d.d1 * d.d1 + config.w2 * d.d2 * d.d2);
  return d;
}

void fit_scales(DistanceConfig& config, const std::vector<AuxSummary>& population) {
  std::vector<std::vector<double>> b1, b2;
  for (const auto& s : population) {
    if (!s.converged) continue;
    b1.push_back(first_block(s, config.include_mean));
    b2.push_back(s.beta2);
  }
  config.scale1 = spread(b1);
  config.scale2 = spread(b2);
}

std::string to_json(const AuxSummary& s) {
  nlohmann::json j{{"beta1", s.beta1},
                   {"beta2", s.beta2},
                   {"mean_return", s.mean_return},
                   {"log_likelihood", s.log_likelihood},
                   {"forward_filled", s.forward_filled},
                   {"converged", s.converged}};
  return j.dump();
}

AuxSummary summary_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  AuxSummary s;
  s.beta1 = j.at("beta1").get<std::vector<double>>();
  s.beta2 = j.at("beta2").get<std::vector<double>>();
  s.mean_return = j.value("mean_return", 0.0);
  s.log_likelihood = j.value("log_likelihood", 0.0);
  s.forward_filled = j.value("forward_filled", std::size_t{0});
  s.converged = j.at("converged").get<bool>();
  return s;
}

}  // namespace lobabc::auxiliary
