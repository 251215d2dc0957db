#include "lobabc/smc/abc_smc.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "lobabc/genetic/covariance.hpp"
#include "lobabc/util/parallel.hpp"

namespace lobabc::smc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kResampleStream = 0xFFFFFFFFull;

double log_sum_exp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// log(1 - exp(a) - exp(b)).
double log1m_sum(double a, double b) {
  const double rest = 1 - std::exp(a) - std::exp(b);
  return rest > 0 ? std::log(rest) : kNegInf;
}

}  // namespace

ResampleScheme parse_resample_scheme(const std::string& name) {
  if (name == "stratified") return ResampleScheme::Stratified;
  if (name == "multinomial") return ResampleScheme::Multinomial;
  throw std::invalid_argument("unknown resampling scheme: " + name);
}

const char* to_string(ResampleScheme s) {
  return s == ResampleScheme::Stratified ? "stratified" : "multinomial";
}

double log_kernel_weight(double d, double eps, KernelType type) {
  if (!(d >= 0) || !std::isfinite(d)) return kNegInf;
  if (type == KernelType::Uniform) return d <= eps ? 0.0 : kNegInf;
  return -d * d / (2 * eps * eps);
}

double kernel_weight(double d, double eps, KernelType type) {
  return std::exp(log_kernel_weight(d, eps, type));
}

double ess(const std::vector<double>& weights) {
  double s = 0, s2 = 0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0 ? s * s / s2 : 0;
}

std::vector<std::size_t> resample_indices(const std::vector<double>& weights,
                                          ResampleScheme scheme, Rng& rng) {
  const std::size_t n = weights.size();
  std::vector<double> cdf(n);
  std::partial_sum(weights.begin(), weights.end(), cdf.begin());
  const double total = cdf.back();
  if (!(total > 0)) throw std::invalid_argument("cannot resample zero weights");

  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i)
    u[i] = scheme == ResampleScheme::Stratified ? (static_cast<double>(i) + uniform01(rng)) / n
                                                : uniform01(rng);
  if (scheme == ResampleScheme::Multinomial) std::sort(u.begin(), u.end());

  std::vector<std::size_t> out(n);
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double target = u[i] * total;
    while (j + 1 < n && cdf[j] <= target) ++j;
    out[i] = j;
  }
  return out;
}

double weighted_quantile(const std::vector<double>& values, const std::vector<double>& weights,
                         double q) {
  if (values.empty() || values.size() != weights.size())
    throw std::invalid_argument("weighted quantile needs matching nonempty inputs");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double cum = 0;
  for (auto i : order) {
    cum += weights[i];
    if (cum >= q * total) return values[i];
  }
  return values[order.back()];
}

double quantile_matched_tolerance(double qhat, double q) {
  if (q <= 0.5) return kInf;
  return qhat / (std::sqrt(2.0) * boost::math::erf_inv(2 * q - 1));
}

double adapt_tolerance(const std::vector<double>& distances, const std::vector<double>& weights,
                       double q, double alpha, double eps_prev, double eps_floor) {
  if (!(q > 0 && q < 1)) throw std::invalid_argument("quantile level must lie in (0, 1)");
  const double qhat = weighted_quantile(distances, weights, q);
  const double candidate = quantile_matched_tolerance(qhat, q);
  double next = std::min(candidate, (1 - alpha) * eps_prev);
  if (!(next > 0)) next = (1 - alpha) * eps_prev;
  return std::max(next, eps_floor);
}

void SmcConfig::validate() const {
  if (particles < 2) throw std::invalid_argument("need at least 2 particles");
  if (iterations < 1) throw std::invalid_argument("need at least 1 iteration");
  if (replicates < 1) throw std::invalid_argument("need at least 1 replicate");
  if (!(quantile > 0 && quantile < 1)) throw std::invalid_argument("quantile must lie in (0, 1)");
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(eps_floor >= 0)) throw std::invalid_argument("eps_floor must be >= 0");
  if (!(ess_fraction * static_cast<double>(particles) >= 1 && ess_fraction <= 1))
    throw std::invalid_argument("ESS threshold must lie in [1, N]");
}

double mean_distance(const Particle& p) {
  double s = 0;
  for (const auto& r : p.replicates) s += r.distance.combined;
  return p.replicates.empty() ? kInf : s / static_cast<double>(p.replicates.size());
}

namespace {

double log_mean_kernel(const Particle& p, double eps, KernelType type) {
  std::vector<double> lk;
  lk.reserve(p.replicates.size());
  for (const auto& r : p.replicates) lk.push_back(log_kernel_weight(r.distance.combined, eps, type));
  return log_sum_exp(lk) - std::log(static_cast<double>(lk.size()));
}

void simulate_replicates(const AbcModel& model, Particle& p, std::size_t count, Rng& rng) {
  p.replicates.clear();
  for (std::size_t s = 0; s < count; ++s) {
    Replicate r;
    try {
      r.summary = model.simulate(p.theta, rng);
    } catch (const std::exception&) {
      r.summary.converged = false;
    }
    p.replicates.push_back(std::move(r));
  }
}

void assign_distances(Particle& p, const auxiliary::AuxSummary& observed,
                      const auxiliary::DistanceConfig& cfg) {
  for (auto& r : p.replicates) r.distance = auxiliary::distance(observed, r.summary, cfg);
}

// Distances and weights flattened over replicates.
void flatten(const std::vector<Particle>& pop, std::vector<double>& d, std::vector<double>& w) {
  d.clear();
  w.clear();
  for (const auto& p : pop)
    for (const auto& r : p.replicates) {
      d.push_back(r.distance.combined);
      w.push_back(p.weight / static_cast<double>(p.replicates.size()));
    }
}

double largest_finite(const std::vector<double>& v) {
  double m = 0;
  for (double x : v)
    if (std::isfinite(x)) m = std::max(m, x);
  return m;
}

IterationTrace summarize_iteration(std::size_t n, double eps, const std::vector<Particle>& pop) {
  IterationTrace t;
  t.iteration = n;
  t.eps = eps;
  std::vector<double> w, d;
  for (const auto& p : pop) {
    w.push_back(p.weight);
    d.push_back(mean_distance(p));
  }
  t.ess = ess(w);
  std::sort(d.begin(), d.end());
  t.min_distance = d.front();
  t.median_distance = d[d.size() / 2];
  const double wmax = *std::max_element(w.begin(), w.end());
  t.weight_histogram.assign(10, 0);
  for (double x : w) {
    const auto bin = wmax > 0 ? std::min<std::size_t>(9, static_cast<std::size_t>(10 * x / wmax))
                              : 0;
    ++t.weight_histogram[bin];
  }
  return t;
}

}  // namespace

double log_target(const AbcModel& model, const Particle& p, double eps, KernelType type) {
  return model.log_prior(p.theta) + log_mean_kernel(p, eps, type);
}

std::vector<double> SmcResult::weights() const {
  std::vector<double> w;
  for (const auto& p : particles) w.push_back(p.weight);
  return w;
}

sim::ThetaVector SmcResult::map() const {
  auto best = std::max_element(particles.begin(), particles.end(),
                               [](const Particle& a, const Particle& b) { return a.weight < b.weight; });
  return best->theta;
}

sim::ThetaVector SmcResult::mmse() const {
  sim::ThetaVector out = particles.front().theta;
  std::fill(out.scalars.begin(), out.scalars.end(), 0.0);
  for (auto& c : out.covariances) c.setZero();
  for (const auto& p : particles) {
    for (std::size_t k = 0; k < out.scalars.size(); ++k) out.scalars[k] += p.weight * p.theta.scalars[k];
    for (std::size_t c = 0; c < out.covariances.size(); ++c)
      out.covariances[c] += p.weight * p.theta.covariances[c];
  }
  for (auto& c : out.covariances) c = genetic::nearest_spd(c);
  return out;
}

SmcResult run_smc(const AbcModel& model, const auxiliary::AuxSummary& observed,
                  const SmcConfig& config, const auxiliary::DistanceConfig& distance,
                  const IterationCallback& on_iteration) {
  config.validate();
  const std::size_t n_particles = config.particles;
  const auto type = config.kernel;
  SmcResult result;
  result.distance = distance;

  // Initial population from the prior.
  std::vector<Particle> pop(n_particles);
  parallel_for(n_particles, config.workers, [&](std::size_t i) {
    Rng rng = make_stream(config.seed, {0, i});
    pop[i].theta = model.sample_prior(rng);
    pop[i].ancestor = i;
    simulate_replicates(model, pop[i], config.replicates, rng);
  });
  if (config.fit_scales) {
    std::vector<auxiliary::AuxSummary> all;
    for (const auto& p : pop)
      for (const auto& r : p.replicates) all.push_back(r.summary);
    auxiliary::fit_scales(result.distance, all);
  }
  for (auto& p : pop) {
    assign_distances(p, observed, result.distance);
    p.weight = 1.0 / static_cast<double>(n_particles);
    result.initial_distances.push_back(mean_distance(p));
  }

  std::vector<double> flat_d, flat_w;
  flatten(pop, flat_d, flat_w);
  const double qhat = weighted_quantile(flat_d, flat_w, config.quantile);
  double eps = quantile_matched_tolerance(std::isfinite(qhat) ? qhat : largest_finite(flat_d),
                                          config.quantile);
  if (!std::isfinite(eps)) eps = std::isfinite(qhat) ? qhat : largest_finite(flat_d);
  eps = std::max(eps, config.eps_floor);
  if (!(eps > 0)) eps = 1e-12;

  auto fail = [&](std::string why) {
    result.collapsed = true;
    result.diagnostic = std::move(why);
    result.particles = pop;
    return result;
  };

  std::vector<double> logw(n_particles);
  for (std::size_t i = 0; i < n_particles; ++i) logw[i] = log_mean_kernel(pop[i], eps, type);
  const double lse = log_sum_exp(logw);
  if (!std::isfinite(lse)) return fail("all initial particles have zero kernel weight");
  double log_evidence = lse - std::log(static_cast<double>(n_particles));
  for (std::size_t i = 0; i < n_particles; ++i) pop[i].weight = std::exp(logw[i] - lse);

  {
    IterationTrace t = summarize_iteration(1, eps, pop);
    t.ess_before = t.ess;
    t.log_evidence = log_evidence;
    t.moved = t.simulated = n_particles;
    result.trace.push_back(t);
    if (on_iteration) on_iteration(t, pop);
  }

  for (std::size_t n = 2; n <= config.iterations; ++n) {
    if (config.stop_at_floor && eps <= config.eps_floor) break;
    const double eps_prev = eps;
    flatten(pop, flat_d, flat_w);
    eps = adapt_tolerance(flat_d, flat_w, config.quantile, config.alpha, eps_prev, config.eps_floor);

    std::vector<double> w_prev;
    for (const auto& p : pop) w_prev.push_back(p.weight);
    const double ess_before = ess(w_prev);
    bool resampled = false;
    if (ess_before < config.ess_fraction * static_cast<double>(n_particles)) {
      Rng rng = make_stream(config.seed, {n, kResampleStream});
      const auto idx = resample_indices(w_prev, config.resampling, rng);
      std::vector<Particle> next(n_particles);
      for (std::size_t i = 0; i < n_particles; ++i) {
        next[i] = pop[idx[i]];
        next[i].ancestor = idx[i];
        next[i].weight = 1.0 / static_cast<double>(n_particles);
      }
      pop = std::move(next);
      w_prev.assign(n_particles, 1.0 / static_cast<double>(n_particles));
      resampled = true;
    }

    std::vector<sim::ThetaVector> thetas;
    for (const auto& p : pop) thetas.push_back(p.theta);
    const genetic::GeneticKernel kernel(model.space, model.kernel, thetas, w_prev);
    const std::vector<bool> all_moved(model.space.size() + model.space.covariance_count(), true);
    const std::vector<bool> none_moved(all_moved.size(), false);

    std::vector<Particle> next(n_particles);
    std::vector<char> moved(n_particles, 0);
    parallel_for(n_particles, config.workers, [&](std::size_t i) {
      const Particle& old = pop[i];
      Particle& p = next[i];
      p = old;
      p.ancestor = resampled ? old.ancestor : i;
      if (!(w_prev[i] > 0)) {
        logw[i] = kNegInf;
        return;
      }
      Rng rng = make_stream(config.seed, {n, i});
      p.theta = kernel.propose(old.theta, rng);
      const auto mask = kernel.moved(old.theta, p.theta);
      const auto count = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
      if (count == 0) {
        // Reuse the stored replicates at the new tolerance.
        logw[i] = log_mean_kernel(old, eps, type) - log_mean_kernel(old, eps_prev, type);
        if (std::isnan(logw[i])) logw[i] = kNegInf;
        return;
      }
      moved[i] = 1;
      simulate_replicates(model, p, config.replicates, rng);
      assign_distances(p, observed, result.distance);
      const double target = log_target(model, p, eps, type);
      if (count == mask.size()) {
        logw[i] = target + kernel.log_move_probability(p.theta, all_moved) - log_evidence -
                  kernel.log_mixture(p.theta);
      } else {
        // Backward move: the mutation-only kernel restricted to partial moves,
        // rescaled to the partial-move mass the full kernel leaves over.
        const double keep = log1m_sum(kernel.log_move_probability(p.theta, none_moved),
                                      kernel.log_move_probability(p.theta, all_moved));
        const double norm = log1m_sum(kernel.log_mutation_move_probability(p.theta, none_moved),
                                      kernel.log_mutation_move_probability(p.theta, all_moved));
        logw[i] = target + kernel.log_mutation_joint(p.theta, old.theta) + keep - norm -
                  log_target(model, old, eps_prev, type) - kernel.log_joint(old.theta, p.theta);
      }
      if (std::isnan(logw[i])) logw[i] = kNegInf;
    });

    std::vector<double> terms(n_particles);
    for (std::size_t i = 0; i < n_particles; ++i)
      terms[i] = w_prev[i] > 0 ? std::log(w_prev[i]) + logw[i] : kNegInf;
    const double total = log_sum_exp(terms);
    pop = std::move(next);
    if (!std::isfinite(total)) {
      IterationTrace t = summarize_iteration(n, eps, pop);
      t.ess_before = ess_before;
      t.resampled = resampled;
      t.ess = 0;
      t.log_evidence = kNegInf;
      result.trace.push_back(t);
      return fail("all particle weights are zero at iteration " + std::to_string(n) +
                  " (eps = " + std::to_string(eps) + ")");
    }
    log_evidence += total;
    for (std::size_t i = 0; i < n_particles; ++i) pop[i].weight = std::exp(terms[i] - total);

    IterationTrace t = summarize_iteration(n, eps, pop);
    t.ess_before = ess_before;
    t.resampled = resampled;
    t.log_evidence = log_evidence;
    t.moved = t.simulated = static_cast<std::size_t>(std::count(moved.begin(), moved.end(), 1));
    result.trace.push_back(t);
    if (on_iteration) on_iteration(t, pop);
  }

  result.particles = std::move(pop);
  return result;
}

}  // namespace lobabc::smc
