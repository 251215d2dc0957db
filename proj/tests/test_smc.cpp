#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "lobabc/smc/abc_smc.hpp"

using namespace lobabc;
using namespace lobabc::smc;

TEST_CASE("kernel weights") {
  CHECK(kernel_weight(0.3, 0.2) == doctest::Approx(std::exp(-0.09 / 0.08)));
  CHECK(log_kernel_weight(0.3, 0.2) == doctest::Approx(-0.09 / 0.08));
  CHECK(kernel_weight(0.2, 0.2, KernelType::Uniform) == 1);
  CHECK(kernel_weight(0.2000001, 0.2, KernelType::Uniform) == 0);
  CHECK(kernel_weight(std::numeric_limits<double>::infinity(), 1) == 0);
}

TEST_CASE("effective sample size") {
  CHECK(ess({1, 1, 1, 1}) == doctest::Approx(4));
  CHECK(ess({0, 0, 5, 0}) == doctest::Approx(1));
  const std::vector<double> w{0.1, 0.2, 0.3, 0.4};
  CHECK(ess(w) == doctest::Approx(1.0 / (0.01 + 0.04 + 0.09 + 0.16)));
  std::vector<double> scaled = w;
  for (double& x : scaled) x *= 17;
  CHECK(ess(scaled) == doctest::Approx(ess(w)));
}

TEST_CASE("resampling reproduces the weights") {
  const std::vector<double> w{0.05, 0.4, 0.0, 0.25, 0.3};
  const std::size_t n = w.size();
  Rng rng = make_stream(1);
  std::vector<double> mean(n, 0);
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) {
    const auto idx = resample_indices(w, ResampleScheme::Stratified, rng);
    std::vector<int> count(n, 0);
    for (auto i : idx) ++count[i];
    CHECK(count[2] == 0);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(count[i] - n * w[i]) < 2);
      mean[i] += count[i];
    }
    CHECK(std::is_sorted(idx.begin(), idx.end()));
  }
  for (std::size_t i = 0; i < n; ++i) CHECK(mean[i] / reps == doctest::Approx(n * w[i]).epsilon(0.02).scale(1));

  std::fill(mean.begin(), mean.end(), 0);
  for (int r = 0; r < reps; ++r)
    for (auto i : resample_indices(w, ResampleScheme::Multinomial, rng)) mean[i] += 1;
  for (std::size_t i = 0; i < n; ++i) CHECK(mean[i] / reps == doctest::Approx(n * w[i]).epsilon(0.02).scale(1));
  CHECK_THROWS(resample_indices({0, 0}, ResampleScheme::Stratified, rng));
  CHECK(parse_resample_scheme(to_string(ResampleScheme::Multinomial)) == ResampleScheme::Multinomial);
}

TEST_CASE("weighted quantile equals the quantile of the expanded sample") {
  Rng rng = make_stream(2);
  std::uniform_int_distribution<int> wd(0, 4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(7), w(7);
    std::vector<double> expanded;
    for (int i = 0; i < 7; ++i) {
      v[i] = std::floor(10 * uniform01(rng));  // ties on purpose
      w[i] = wd(rng);
      for (int k = 0; k < w[i]; ++k) expanded.push_back(v[i]);
    }
    if (expanded.empty()) continue;
    std::sort(expanded.begin(), expanded.end());
    for (double q : {0.1, 0.5, 0.9, 1.0}) {
      // Smallest x with (#values <= x) >= q * n.
      const double need = q * expanded.size();
      double want = expanded.back();
      for (std::size_t k = 0; k < expanded.size(); ++k)
        if (k + 1 >= need - 1e-12) {
          want = expanded[k];
          break;
        }
      CHECK(weighted_quantile(v, w, q) == want);
    }
  }
}

TEST_CASE("quantile-matched tolerance") {
  for (double q : {0.6, 0.9, 0.99}) {
    const double eps = quantile_matched_tolerance(2.5, q);
    // Normal(0, eps^2) puts its q-quantile at 2.5.
    CHECK(0.5 * std::erfc(-2.5 / eps / std::sqrt(2.0)) == doctest::Approx(q).epsilon(1e-12));
  }
  CHECK(std::isinf(quantile_matched_tolerance(1, 0.5)));
}

TEST_CASE("tolerance schedule shrinks and respects the floor") {
  const std::vector<double> d{0.1, 0.5, 1.0, 2.0, 4.0}, w(5, 1.0);
  const double e1 = adapt_tolerance(d, w, 0.9, 0.1, 100, 0);
  CHECK(e1 == doctest::Approx(quantile_matched_tolerance(4.0, 0.9)));
  const double e2 = adapt_tolerance(d, w, 0.9, 0.1, e1, 0);
  CHECK(e2 == doctest::Approx(0.9 * e1));
  CHECK(adapt_tolerance(d, w, 0.9, 0.1, e1, 10) == 10);
  CHECK(adapt_tolerance(d, w, 0.4, 0.1, 3, 0) == doctest::Approx(2.7));
  CHECK_THROWS(adapt_tolerance(d, w, 1.0, 0.1, 3, 0));
}

namespace {

constexpr double kObserved = 0.8;
constexpr double kNoise = 0.5;

// theta ~ N(0, 1) truncated to [-5, 5], summary = theta + 0.5 Z.
AbcModel gaussian_toy() {
  AbcModel m;
  m.space.add("mu", -5, 5);
  const double log_mass = std::log(std::erf(5 / std::sqrt(2.0)));
  m.log_prior = [log_mass](const sim::ThetaVector& t) {
    const double x = t.scalars[0];
    return -0.5 * x * x - 0.5 * std::log(2 * std::numbers::pi) - log_mass;
  };
  m.sample_prior = [](Rng& r) {
    std::normal_distribution<double> nd;
    double x;
    do x = nd(r);
    while (std::abs(x) > 5);
    return sim::ThetaVector{{x}, {}};
  };
  m.simulate = [](const sim::ThetaVector& t, Rng& r) {
    std::normal_distribution<double> nd;
    auxiliary::AuxSummary s;
    s.beta1 = {t.scalars[0] + kNoise * nd(r)};
    s.converged = true;
    return s;
  };
  return m;
}

auxiliary::AuxSummary observed() {
  auxiliary::AuxSummary s;
  s.beta1 = {kObserved};
  s.converged = true;
  return s;
}

SmcConfig toy_config(std::uint64_t seed, std::size_t workers = 1) {
  SmcConfig c;
  c.particles = 300;
  c.iterations = 100;
  c.eps_floor = 0.05;
  c.stop_at_floor = true;
  c.fit_scales = false;
  c.seed = seed;
  c.workers = workers;
  return c;
}

// ABC posterior mean at tolerance eps by quadrature: the Gaussian kernel and
// the Gaussian noise combine into one likelihood of variance noise^2 + eps^2.
double abc_posterior_mean(double eps) {
  const double v = kNoise * kNoise + eps * eps;
  double num = 0, den = 0;
  for (int i = -50000; i <= 50000; ++i) {
    const double x = i * 1e-4;
    const double w = std::exp(-0.5 * x * x - (x - kObserved) * (x - kObserved) / (2 * v));
    num += x * w;
    den += w;
  }
  return num / den;
}

// log of prior-averaged kernel mass, same closed form.
double abc_log_evidence(double eps) {
  const double v = eps * eps + kNoise * kNoise + 1;
  return std::log(eps / std::sqrt(v)) - kObserved * kObserved / (2 * v);
}

double weighted_mean(const SmcResult& r) {
  double m = 0;
  for (const auto& p : r.particles) m += p.weight * p.theta.scalars[0];
  return m;
}

}  // namespace

TEST_CASE("toy posterior mean and evidence") {
  const double oracle = abc_posterior_mean(0.05);
  CHECK(oracle == doctest::Approx(0.6387).epsilon(1e-3));
  std::vector<double> means;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const SmcResult r = run_smc(gaussian_toy(), observed(), toy_config(seed));
    REQUIRE_FALSE(r.collapsed);
    double total = 0;
    for (const auto& p : r.particles) total += p.weight;
    CHECK(total == doctest::Approx(1).epsilon(1e-12));
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      CHECK(r.trace[i].eps < r.trace[i - 1].eps);
      CHECK(std::isfinite(r.trace[i].ess));
    }
    const auto& last = r.trace.back();
    CHECK(last.eps == 0.05);
    CHECK(last.log_evidence == doctest::Approx(abc_log_evidence(0.05)).epsilon(0.05).scale(1));
    means.push_back(weighted_mean(r));
  }
  double m = 0;
  for (double x : means) m += x;
  m /= means.size();
  // Posterior sd is ~0.45; three runs of ~300 particles each.
  CHECK(std::abs(m - oracle) < 0.08);
}

TEST_CASE("results do not depend on the worker count") {
  const SmcResult a = run_smc(gaussian_toy(), observed(), toy_config(4, 1));
  const SmcResult b = run_smc(gaussian_toy(), observed(), toy_config(4, 3));
  REQUIRE(a.particles.size() == b.particles.size());
  for (std::size_t i = 0; i < a.particles.size(); ++i) {
    CHECK(a.particles[i].theta == b.particles[i].theta);
    CHECK(a.particles[i].weight == b.particles[i].weight);
    CHECK(a.particles[i].ancestor == b.particles[i].ancestor);
  }
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i].eps == b.trace[i].eps);
  const SmcResult c = run_smc(gaussian_toy(), observed(), toy_config(5, 1));
  CHECK_FALSE(a.particles[0].theta == c.particles[0].theta);
}

TEST_CASE("map and mmse") {
  SmcResult r;
  r.particles.resize(3);
  const double xs[] = {1, 2, 10}, ws[] = {0.2, 0.5, 0.3};
  for (int i = 0; i < 3; ++i) {
    r.particles[i].theta.scalars = {xs[i]};
    r.particles[i].weight = ws[i];
  }
  CHECK(r.mmse().scalars[0] == doctest::Approx(0.2 + 1.0 + 3.0));
  CHECK(r.map().scalars[0] == 2);
  CHECK(r.weights() == std::vector<double>{0.2, 0.5, 0.3});
}

TEST_CASE("a simulator that never converges collapses the weights") {
  AbcModel m = gaussian_toy();
  m.simulate = [](const sim::ThetaVector&, Rng&) { return auxiliary::AuxSummary{}; };
  SmcConfig c = toy_config(6);
  c.particles = 20;
  const SmcResult r = run_smc(m, observed(), c);
  CHECK(r.collapsed);
  CHECK_FALSE(r.diagnostic.empty());
}

TEST_CASE("configuration validation") {
  SmcConfig c;
  c.particles = 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SmcConfig{};
  c.quantile = 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SmcConfig{};
  c.ess_fraction = 0.001;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_NOTHROW(SmcConfig{}.validate());
}
