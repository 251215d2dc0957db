// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails that was not declared with --known-failure.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "density_checks.hpp"
#include "lobabc/agents/order_flow.hpp"
#include "lobabc/auxiliary/summary.hpp"
#include "lobabc/cli/commands.hpp"
#include "lobabc/cli/pipeline.hpp"
#include "lobabc/dist/skew_t.hpp"
#include "lobabc/genetic/covariance.hpp"
#include "lobabc/lob/order_book.hpp"
#include "lobabc/moea/moea.hpp"
#include "lobabc/smc/abc_smc.hpp"

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <unistd.h>

using namespace lobabc;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// A criterion may have labelled parts (7a, 7b); the line passes when all do.
struct Part {
  std::string id;
  bool pass = false;
  std::string detail;
};

struct Outcome {
  std::vector<Part> parts;
  double seconds = 0;
};

// ------------------------------------------------------------------ 1

Outcome matching_engine() {
  const auto t0 = Clock::now();
  auto figure_book = [] {
    lob::OrderBook b;
    b.submit_limit(lob::Side::Bid, 2700, 100);
    b.submit_limit(lob::Side::Bid, 2699, 250);
    b.submit_limit(lob::Side::Bid, 2698, 80);
    b.submit_limit(lob::Side::Ask, 2702, 70);
    b.submit_limit(lob::Side::Ask, 2702, 100);
    b.submit_limit(lob::Side::Ask, 2704, 50);
    b.submit_limit(lob::Side::Ask, 2705, 120);
    return b;
  };
  lob::OrderBook a = figure_book();
  const auto mo = a.submit_market(lob::Side::Bid, 200);
  std::vector<std::pair<lob::Price, lob::Quantity>> got;
  for (const auto& t : mo.trades) got.emplace_back(t.price, t.size);
  const std::vector<std::pair<lob::Price, lob::Quantity>> want{{2702, 70}, {2702, 100}, {2704, 30}};
  const bool trades_ok = got == want && mo.unfilled == 0;

  lob::OrderBook b = figure_book();
  const auto lo = b.submit_limit(lob::Side::Ask, 2705, 300);
  const auto* q = b.queue_at(lob::Side::Ask, 2705);
  const bool queue_ok = lo.trades.empty() && lo.resting_id && q && q->size() == 2 &&
                        (*q)[1].id == *lo.resting_id && (*q)[1].size == 300;
  const double ms = seconds_since(t0) * 1e3;
  std::string trades;
  for (auto [p, s] : got) trades += fmt("%lld@%lld ", (long long)s, (long long)p);
  return {{{"1", trades_ok && queue_ok && ms < 1.0,
            fmt("trades [%s] sell 300@2705 queue position %d, %.3f ms", trades.c_str(),
                q ? int(q->size()) : 0, ms)}},
          seconds_since(t0)};
}

// ------------------------------------------------------------------ 2

Outcome truncated_poisson() {
  const auto t0 = Clock::now();
  const double lambda = 3;
  const agents::Count cap = 5;
  const int n = 1000000;
  std::vector<double> exact(cap + 1);
  double total = 0;
  for (int k = 0; k <= cap; ++k) total += exact[k] = std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
  for (double& p : exact) p /= total;

  Rng rng = make_stream(2024);
  std::vector<long> counts(cap + 1, 0);
  for (int i = 0; i < n; ++i) ++counts[agents::sample_truncated_poisson(lambda, cap, rng)];
  double tv = 0, expected_tv = 0;
  for (int k = 0; k <= cap; ++k) {
    tv += std::abs(counts[k] / double(n) - exact[k]);
    expected_tv += std::sqrt(2 * exact[k] * (1 - exact[k]) / (std::numbers::pi * n));
  }
  tv /= 2;
  expected_tv /= 2;
  const double secs = seconds_since(t0);
  return {{{"2", tv < 1e-3 && secs < 5,
            fmt("TV %.2e (sampling noise alone gives ~%.1e), %.2f s", tv, expected_tv, secs)}},
          secs};
}

// ------------------------------------------------------------------ 3

Outcome skew_t() {
  const auto t0 = Clock::now();
  Outcome out;
  // (a) zero skewness against a Student-t written out here.
  {
    const double m = 0.4, sd = 1.3, nu = 6.5;
    const dist::SkewT st(dist::SkewTParams::univariate(m, 0, nu, sd));
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const double x = -15 + 30.0 * i / 99, z = (x - m) / sd;
      const double want = std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2) -
                          0.5 * std::log(nu * std::numbers::pi) - std::log(sd) -
                          (nu + 1) / 2 * std::log1p(z * z / nu);
      worst = std::max(worst, std::abs(st.log_density(x) - want));
    }
    out.parts.push_back({"3a", worst < 1e-10, fmt("max |dlog f| %.1e", worst)});
  }
  // (b) sampler mean.
  {
    const double m = -0.3, beta = 0.8, nu = 7, sd = 0.9;
    const dist::SkewT st(dist::SkewTParams::univariate(m, beta, nu, sd));
    Rng rng = make_stream(3);
    const int n = 1000000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double x = st.sample_scalar(rng);
      s += x;
      s2 += x * x;
    }
    const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
    const double want = m + beta * nu / (nu - 2);
    const double z = (mean - want) / se;
    out.parts.push_back({"3b", std::abs(z) < 3, fmt("mean %.5f vs %.5f (%.2f SE)", mean, want, z)});
  }
  // (c) normalization.
  {
    boost::math::quadrature::sinh_sinh<double> integrator;
    double worst = 0;
    for (double beta : {-1.2, 0.0, 0.5, 2.0}) {
      const dist::SkewT st(dist::SkewTParams::univariate(0.1, beta, 5.5, 0.7));
      worst = std::max(worst, std::abs(integrator.integrate([&](double x) { return std::exp(st.log_density(x)); }) - 1));
    }
    out.parts.push_back({"3c", worst < 1e-6, fmt("max |mass - 1| %.1e", worst)});
  }
  out.seconds = seconds_since(t0);
  if (out.seconds >= 30) out.parts.push_back({"3t", false, "over 30 s"});
  return out;
}

// ------------------------------------------------------------------ 4

Outcome genetic_operators() {
  using namespace lobabc::testing;
  const auto t0 = Clock::now();
  const genetic::Bounds b{-1, 3};
  const std::size_t n = 100000;
  double worst_mass = 0, worst_p = 1;

  struct Pair {
    double xi, xj;
  };
  for (auto [xi, xj] : {Pair{0.0, 1.0}, Pair{2.9, 2.4}}) {
    const double eta = 5;
    const double mid = (xi + xj) / 2, end = mid + genetic::sbx_spread_limit(xi, xj, b) * (xj - xi) / 2;
    const double lo = std::min(mid, end), hi = std::max(mid, end);
    auto dens = [&](double y) { return genetic::sbx_density(y, xi, xj, b, eta); };
    const auto cuts = sbx_cuts(xi, xj, b);
    worst_mass = std::max(worst_mass, std::abs(piecewise_integral(dens, lo, hi, cuts) - 1));
    Rng rng = make_stream(41, {static_cast<std::uint64_t>(xi * 10)});
    std::vector<double> xs(n);
    for (double& x : xs) x = genetic::sbx_cross(xi, xj, b, eta, rng);
    worst_p = std::min(worst_p, ks_p_value(ks_statistic(xs, dens, lo, cuts), n));
  }
  for (double x : {1.0, -0.8}) {
    const double eta = 10;
    auto dens = [&](double y) { return genetic::poly_density(y, x, b, eta); };
    const auto cuts = poly_cuts(x, b);
    worst_mass = std::max(worst_mass, std::abs(piecewise_integral(dens, b.lower, b.upper, cuts) - 1));
    Rng rng = make_stream(42, {static_cast<std::uint64_t>(x * 10 + 10)});
    std::vector<double> ys(n);
    for (double& y : ys) y = genetic::poly_mutate(x, b, eta, rng);
    worst_p = std::min(worst_p, ks_p_value(ks_statistic(ys, dens, b.lower, cuts), n));
  }
  const double secs = seconds_since(t0);
  return {{{"4", worst_mass < 1e-4 && worst_p > 0.01 && secs < 30,
            fmt("max |mass - 1| %.1e, min KS p %.3f over 4 operators, %.2f s", worst_mass, worst_p, secs)}},
          secs};
}

// ------------------------------------------------------------------ 5

Outcome covariance_mutation() {
  const auto t0 = Clock::now();
  const int d = 3, n = 10000;
  const double p1 = 20;
  Eigen::MatrixXd centre(d, d);
  centre << 1.0, 0.3, 0.1, 0.3, 0.8, -0.2, 0.1, -0.2, 0.5;

  // Draws from the full mixture, static and adaptive, must all be SPD.
  const auto mix = genetic::CovarianceMixture::centred(centre, 0.05, p1, 10);
  genetic::ScaleHistory history(0.8);
  history.add_generation({centre * 1.5}, {1});
  Rng rng = make_stream(5);
  int spd = 0;
  for (int i = 0; i < n; ++i) {
    const auto mode = i % 2 ? genetic::CovarianceMode::Adaptive : genetic::CovarianceMode::Static;
    spd += sim::is_spd(genetic::mutate_covariance(mix, mode, &history, true, rng));
  }

  // Static draws from the local component alone: mean local / (p1 - d - 1).
  genetic::CovarianceMixture local = mix;
  local.w1 = 0;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d), sum2 = sum;
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd s = genetic::mutate_covariance(local, genetic::CovarianceMode::Static, nullptr, true, rng);
    sum += s;
    sum2 += s.cwiseProduct(s);
  }
  const Eigen::MatrixXd mean = sum / n;
  const Eigen::MatrixXd se = ((sum2 / n - mean.cwiseProduct(mean)) / n).cwiseSqrt();
  const Eigen::MatrixXd want = local.local_scale / (p1 - d - 1);
  const double worst_z = ((mean - want).cwiseAbs().cwiseQuotient(se)).maxCoeff();
  const double secs = seconds_since(t0);
  return {{{"5", spd == n && worst_z < 4 && secs < 10,
            fmt("%d/%d SPD, mean within %.2f SE entrywise (limit 4), %.2f s", spd, n, worst_z, secs)}},
          secs};
}

// ------------------------------------------------------------------ 6

Outcome toy_smc() {
  const auto t0 = Clock::now();
  constexpr double observed = 0.8, noise = 0.5, eps = 0.05;
  smc::AbcModel m;
  m.space.add("mean", -5, 5);
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
    s.beta1 = {t.scalars[0] + noise * nd(r)};
    s.converged = true;
    return s;
  };
  auxiliary::AuxSummary obs;
  obs.beta1 = {observed};
  obs.converged = true;

  // Oracle: ABC posterior under the Gaussian kernel, by grid quadrature.
  double num = 0, den = 0;
  for (int i = -500000; i <= 500000; ++i) {
    const double x = i * 1e-5;
    const double w = std::exp(-0.5 * x * x - (x - observed) * (x - observed) / (2 * (noise * noise + eps * eps)));
    num += x * w;
    den += w;
  }
  const double oracle = num / den;

  smc::SmcConfig c;
  c.particles = 500;
  c.iterations = 200;
  c.eps_floor = eps;  // prior sd is 1
  c.stop_at_floor = true;
  c.fit_scales = false;
  const int repeats = 5;
  std::vector<double> means;
  bool ess_ok = true, eps_ok = true, reached = true;
  double slowest = 0;
  for (int r = 0; r < repeats; ++r) {
    c.seed = 600 + r;
    const auto t1 = Clock::now();
    const auto res = smc::run_smc(m, obs, c);
    slowest = std::max(slowest, seconds_since(t1));
    double mean = 0;
    for (const auto& p : res.particles) mean += p.weight * p.theta.scalars[0];
    means.push_back(mean);
    for (std::size_t i = 0; i < res.trace.size(); ++i) {
      ess_ok = ess_ok && !std::isnan(res.trace[i].ess) && !std::isnan(res.trace[i].ess_before);
      if (i) eps_ok = eps_ok && res.trace[i].eps < res.trace[i - 1].eps;
    }
    reached = reached && !res.collapsed && res.trace.back().eps == eps;
  }
  double avg = 0, var = 0;
  for (double x : means) avg += x;
  avg /= repeats;
  for (double x : means) var += (x - avg) * (x - avg);
  const double se = std::sqrt(var / (repeats - 1) / repeats);
  const double z = (avg - oracle) / se;
  return {{{"6", std::abs(z) < 3 && ess_ok && eps_ok && reached && slowest < 60,
            fmt("mean %.4f vs oracle %.4f (%.2f between-run SE over %d runs); ESS finite %s, eps "
                "decreasing %s, slowest run %.1f s",
                avg, oracle, z, repeats, ess_ok ? "yes" : "no", eps_ok ? "yes" : "no", slowest)}},
          seconds_since(t0)};
}

// ------------------------------------------------------------------ 7

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double weighted_quantile(const std::vector<smc::Particle>& ps, std::size_t k, double q) {
  std::vector<std::pair<double, double>> v;
  for (const auto& p : ps) v.emplace_back(p.theta.scalars[k], p.weight);
  std::sort(v.begin(), v.end());
  double c = 0;
  for (auto [x, w] : v)
    if ((c += w) >= q) return x;
  return v.back().first;
}

// One synthetic day written as an event feed through the CLI, then read back
// through the same loader the calibrators use.
auxiliary::AuxSummary synthetic_observation(const cli::RunConfig& config, const fs::path& dir) {
  std::ostringstream log;
  cli::RunConfig c = config;
  c.output = dir.string();
  c.seed = 20120305;
  cli::SimulateOptions so;
  so.write_events = true;
  cli::cmd_simulate(c, so, log);
  const auto path = cli::load_observed((dir / "events.csv").string(), c);
  return auxiliary::summarize(path, c.return_delta_seconds);
}

Outcome synthetic_recovery(const fs::path& work) {
  const auto t0 = Clock::now();
  cli::RunConfig cfg = cli::default_config();
  cfg.smc.particles = 50;
  cfg.smc.iterations = 10;
  cfg.smc.replicates = 1;
  cfg.smc.quantile = 0.9;
  cfg.smc.alpha = 0.1;
  const auto observed = synthetic_observation(cfg, work / "day");
  const auto model = cli::build_model(cfg);
  const auto truth = cfg.model.reference_theta();
  const std::size_t dims = truth.scalars.size();

  std::vector<double> ratios, floors;
  std::vector<int> covered;
  std::vector<int> per_coord(dims, 0);
  for (int r = 0; r < 5; ++r) {
    cfg.smc.seed = 700 + r;
    const auto res = smc::run_smc(model, observed, cfg.smc, cfg.distance);
    std::vector<double> final_d;
    for (const auto& p : res.particles) final_d.push_back(smc::mean_distance(p));
    const double initial = median(res.initial_distances);
    ratios.push_back(median(final_d) / initial);

    // What the ratio would be for a population sitting exactly on theta*.
    std::vector<double> at_truth;
    for (int s = 0; s < 40; ++s) {
      Rng rng = make_stream(cfg.smc.seed, {99, static_cast<std::uint64_t>(s)});
      at_truth.push_back(auxiliary::distance(observed, model.simulate(truth, rng), res.distance).combined);
    }
    floors.push_back(median(at_truth) / initial);

    int c = 0;
    for (std::size_t k = 0; k < dims; ++k) {
      const bool in = weighted_quantile(res.particles, k, 0.25) <= truth.scalars[k] &&
                      truth.scalars[k] <= weighted_quantile(res.particles, k, 0.75);
      c += in;
      per_coord[k] += in;
    }
    covered.push_back(c);
  }
  const bool a = std::all_of(ratios.begin(), ratios.end(), [](double x) { return x <= 0.2; });
  const bool b = std::all_of(covered.begin(), covered.end(), [](int c) { return c >= 4; });
  std::string rs, fl, cv, pc;
  for (double x : ratios) rs += fmt("%.2f ", x);
  for (double x : floors) fl += fmt("%.2f ", x);
  for (int x : covered) cv += fmt("%d ", x);
  for (int x : per_coord) pc += fmt("%d ", x);
  rs.pop_back();
  fl.pop_back();
  cv.pop_back();
  pc.pop_back();
  const double secs = seconds_since(t0);
  return {{{"7a", a, fmt("median distance ratio [%s] vs 0.20; ratio at theta* itself [%s]", rs.c_str(), fl.c_str())},
           {"7b", b && secs < 1200,
            fmt("IQR covers theta* in [%s] of %zu coordinates (need >= 4 each); per coordinate [%s] of 5",
                cv.c_str(), dims, pc.c_str())}},
          secs};
}

// ------------------------------------------------------------------ 8

Outcome auxiliary_recovery() {
  const auto t0 = Clock::now();
  Rng rng = make_stream(8);
  std::normal_distribution<double> z;
  std::vector<double> r;
  double h = 0.05 / (1 - 0.95), e = 0;
  for (int i = 0; i < 5500; ++i) {
    h = 0.05 + 0.1 * e * e + 0.85 * h;
    e = std::sqrt(h) * z(rng);
    if (i >= 500) r.push_back(e);
  }
  const auto g = auxiliary::fit_garch11(r);
  const bool garch_ok = g.converged && std::abs(g.omega - 0.05) <= 0.1 && std::abs(g.alpha - 0.1) <= 0.1 &&
                        std::abs(g.beta - 0.85) <= 0.1;

  std::vector<double> x;
  double prev = z(rng);
  for (int i = 0; i < 5000; ++i) {
    const double cur = z(rng);
    x.push_back(cur + 0.5 * prev);
    prev = cur;
  }
  const auto m = auxiliary::fit_ma1(x);
  const bool ma_ok = m.converged && std::abs(m.theta - 0.5) <= 0.05;
  const double secs = seconds_since(t0);
  return {{{"8", garch_ok && ma_ok && secs < 30,
            fmt("GARCH (%.3f, %.3f, %.3f) vs (0.05, 0.1, 0.85); MA %.3f vs 0.5; %.2f s", g.omega, g.alpha,
                g.beta, m.theta, secs)}},
          secs};
}

// ------------------------------------------------------------------ 9

Outcome nondominated_sort() {
  const auto t0 = Clock::now();
  Rng rng = make_stream(9);
  std::vector<moea::Objectives> pts(200);
  for (auto& p : pts) p = {uniform01(rng), uniform01(rng)};
  const auto ranks = moea::nondominated_sort(pts);
  const double secs = seconds_since(t0);

  // Peeling oracle.
  std::vector<int> want(pts.size(), 0);
  std::size_t done = 0;
  for (int level = 1; done < pts.size(); ++level) {
    std::vector<std::size_t> layer;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (want[i]) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < pts.size() && !dominated; ++j)
        dominated = j != i && !want[j] && pts[j][0] <= pts[i][0] && pts[j][1] <= pts[i][1] &&
                    (pts[j][0] < pts[i][0] || pts[j][1] < pts[i][1]);
      if (!dominated) layer.push_back(i);
    }
    for (auto i : layer) want[i] = level;
    done += layer.size();
  }
  bool mutual = true;
  int front = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    front += ranks[i] == 1;
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (ranks[i] == 1 && ranks[j] == 1 && moea::dominates(pts[i], pts[j])) mutual = false;
  }
  return {{{"9", ranks == want && mutual && secs < 1,
            fmt("ranks %s brute force, %d on the front, %d layers, %.4f s", ranks == want ? "equal" : "differ from",
                front, *std::max_element(ranks.begin(), ranks.end()), secs)}},
          secs};
}

// ------------------------------------------------------------------ 10

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const fs::path& work) {
  const auto t0 = Clock::now();
  cli::RunConfig cfg = cli::default_config();
  cfg.smc.particles = 30;
  cfg.smc.iterations = 4;
  cfg.seed = 10;
  std::ostringstream log;
  {
    cli::RunConfig sim = cfg;
    sim.output = (work / "det_day").string();
    cli::SimulateOptions so;
    so.write_events = true;
    cli::cmd_simulate(sim, so, log);
  }
  cfg.observed = (work / "det_day" / "events.csv").string();
  auto run = [&](const std::string& name, std::size_t workers) {
    cli::RunConfig c = cfg;
    c.workers = workers;
    c.output = (work / name).string();
    cli::cmd_calibrate_smc(c, log);
    return slurp(work / name / "particles.csv");
  };
  const std::string a = run("det_a", 2), b = run("det_b", 2), c = run("det_c", 1);
  const bool same = !a.empty() && a == b;
  return {{{"10", same,
            fmt("particle dumps %s at equal seed and 2 workers (%zu bytes); 1 worker %s", same ? "identical" : "differ",
                a.size(), a == c ? "identical too" : "differs")}},
          seconds_since(t0)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<std::string> known;
  std::vector<int> only;
  app.add_option("--known-failure", known, "criterion parts expected to fail (e.g. 7a)");
  app.add_option("--only", only, "run just these criteria");
  CLI11_PARSE(app, argc, argv);

  const fs::path work = fs::temp_directory_path() / ("lobabc_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(work);

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, matching_engine},
      {2, truncated_poisson},
      {3, skew_t},
      {4, genetic_operators},
      {5, covariance_mutation},
      {6, toy_smc},
      {7, [&] { return synthetic_recovery(work); }},
      {8, auxiliary_recovery},
      {9, nondominated_sort},
      {10, [&] { return determinism(work); }},
  };
  const std::set<std::string> expected(known.begin(), known.end());
  bool unexpected = false;
  for (const auto& [id, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.parts.push_back({std::to_string(id), false, std::string("threw: ") + e.what()});
    }
    bool pass = true;
    std::string detail;
    for (const auto& p : o.parts) {
      pass = pass && p.pass;
      if (!p.pass && !expected.count(p.id)) unexpected = true;
      if (!detail.empty()) detail += "; ";
      detail += (o.parts.size() > 1 ? p.id + (p.pass ? " ok: " : " FAIL: ") : "") + p.detail;
    }
    std::cout << (pass ? "PASS " : "FAIL ") << id << "  " << detail << fmt("  [%.1f s]", o.seconds) << std::endl;
  }
  fs::remove_all(work);
  return unexpected ? 1 : 0;
}
