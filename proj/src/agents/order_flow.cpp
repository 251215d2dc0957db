#include "lobabc/agents/order_flow.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace lobabc::agents {

Link parse_link(const std::string& name) {
  if (name == "logistic") return Link::Logistic;
  if (name == "normal") return Link::NormalCdf;
  throw std::invalid_argument("unknown link: " + name);
}

const char* to_string(Link link) { return link == Link::Logistic ? "logistic" : "normal"; }

double apply_link(Link link, double x) {
  if (link == Link::Logistic) return 1 / (1 + std::exp(-x));
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

IntensityModel::IntensityModel(Eigen::VectorXd b, dist::SkewT l, Link f)
    : baseline(std::move(b)), latent(std::move(l)), link(f) {
  if (baseline.size() != latent.dim())
    throw std::invalid_argument("baseline and latent dimension disagree");
  if ((baseline.array() <= 0).any()) throw std::invalid_argument("baselines must be positive");
}

void OrderSizeDist::validate() const {
  if (!(mean >= 1) || !std::isfinite(mean))
    throw std::invalid_argument("order size mean must be >= 1");
}

Eigen::VectorXd draw_intensities(const IntensityModel& model, Rng& rng) {
  const Eigen::VectorXd gamma = model.latent.sample(rng);
  Eigen::VectorXd out(gamma.size());
  for (Eigen::Index i = 0; i < gamma.size(); ++i)
    out[i] = model.baseline[i] * apply_link(model.link, gamma[i]);
  return out;
}

std::vector<Count> sample_lo_counts(const Eigen::VectorXd& lambda, Rng& rng) {
  std::vector<Count> out(static_cast<std::size_t>(lambda.size()), 0);
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] <= 0) continue;
    std::poisson_distribution<Count> pois(lambda[i]);
    out[static_cast<std::size_t>(i)] = pois(rng);
  }
  return out;
}

Count sample_truncated_poisson(double lambda, Count cap, Rng& rng) {
  if (cap <= 0 || !(lambda > 0)) return 0;
  if (static_cast<double>(cap) > 10 * lambda) {
    // P(N > cap) is negligible here, so rejection almost never repeats.
    std::poisson_distribution<Count> pois(lambda);
    for (;;) {
      const Count n = pois(rng);
      if (n <= cap) return n;
    }
  }
  // Inverse CDF over {0..cap}; terms in log space relative to the largest.
  std::vector<double> w(static_cast<std::size_t>(cap) + 1);
  const double log_lambda = std::log(lambda);
  double top = -std::numeric_limits<double>::infinity();
  for (Count n = 0; n <= cap; ++n) {
    w[n] = n * log_lambda - std::lgamma(n + 1.0);
    top = std::max(top, w[n]);
  }
  double total = 0;
  for (auto& x : w) total += (x = std::exp(x - top));
  double u = uniform01(rng) * total;
  for (Count n = 0; n < cap; ++n) {
    u -= w[n];
    if (u < 0) return n;
  }
  return cap;
}

std::vector<Count> sample_truncated_counts(const Eigen::VectorXd& lambda,
                                           const std::vector<Count>& caps, Rng& rng) {
  if (static_cast<std::size_t>(lambda.size()) != caps.size())
    throw std::invalid_argument("intensity and cap vectors differ in length");
  std::vector<Count> out(caps.size());
  for (std::size_t i = 0; i < caps.size(); ++i) {
    if (caps[i] < 0) throw std::invalid_argument("negative truncation cap");
    out[i] = sample_truncated_poisson(lambda[static_cast<Eigen::Index>(i)], caps[i], rng);
  }
  return out;
}

std::vector<std::int64_t> sample_order_sizes(const OrderSizeDist& dist, Count n, Rng& rng) {
  std::vector<std::int64_t> out;
  if (n <= 0) return out;
  out.reserve(static_cast<std::size_t>(n));
  if (dist.mean <= 1) {
    out.assign(static_cast<std::size_t>(n), 1);
    return out;
  }
  std::geometric_distribution<std::int64_t> geom(1 / dist.mean);
  for (Count i = 0; i < n; ++i) out.push_back(1 + geom(rng));
  return out;
}

}  // namespace lobabc::agents
