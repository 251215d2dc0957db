#include "lobabc/genetic/kernel.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace lobabc::genetic {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& terms) {
  double m = kNegInf;
  for (double t : terms) m = std::max(m, t);
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

double safe_log(double x) { return x > 0 ? std::log(x) : kNegInf; }

// x^e, by repeated multiplication when e is a small integer.
double power(double x, double e) {
  if (e == std::floor(e) && e >= 0 && e <= 32) {
    double r = 1, b = x;
    for (auto n = static_cast<unsigned>(e); n; n >>= 1, b *= b)
      if (n & 1u) r *= b;
    return r;
  }
  return std::pow(x, e);
}

}  // namespace

void GeneticConfig::validate(const sim::ParameterSpace& space) const {
  auto prob = [](double p) { return p >= 0 && p <= 1; };
  if (!prob(crossover_prob) || !prob(element_cross_prob) || !prob(mutation_prob))
    throw std::invalid_argument("genetic probabilities must lie in [0, 1]");
  if (!(eta_c > 0) || !(eta_m > 0))
    throw std::invalid_argument("distribution indices must be positive");
  if (covariance.size() != space.covariance_count())
    throw std::invalid_argument("need one covariance mixture per covariance block");
  for (std::size_t c = 0; c < covariance.size(); ++c) {
    covariance[c].validate();
    if (covariance[c].dim() != space.covariance_dims[c])
      throw std::invalid_argument("covariance mixture dimension mismatch");
  }
}

GeneticKernel::GeneticKernel(sim::ParameterSpace space, GeneticConfig config,
                             std::vector<sim::ThetaVector> population, std::vector<double> weights)
    : space_(std::move(space)), config_(std::move(config)) {
  config_.validate(space_);
  if (population.empty() || population.size() != weights.size())
    throw std::invalid_argument("kernel population and weights differ in size");
  for (std::size_t k = 0; k < space_.size(); ++k)
    bounds_.push_back({space_.lower[k], space_.upper[k]});

  // Merge duplicates (resampling makes many) in first-appearance order.
  std::map<std::vector<double>, std::vector<std::size_t>> seen;
  for (std::size_t i = 0; i < population.size(); ++i) {
    if (!(weights[i] > 0)) continue;
    auto& slot = seen[population[i].scalars];
    std::size_t m = members_.size();
    for (auto cand : slot)
      if (members_[cand].theta == population[i]) {
        m = cand;
        break;
      }
    if (m == members_.size()) {
      slot.push_back(m);
      members_.push_back({std::move(population[i]), 0.0});
    }
    members_[m].weight += weights[i];
  }
  if (members_.empty()) throw std::invalid_argument("kernel population has no positive weight");

  const std::size_t n = members_.size(), d = space_.size();
  pairs_.resize(n * n * d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < d; ++k)
        pairs_[(i * n + j) * d + k] =
            make_pair(members_[i].theta.scalars[k], members_[j].theta.scalars[k], bounds_[k]);
}

GeneticKernel::SbxPair GeneticKernel::make_pair(double xi, double xj, const Bounds& b) const {
  SbxPair p;
  if (xi == xj) return p;
  p.sum = xi + xj;
  p.inv_gap = 1 / (xj - xi);
  p.limit = sbx_spread_limit(xi, xj, b);
  const double alpha = 2 - std::pow(p.limit, -(config_.eta_c + 1));
  p.coef = (config_.eta_c + 1) / alpha * 2 * std::abs(p.inv_gap);
  return p;
}

double GeneticKernel::sbx_pair_density(const SbxPair& p, double child) const {
  const double s = (2 * child - p.sum) * p.inv_gap;
  if (s < 0 || s > p.limit) return 0;
  return s <= 1 ? p.coef * power(s, config_.eta_c) : p.coef / power(s, config_.eta_c + 2);
}

std::vector<std::size_t> GeneticKernel::partners(const sim::ThetaVector& x, double& total) const {
  std::vector<std::size_t> out;
  total = 0;
  for (std::size_t j = 0; j < members_.size(); ++j) {
    if (members_[j].theta.scalars == x.scalars) continue;
    out.push_back(j);
    total += members_[j].weight;
  }
  return out;
}

sim::ThetaVector GeneticKernel::propose(const sim::ThetaVector& parent, Rng& rng) const {
  sim::ThetaVector child = parent;
  double total = 0;
  const auto pool = partners(parent, total);

  const sim::ThetaVector* partner = nullptr;
  if (!pool.empty() && uniform01(rng) < config_.crossover_prob) {
    double u = uniform01(rng) * total;
    partner = &members_[pool.back()].theta;
    for (auto j : pool) {
      u -= members_[j].weight;
      if (u < 0) {
        partner = &members_[j].theta;
        break;
      }
    }
  }

  for (std::size_t k = 0; k < space_.size(); ++k) {
    const double x = parent.scalars[k];
    if (partner && partner->scalars[k] != x && uniform01(rng) < config_.element_cross_prob) {
      child.scalars[k] = sbx_cross(x, partner->scalars[k], bounds_[k], config_.eta_c, rng);
      continue;
    }
    if (uniform01(rng) < config_.mutation_prob)
      child.scalars[k] = poly_mutate(x, bounds_[k], config_.eta_m, rng);
  }
  for (std::size_t c = 0; c < space_.covariance_count(); ++c)
    if (uniform01(rng) < config_.mutation_prob)
      child.covariances[c] = config_.covariance[c].sample(rng);
  return child;
}

std::vector<bool> GeneticKernel::moved(const sim::ThetaVector& from,
                                       const sim::ThetaVector& to) const {
  std::vector<bool> mask(space_.size() + space_.covariance_count());
  for (std::size_t k = 0; k < space_.size(); ++k) mask[k] = from.scalars[k] != to.scalars[k];
  for (std::size_t c = 0; c < space_.covariance_count(); ++c)
    mask[space_.size() + c] = from.covariances[c] != to.covariances[c];
  return mask;
}

double GeneticKernel::log_joint_masked(const sim::ThetaVector& from, const sim::ThetaVector* to,
                                       const std::vector<bool>& mask, long member,
                                       bool crossover) const {
  const double pm = config_.mutation_prob;
  const std::size_t d = space_.size();
  const std::size_t n = members_.size();

  // Covariance blocks do not depend on the partner.
  double log_cov = 0;
  for (std::size_t c = 0; c < space_.covariance_count(); ++c) {
    if (!mask[d + c]) {
      log_cov += safe_log(1 - pm);
      continue;
    }
    log_cov += safe_log(pm);
    if (to) log_cov += config_.covariance[c].log_density(to->covariances[c]);
  }
  if (!std::isfinite(log_cov)) return kNegInf;

  // Mutation-only factors per coordinate.
  std::vector<double> mut(d, 0.0), stay(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double x = from.scalars[k];
    const double can = poly_can_move(x, bounds_[k]) ? pm : 0.0;
    if (mask[k]) mut[k] = to ? can * poly_density(to->scalars[k], x, bounds_[k], config_.eta_m) : can;
    stay[k] = 1 - can;
  }

  double total = 0;
  std::vector<std::size_t> pool;
  if (crossover) pool = partners(from, total);
  const double pc = pool.empty() ? 0.0 : config_.crossover_prob;

  double sum = 0;  // sum over crossover events, relative to the no-cross product
  double no_cross = 1 - pc;
  for (std::size_t k = 0; k < d; ++k) no_cross *= mask[k] ? mut[k] : stay[k];
  sum = no_cross;

  if (pc > 0) {
    const double ce = config_.element_cross_prob;
    std::vector<SbxPair> scratch(d);
    for (auto j : pool) {
      const auto& xj = members_[j].theta.scalars;
      const SbxPair* pr = nullptr;
      if (member >= 0) {
        pr = &pairs_[(static_cast<std::size_t>(member) * n + j) * d];
      } else if (to) {
        for (std::size_t k = 0; k < d; ++k)
          if (mask[k]) scratch[k] = make_pair(from.scalars[k], xj[k], bounds_[k]);
        pr = scratch.data();
      }
      double term = pc * members_[j].weight / total;
      for (std::size_t k = 0; k < d && term > 0; ++k) {
        const bool differs = xj[k] != from.scalars[k];
        const double cross = differs ? ce : 0.0;
        if (!mask[k]) {
          term *= (1 - cross) * stay[k];
          continue;
        }
        double sbx = 0;
        if (differs) sbx = to ? sbx_pair_density(pr[k], to->scalars[k]) : 1.0;
        term *= cross * sbx + (1 - cross) * mut[k];
      }
      sum += term;
    }
  }
  return log_cov + safe_log(sum);
}

double GeneticKernel::log_joint(const sim::ThetaVector& from, const sim::ThetaVector& to) const {
  return log_joint_masked(from, &to, moved(from, to));
}

double GeneticKernel::log_move_probability(const sim::ThetaVector& from,
                                           const std::vector<bool>& mask) const {
  return log_joint_masked(from, nullptr, mask);
}

double GeneticKernel::log_mutation_joint(const sim::ThetaVector& from,
                                        const sim::ThetaVector& to) const {
  return log_joint_masked(from, &to, moved(from, to), -1, false);
}

double GeneticKernel::log_mutation_move_probability(const sim::ThetaVector& from,
                                                    const std::vector<bool>& mask) const {
  return log_joint_masked(from, nullptr, mask, -1, false);
}

double GeneticKernel::log_mixture(const sim::ThetaVector& to) const {
  const std::vector<bool> all(space_.size() + space_.covariance_count(), true);
  std::vector<double> terms;
  terms.reserve(members_.size());
  for (std::size_t j = 0; j < members_.size(); ++j)
    terms.push_back(std::log(members_[j].weight) +
                    log_joint_masked(members_[j].theta, &to, all, static_cast<long>(j)));
  return log_sum_exp(terms);
}

}  // namespace lobabc::genetic
