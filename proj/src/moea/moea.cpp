#include "lobabc/moea/moea.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lobabc/genetic/operators.hpp"
#include "lobabc/util/parallel.hpp"

namespace lobabc::moea {

bool dominates(const Objectives& a, const Objectives& b) {
  return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

std::vector<int> nondominated_sort(const std::vector<Objectives>& points) {
  const std::size_t n = points.size();
  for (const auto& p : points)
    if (std::isnan(p[0]) || std::isnan(p[1]))
      throw std::invalid_argument("nondominated_sort: NaN objective");

  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> count(n, 0);
  std::vector<int> rank(n, 0);
  std::vector<std::size_t> front;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (dominates(points[i], points[j]))
        dominated[i].push_back(j);
      else if (dominates(points[j], points[i]))
        ++count[i];
    }
    if (count[i] == 0) {
      rank[i] = 1;
      front.push_back(i);
    }
  }
  for (int r = 1; !front.empty(); ++r) {
    std::vector<std::size_t> next;
    for (auto i : front)
      for (auto j : dominated[i])
        if (--count[j] == 0) {
          rank[j] = r + 1;
          next.push_back(j);
        }
    front.swap(next);
  }
  return rank;
}

void MoeaConfig::validate() const {
  if (population < 2) throw std::invalid_argument("moea: population must be at least 2");
  if (workers == 0) throw std::invalid_argument("moea: workers must be positive");
  if (!(crossover_prob >= 0 && crossover_prob <= 1))
    throw std::invalid_argument("moea: crossover probability must lie in [0, 1]");
  if (!(history_decay > 0 && history_decay <= 1))
    throw std::invalid_argument("moea: history decay must lie in (0, 1]");
}

namespace {

void assign_ranks(std::vector<RankedSolution>& pop) {
  std::vector<Objectives> pts;
  pts.reserve(pop.size());
  for (const auto& s : pop) pts.push_back(s.objectives);
  const auto ranks = nondominated_sort(pts);
  for (std::size_t i = 0; i < pop.size(); ++i) pop[i].rank = ranks[i];
  for (std::size_t i = 0; i < pop.size(); ++i)
    for (std::size_t j = 0; j < pop.size(); ++j)
      if (ranks[i] == 1 && ranks[j] == 1 && dominates(pts[i], pts[j]))
        throw std::logic_error("moea: rank-1 solutions dominate each other");
}

void evaluate(RankedSolution& s, const auxiliary::AuxSummary& observed,
              const auxiliary::DistanceConfig& cfg) {
  const auto d = auxiliary::distance(observed, s.summary, cfg);
  s.objectives = {d.d1, d.d2};
}

std::vector<RankedSolution> front_of(const std::vector<RankedSolution>& pop) {
  std::vector<RankedSolution> out;
  for (const auto& s : pop)
    if (s.rank == 1) out.push_back(s);
  return out;
}

std::size_t tournament(const std::vector<RankedSolution>& pop, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
  const auto a = pick(rng), b = pick(rng);
  if (pop[a].rank != pop[b].rank) return pop[a].rank < pop[b].rank ? a : b;
  return uniform01(rng) < 0.5 ? a : b;
}

}  // namespace

MoeaResult run_moea(const smc::AbcModel& model, const auxiliary::AuxSummary& observed,
                    const MoeaConfig& config, const auxiliary::DistanceConfig& distance,
                    const GenerationCallback& on_generation) {
  config.validate();
  const auto& space = model.space;
  auto genetic = model.kernel;
  genetic.crossover_prob = config.crossover_prob;
  genetic.validate(space);

  std::vector<genetic::Bounds> bounds;
  for (std::size_t k = 0; k < space.size(); ++k) bounds.push_back({space.lower[k], space.upper[k]});

  MoeaResult result;
  result.distance = distance;
  const std::size_t n = config.population;

  std::vector<RankedSolution> pop(n);
  parallel_for(n, config.workers, [&](std::size_t i) {
    Rng rng = make_stream(config.seed, {0, i});
    pop[i].theta = model.sample_prior(rng);
    pop[i].summary = model.simulate(pop[i].theta, rng);
  });
  if (config.fit_scales) {
    std::vector<auxiliary::AuxSummary> all;
    for (const auto& s : pop) all.push_back(s.summary);
    auxiliary::fit_scales(result.distance, all);
  }
  for (auto& s : pop) evaluate(s, observed, result.distance);
  assign_ranks(pop);
  result.fronts.push_back(front_of(pop));
  if (on_generation) on_generation(0, pop);

  std::vector<genetic::ScaleHistory> history(space.covariance_count(),
                                             genetic::ScaleHistory(config.history_decay));
  auto record_history = [&](const std::vector<RankedSolution>& p) {
    std::vector<int> ranks;
    for (const auto& s : p) ranks.push_back(s.rank);
    for (std::size_t c = 0; c < history.size(); ++c) {
      std::vector<Eigen::MatrixXd> mats;
      for (const auto& s : p) mats.push_back(s.theta.covariances[c]);
      history[c].add_generation(mats, ranks);
    }
  };
  record_history(pop);

  for (std::size_t g = 1; g <= config.generations; ++g) {
    std::vector<RankedSolution> kids(n);
    parallel_for(n, config.workers, [&](std::size_t i) {
      Rng rng = make_stream(config.seed, {g, i});
      const auto& a = pop[tournament(pop, rng)].theta;
      const auto& b = pop[tournament(pop, rng)].theta;
      sim::ThetaVector child = a;
      // Crossing with an identical particle is excluded.
      const bool cross = a.scalars != b.scalars && uniform01(rng) < genetic.crossover_prob;
      for (std::size_t k = 0; k < space.size(); ++k) {
        if (cross && a.scalars[k] != b.scalars[k] && uniform01(rng) < genetic.element_cross_prob) {
          child.scalars[k] = genetic::sbx_cross(a.scalars[k], b.scalars[k], bounds[k],
                                                genetic.eta_c, rng);
          continue;
        }
        if (uniform01(rng) < genetic.mutation_prob)
          child.scalars[k] = genetic::poly_mutate(a.scalars[k], bounds[k], genetic.eta_m, rng);
      }
      for (std::size_t c = 0; c < space.covariance_count(); ++c)
        if (uniform01(rng) < genetic.mutation_prob)
          child.covariances[c] =
              genetic::mutate_covariance(genetic.covariance[c], genetic::CovarianceMode::Adaptive,
                                         &history[c], config.moment_match, rng);
      kids[i].theta = std::move(child);
      kids[i].generation = g;
      kids[i].summary = model.simulate(kids[i].theta, rng);
    });
    for (auto& s : kids) evaluate(s, observed, result.distance);

    std::vector<RankedSolution> merged = pop;
    merged.insert(merged.end(), std::make_move_iterator(kids.begin()),
                  std::make_move_iterator(kids.end()));
    assign_ranks(merged);
    // Parents precede children, so a stable sort keeps incumbents on ties.
    std::vector<std::size_t> order(merged.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto x, auto y) { return merged[x].rank < merged[y].rank; });
    std::vector<RankedSolution> next;
    for (std::size_t i = 0; i < n; ++i) next.push_back(std::move(merged[order[i]]));
    assign_ranks(next);
    pop = std::move(next);
    record_history(pop);
    result.fronts.push_back(front_of(pop));
    if (on_generation) on_generation(g, pop);
  }

  std::stable_sort(pop.begin(), pop.end(), [](const auto& x, const auto& y) { return x.rank < y.rank; });
  result.population = std::move(pop);
  return result;
}

}  // namespace lobabc::moea
