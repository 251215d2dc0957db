#pragma once

#include <vector>

#include "lobabc/genetic/covariance.hpp"
#include "lobabc/genetic/operators.hpp"
#include "lobabc/sim/theta.hpp"

namespace lobabc::genetic {

struct GeneticConfig {
  double crossover_prob = 0.05;  // p_c; the MOEA baseline uses 0.7
  double eta_c = 5;
  double element_cross_prob = 0.5;
  double mutation_prob = 0.2;  // p_m, also used for covariance blocks
  double eta_m = 10;
  // One static mixture per covariance block of the parameter space.
  std::vector<CovarianceMixture> covariance;

  void validate(const sim::ParameterSpace& space) const;
};

// Compound move for one particle. With probability p_c a partner is drawn
// from the population members whose value differs, with probability
// proportional to their weight; every scalar coordinate on which the two
// differ is crossed with probability element_cross_prob. Coordinates not
// crossed are mutated with probability p_m. Covariance blocks are redrawn
// from their static mixture with probability p_m.
//
// The realized move is a point mass on the untouched coordinates times a
// density on the moved ones, so densities are exposed per moved set: the
// joint J_A(from -> to) is P(moved set = A) times the density of the moved
// values, with partner choice and operator indicators summed out.
class GeneticKernel {
 public:
  GeneticKernel(sim::ParameterSpace space, GeneticConfig config,
                std::vector<sim::ThetaVector> population, std::vector<double> weights);

  sim::ThetaVector propose(const sim::ThetaVector& parent, Rng& rng) const;

  // Coordinates (scalars first, then covariance blocks) that differ.
  std::vector<bool> moved(const sim::ThetaVector& from, const sim::ThetaVector& to) const;

  // log J_A(from -> to) with A = moved(from, to).
  double log_joint(const sim::ThetaVector& from, const sim::ThetaVector& to) const;

  // log P(moved set = mask | from).
  double log_move_probability(const sim::ThetaVector& from, const std::vector<bool>& mask) const;

  // The same quantities for the kernel with crossover switched off (each
  // scalar mutated with probability p_m, blocks redrawn with p_m).
  double log_mutation_joint(const sim::ThetaVector& from, const sim::ThetaVector& to) const;
  double log_mutation_move_probability(const sim::ThetaVector& from,
                                       const std::vector<bool>& mask) const;

  // log sum_j W_j J_A(theta_j -> to) over the population, for the moved set A
  // = every coordinate. Only meaningful when `to` differs from every member
  // in every coordinate.
  double log_mixture(const sim::ThetaVector& to) const;

  const sim::ParameterSpace& space() const { return space_; }
  std::size_t distinct_count() const { return members_.size(); }

 private:
  // Population members with equal values are merged, summing their weights.
  struct Member {
    sim::ThetaVector theta;
    double weight = 0;
  };
  // SBX constants for an ordered pair of members on one coordinate.
  struct SbxPair {
    double sum = 0;      // xi + xj
    double inv_gap = 0;  // 1 / (xj - xi), 0 when equal
    double limit = 0;
    double coef = 0;     // (eta + 1) / alpha * 2 / |xj - xi|
  };

  std::vector<std::size_t> partners(const sim::ThetaVector& x, double& total) const;
  double sbx_pair_density(const SbxPair& p, double child) const;
  SbxPair make_pair(double xi, double xj, const Bounds& b) const;
  // With `to` null the moved values are integrated out, giving P(mask).
  // `member` (if >= 0) says `from` is that member, enabling cached pairs.
  double log_joint_masked(const sim::ThetaVector& from, const sim::ThetaVector* to,
                          const std::vector<bool>& mask, long member = -1,
                          bool crossover = true) const;

  sim::ParameterSpace space_;
  GeneticConfig config_;
  std::vector<Member> members_;
  std::vector<Bounds> bounds_;
  std::vector<SbxPair> pairs_;  // [(i * D + j) * d + k]
};

}  // namespace lobabc::genetic
