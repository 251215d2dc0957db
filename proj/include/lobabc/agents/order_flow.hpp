#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "lobabc/dist/skew_t.hpp"
#include "lobabc/util/rng.hpp"

namespace lobabc::agents {

using Count = std::int64_t;

enum class Link { Logistic, NormalCdf };

Link parse_link(const std::string& name);
const char* to_string(Link link);
double apply_link(Link link, double x);

// Latent intensity of a (possibly multivariate) Cox process: each component is
// baseline * F(Gamma) with Gamma skew-t distributed.
struct IntensityModel {
  Eigen::VectorXd baseline;
  dist::SkewT latent;
  Link link = Link::Logistic;

  IntensityModel(Eigen::VectorXd baseline, dist::SkewT latent, Link link = Link::Logistic);
};

// Shifted geometric on {1, 2, ...} with the given mean (>= 1).
struct OrderSizeDist {
  double mean = 3;
  void validate() const;
};

Eigen::VectorXd draw_intensities(const IntensityModel& model, Rng& rng);

// Independent Poisson(lambda_s) per component.
std::vector<Count> sample_lo_counts(const Eigen::VectorXd& lambda, Rng& rng);

// Poisson(lambda) conditioned on n <= cap.
Count sample_truncated_poisson(double lambda, Count cap, Rng& rng);
std::vector<Count> sample_truncated_counts(const Eigen::VectorXd& lambda,
                                           const std::vector<Count>& caps, Rng& rng);

std::vector<std::int64_t> sample_order_sizes(const OrderSizeDist& dist, Count n, Rng& rng);

}  // namespace lobabc::agents
