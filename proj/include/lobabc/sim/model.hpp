#pragma once

#include <Eigen/Dense>
#include <optional>

#include "lobabc/agents/order_flow.hpp"
#include "lobabc/lob/order_book.hpp"
#include "lobabc/sim/theta.hpp"

namespace lobabc::sim {

// Fully specified agent laws for one simulation. Vector models span the l_t
// active levels in LobConfig::index_of order; market-order models are 1-d.
struct AgentParams {
  lob::LobConfig lob;
  agents::IntensityModel lo_bid, lo_ask;
  agents::IntensityModel cancel_bid, cancel_ask;
  agents::IntensityModel mo_buy, mo_sell;
  agents::OrderSizeDist lo_size, mo_size;
};

// The six-parameter reference model: common passive and aggressive LO
// baselines, an MO baseline, a skewness scalar shared by every skew-t law, a
// shared dof and the MO latent scale. Optionally the LO/cancel latent
// covariance is calibrated as well. Everything else is fixed here.
struct ReferenceModel {
  lob::LobConfig lob;
  agents::Link link = agents::Link::Logistic;
  double location = 0;
  double mo_location = 0;
  double cancel_baseline = 6;
  double lo_size_mean = 3;
  double mo_size_mean = 3;
  double latent_correlation = 0.3;  // off-diagonal of the fixed/true scale
  bool calibrate_covariance = true;

  // Bounds of the uniform prior box.
  double passive_rate_lo = 1, passive_rate_hi = 8;
  double aggressive_rate_lo = 0.2, aggressive_rate_hi = 2.2;
  double market_rate_lo = 0.5, market_rate_hi = 4;
  double skew_lo = -1, skew_hi = 1;
  double dof_lo = 3, dof_hi = 10;
  double market_scale_lo = 0.25, market_scale_hi = 2;

  enum Index : std::size_t { PassiveRate, AggressiveRate, MarketRate, Skew, Dof, MarketScale };

  ParameterSpace space() const;
  Eigen::MatrixXd default_scale() const;
  // Ground truth used for synthetic data.
  ThetaVector reference_theta() const;
  AgentParams agent_params(const ThetaVector& theta) const;
};

}  // namespace lobabc::sim
