#include "lobabc/sim/model.hpp"

namespace lobabc::sim {

ParameterSpace ReferenceModel::space() const {
  ParameterSpace s;
  s.add("passive_rate", passive_rate_lo, passive_rate_hi);
  s.add("aggressive_rate", aggressive_rate_lo, aggressive_rate_hi);
  s.add("market_rate", market_rate_lo, market_rate_hi);
  s.add("skew", skew_lo, skew_hi);
  s.add("tail_dof", dof_lo, dof_hi);
  s.add("market_latent_scale", market_scale_lo, market_scale_hi);
  if (calibrate_covariance) s.add_covariance("limit_latent_cov", lob.l_t());
  return s;
}

Eigen::MatrixXd ReferenceModel::default_scale() const {
  const int d = lob.l_t();
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(d, d, latent_correlation);
  m.diagonal().setOnes();
  return m;
}

ThetaVector ReferenceModel::reference_theta() const {
  ThetaVector t;
  t.scalars = {4.0, 1.0, 2.0, 0.2, 6.0, 1.0};
  if (calibrate_covariance) t.covariances.push_back(default_scale());
  return t;
}

AgentParams ReferenceModel::agent_params(const ThetaVector& theta) const {
  space().validate(theta);
  lob.validate();
  const int d = lob.l_t();
  const auto& x = theta.scalars;
  const Eigen::MatrixXd scale = calibrate_covariance ? theta.covariances[0] : default_scale();

  Eigen::VectorXd lo_base(d);
  for (int i = 0; i < d; ++i)
    lo_base[i] = lob.level_at(i) <= 0 ? x[AggressiveRate] : x[PassiveRate];
  const Eigen::VectorXd cancel_base = Eigen::VectorXd::Constant(d, cancel_baseline);

  dist::SkewTParams latent;
  latent.location = Eigen::VectorXd::Constant(d, location);
  latent.skewness = Eigen::VectorXd::Constant(d, x[Skew]);
  latent.dof = x[Dof];
  latent.scale = scale;
  const dist::SkewT lo_latent(latent);
  const dist::SkewT mo_latent(
      dist::SkewTParams::univariate(mo_location, x[Skew], x[Dof], x[MarketScale]));
  const Eigen::VectorXd mo_base = Eigen::VectorXd::Constant(1, x[MarketRate]);

  return AgentParams{
      lob,
      {lo_base, lo_latent, link},
      {lo_base, lo_latent, link},
      {cancel_base, lo_latent, link},
      {cancel_base, lo_latent, link},
      {mo_base, mo_latent, link},
      {mo_base, mo_latent, link},
      {lo_size_mean},
      {mo_size_mean},
  };
}

}  // namespace lobabc::sim
