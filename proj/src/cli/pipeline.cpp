#include "lobabc/cli/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "lobabc/sim/simulator.hpp"

namespace lobabc::cli {

using nlohmann::json;

genetic::CovarianceMixture covariance_mixture(const RunConfig& config) {
  const auto& g = config.genetic;
  return genetic::CovarianceMixture::centred(config.model.default_scale(), g.wide_weight,
                                             g.local_dof, g.wide_dof);
}

auxiliary::AuxSummary simulate_summary(const RunConfig& config, const sim::ThetaVector& theta,
                                       Rng& rng) {
  try {
    const auto params = config.model.agent_params(theta);
    const auto path = sim::simulate_day(params, config.sim, rng);
    return auxiliary::summarize(path, config.return_delta_seconds);
  } catch (const sim::SimulationAborted&) {
    return auxiliary::AuxSummary{};
  }
}

smc::AbcModel build_model(const RunConfig& config) {
  smc::AbcModel m;
  m.space = config.model.space();
  const auto mixture = covariance_mixture(config);
  const auto space = m.space;

  m.log_prior = [space, mixture](const sim::ThetaVector& t) {
    if (!space.contains(t)) return -std::numeric_limits<double>::infinity();
    double lp = 0;
    for (std::size_t k = 0; k < space.size(); ++k) lp -= std::log(space.upper[k] - space.lower[k]);
    for (const auto& c : t.covariances) lp += mixture.log_density(c);
    return lp;
  };
  m.sample_prior = [space, mixture](Rng& rng) {
    sim::ThetaVector t;
    for (std::size_t k = 0; k < space.size(); ++k)
      t.scalars.push_back(space.lower[k] + (space.upper[k] - space.lower[k]) * uniform01(rng));
    for (std::size_t c = 0; c < space.covariance_count(); ++c) t.covariances.push_back(mixture.sample(rng));
    return t;
  };
  m.simulate = [config](const sim::ThetaVector& t, Rng& rng) {
    return simulate_summary(config, t, rng);
  };

  const auto& g = config.genetic;
  m.kernel.crossover_prob = g.smc_crossover_prob;
  m.kernel.eta_c = g.eta_c;
  m.kernel.element_cross_prob = g.element_cross_prob;
  m.kernel.mutation_prob = g.mutation_prob;
  m.kernel.eta_m = g.eta_m;
  m.kernel.covariance.assign(space.covariance_count(), mixture);
  m.kernel.validate(space);
  return m;
}

sim::LobPath load_observed(const std::string& file, const RunConfig& config,
                           ingest::ReplayReport* report) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot open observed data " + file);
  std::string first;
  std::getline(in, first);
  in.seekg(0);
  const double tick = config.model.lob.tick_size;
  if (first.rfind("ts_ms", 0) == 0) {
    const auto parsed = ingest::parse_events(in);
    if (!parsed.errors.empty() && report)
      for (const auto& e : parsed.errors) report->skipped.push_back(e);
    ingest::ReplayOptions opt;
    opt.stride_seconds = config.replay_stride_seconds;
    opt.tick_size = tick;
    ingest::ReplayReport local;
    auto path = ingest::replay_to_snapshots(parsed.events, opt, &local);
    if (report) {
      auto errors = std::move(report->skipped);
      *report = local;
      errors.insert(errors.end(), local.skipped.begin(), local.skipped.end());
      report->skipped = std::move(errors);
    }
    return path;
  }
  if (first.rfind("timestamp,mid,spread", 0) == 0) return sim::read_csv(in, tick);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return sim::from_json(ss.str());
  } catch (const std::exception& e) {
    throw std::invalid_argument("observed data " + file + " is neither events, CSV nor JSON: " +
                                e.what());
  }
}

sim::ThetaVector theta_from_json(const std::string& text, const sim::ReferenceModel& model) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("theta: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("theta: expected an object");
  const auto space = model.space();
  sim::ThetaVector t = model.reference_theta();
  for (const auto& [key, value] : j.items()) {
    bool found = false;
    for (std::size_t k = 0; k < space.size() && !found; ++k)
      if (space.names[k] == key) {
        t.scalars[k] = value.get<double>();
        found = true;
      }
    for (std::size_t c = 0; c < space.covariance_count() && !found; ++c)
      if (space.covariance_names[c] == key) {
        const auto rows = value.get<std::vector<std::vector<double>>>();
        const int d = space.covariance_dims[c];
        if (static_cast<int>(rows.size()) != d)
          throw std::invalid_argument("theta." + key + ": expected " + std::to_string(d) + " rows");
        Eigen::MatrixXd m(d, d);
        for (int r = 0; r < d; ++r) {
          if (static_cast<int>(rows[r].size()) != d)
            throw std::invalid_argument("theta." + key + ": ragged matrix");
          for (int s = 0; s < d; ++s) m(r, s) = rows[r][s];
        }
        t.covariances[c] = m;
        found = true;
      }
    if (!found) throw std::invalid_argument("theta: unknown parameter '" + key + "'");
  }
  space.validate(t);
  return t;
}

std::string theta_to_json(const sim::ThetaVector& theta, const sim::ParameterSpace& space) {
  json j = json::object();
  for (std::size_t k = 0; k < space.size(); ++k) j[space.names[k]] = theta.scalars[k];
  for (std::size_t c = 0; c < space.covariance_count(); ++c) {
    json rows = json::array();
    const auto& m = theta.covariances[c];
    for (int r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (int s = 0; s < m.cols(); ++s) row.push_back(m(r, s));
      rows.push_back(row);
    }
    j[space.covariance_names[c]] = rows;
  }
  return j.dump(2);
}

}  // namespace lobabc::cli
