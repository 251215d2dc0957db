#pragma once

#include <string>

#include "lobabc/cli/config.hpp"
#include "lobabc/genetic/covariance.hpp"
#include "lobabc/ingest/events.hpp"
#include "lobabc/smc/abc_smc.hpp"

namespace lobabc::cli {

// IW mixture centred on the model's default latent scale; serves as the
// covariance prior and as the static covariance mutation law.
genetic::CovarianceMixture covariance_mixture(const RunConfig& config);

// Uniform box prior on the scalars times the covariance mixture; simulation
// failures (a book stuck one-sided) come back as non-converged summaries.
smc::AbcModel build_model(const RunConfig& config);

// Simulated summary for one theta, as the calibrators see it.
auxiliary::AuxSummary simulate_summary(const RunConfig& config, const sim::ThetaVector& theta,
                                       Rng& rng);

// Reads an event CSV (replayed to snapshots), a snapshot CSV or a snapshot
// JSON file, chosen by content.
sim::LobPath load_observed(const std::string& file, const RunConfig& config,
                           ingest::ReplayReport* report = nullptr);

// {"passive_rate": 4, ..., "limit_latent_cov": [[...], ...]}; omitted entries take
// the reference values.
sim::ThetaVector theta_from_json(const std::string& text, const sim::ReferenceModel& model);
std::string theta_to_json(const sim::ThetaVector& theta, const sim::ParameterSpace& space);

}  // namespace lobabc::cli
