#include "lobabc/cli/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lobabc/util/parallel.hpp"

namespace lobabc::cli {

using nlohmann::json;

std::size_t RunConfig::resolved_workers() const { return workers ? workers : default_workers(); }

RunConfig default_config() {
  RunConfig c;
  c.smc.iterations = 20;
  c.smc.particles = 200;
  c.smc.quantile = 0.9;
  c.smc.alpha = 0.1;
  c.moea.population = 200;
  c.moea.generations = 20;
  return c;
}

namespace {

// Reads `key` into `out` when present, and records it as consumed.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw std::invalid_argument(where_ + ": expected an object");
  }
  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw std::invalid_argument(where_ + "." + key + ": " + e.what());
    }
  }
  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw std::invalid_argument(where_ + ": unknown key '" + k + "'");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

json sim_json(const sim::SimConfig& s) {
  return {{"interval_seconds", s.interval_seconds},
          {"intervals", s.intervals},
          {"snapshot_stride", s.snapshot_stride},
          {"max_one_sided", s.max_one_sided},
          {"initial",
           {{"best_bid", s.initial.best_bid},
            {"spread", s.initial.spread},
            {"levels", s.initial.levels},
            {"orders_per_level", s.initial.orders_per_level},
            {"order_size", s.initial.order_size}}}};
}

void read_sim(const json& j, sim::SimConfig& s) {
  Reader r(j, "sim");
  r.get("interval_seconds", s.interval_seconds);
  r.get("intervals", s.intervals);
  r.get("snapshot_stride", s.snapshot_stride);
  r.get("max_one_sided", s.max_one_sided);
  if (const json* init = r.child("initial")) {
    Reader ri(*init, "sim.initial");
    ri.get("best_bid", s.initial.best_bid);
    ri.get("spread", s.initial.spread);
    ri.get("levels", s.initial.levels);
    ri.get("orders_per_level", s.initial.orders_per_level);
    ri.get("order_size", s.initial.order_size);
    ri.finish();
  }
  r.finish();
}

json model_json(const sim::ReferenceModel& m) {
  return {{"tick_size", m.lob.tick_size},
          {"l_d", m.lob.l_d},
          {"l_p", m.lob.l_p},
          {"link", agents::to_string(m.link)},
          {"location", m.location},
          {"mo_location", m.mo_location},
          {"cancel_baseline", m.cancel_baseline},
          {"lo_size_mean", m.lo_size_mean},
          {"mo_size_mean", m.mo_size_mean},
          {"latent_correlation", m.latent_correlation},
          {"calibrate_covariance", m.calibrate_covariance},
          {"prior",
           {{"passive_rate", {m.passive_rate_lo, m.passive_rate_hi}},
            {"aggressive_rate", {m.aggressive_rate_lo, m.aggressive_rate_hi}},
            {"market_rate", {m.market_rate_lo, m.market_rate_hi}},
            {"skew", {m.skew_lo, m.skew_hi}},
            {"tail_dof", {m.dof_lo, m.dof_hi}},
            {"market_latent_scale", {m.market_scale_lo, m.market_scale_hi}}}}};
}

void read_box(Reader& r, const char* key, double& lo, double& hi) {
  std::vector<double> v{lo, hi};
  r.get(key, v);
  if (v.size() != 2) throw std::invalid_argument(std::string("model.prior.") + key + ": need [lo, hi]");
  lo = v[0];
  hi = v[1];
}

void read_model(const json& j, sim::ReferenceModel& m) {
  Reader r(j, "model");
  r.get("tick_size", m.lob.tick_size);
  r.get("l_d", m.lob.l_d);
  r.get("l_p", m.lob.l_p);
  std::string link = agents::to_string(m.link);
  r.get("link", link);
  m.link = agents::parse_link(link);
  r.get("location", m.location);
  r.get("mo_location", m.mo_location);
  r.get("cancel_baseline", m.cancel_baseline);
  r.get("lo_size_mean", m.lo_size_mean);
  r.get("mo_size_mean", m.mo_size_mean);
  r.get("latent_correlation", m.latent_correlation);
  r.get("calibrate_covariance", m.calibrate_covariance);
  if (const json* p = r.child("prior")) {
    Reader rp(*p, "model.prior");
    read_box(rp, "passive_rate", m.passive_rate_lo, m.passive_rate_hi);
    read_box(rp, "aggressive_rate", m.aggressive_rate_lo, m.aggressive_rate_hi);
    read_box(rp, "market_rate", m.market_rate_lo, m.market_rate_hi);
    read_box(rp, "skew", m.skew_lo, m.skew_hi);
    read_box(rp, "tail_dof", m.dof_lo, m.dof_hi);
    read_box(rp, "market_latent_scale", m.market_scale_lo, m.market_scale_hi);
    rp.finish();
  }
  r.finish();
}

json smc_json(const smc::SmcConfig& s) {
  return {{"particles", s.particles},
          {"iterations", s.iterations},
          {"replicates", s.replicates},
          {"quantile", s.quantile},
          {"alpha", s.alpha},
          {"eps_floor", s.eps_floor},
          {"ess_fraction", s.ess_fraction},
          {"resampling", smc::to_string(s.resampling)},
          {"kernel", s.kernel == smc::KernelType::Gaussian ? "gaussian" : "uniform"},
          {"fit_scales", s.fit_scales},
          {"stop_at_floor", s.stop_at_floor}};
}

void read_smc(const json& j, smc::SmcConfig& s) {
  Reader r(j, "smc");
  r.get("particles", s.particles);
  r.get("iterations", s.iterations);
  r.get("replicates", s.replicates);
  r.get("quantile", s.quantile);
  r.get("alpha", s.alpha);
  r.get("eps_floor", s.eps_floor);
  r.get("ess_fraction", s.ess_fraction);
  std::string resampling = smc::to_string(s.resampling);
  r.get("resampling", resampling);
  s.resampling = smc::parse_resample_scheme(resampling);
  std::string kernel = s.kernel == smc::KernelType::Gaussian ? "gaussian" : "uniform";
  r.get("kernel", kernel);
  if (kernel == "gaussian")
    s.kernel = smc::KernelType::Gaussian;
  else if (kernel == "uniform")
    s.kernel = smc::KernelType::Uniform;
  else
    throw std::invalid_argument("smc.kernel: expected gaussian or uniform");
  r.get("fit_scales", s.fit_scales);
  r.get("stop_at_floor", s.stop_at_floor);
  r.finish();
}

json moea_json(const moea::MoeaConfig& m) {
  return {{"population", m.population},
          {"generations", m.generations},
          {"history_decay", m.history_decay},
          {"moment_match", m.moment_match},
          {"fit_scales", m.fit_scales}};
}

void read_moea(const json& j, moea::MoeaConfig& m) {
  Reader r(j, "moea");
  r.get("population", m.population);
  r.get("generations", m.generations);
  r.get("history_decay", m.history_decay);
  r.get("moment_match", m.moment_match);
  r.get("fit_scales", m.fit_scales);
  r.finish();
}

json genetic_json(const GeneticSettings& g) {
  return {{"smc_crossover_prob", g.smc_crossover_prob},
          {"moea_crossover_prob", g.moea_crossover_prob},
          {"eta_c", g.eta_c},
          {"element_cross_prob", g.element_cross_prob},
          {"mutation_prob", g.mutation_prob},
          {"eta_m", g.eta_m},
          {"wide_weight", g.wide_weight},
          {"local_dof", g.local_dof},
          {"wide_dof", g.wide_dof}};
}

void read_genetic(const json& j, GeneticSettings& g) {
  Reader r(j, "genetic");
  r.get("smc_crossover_prob", g.smc_crossover_prob);
  r.get("moea_crossover_prob", g.moea_crossover_prob);
  r.get("eta_c", g.eta_c);
  r.get("element_cross_prob", g.element_cross_prob);
  r.get("mutation_prob", g.mutation_prob);
  r.get("eta_m", g.eta_m);
  r.get("wide_weight", g.wide_weight);
  r.get("local_dof", g.local_dof);
  r.get("wide_dof", g.wide_dof);
  r.finish();
}

}  // namespace

std::string to_json(const RunConfig& c, int indent) {
  json j;
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["workers"] = c.workers;
  j["observed"] = c.observed;
  j["output"] = c.output;
  j["replay_stride_seconds"] = c.replay_stride_seconds;
  j["return_delta_seconds"] = c.return_delta_seconds;
  j["sim"] = sim_json(c.sim);
  j["model"] = model_json(c.model);
  j["smc"] = smc_json(c.smc);
  j["moea"] = moea_json(c.moea);
  j["genetic"] = genetic_json(c.genetic);
  j["distance"] = {{"w1", c.distance.w1},
                   {"w2", c.distance.w2},
                   {"include_mean", c.distance.include_mean}};
  return j.dump(indent);
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  RunConfig c = default_config();
  Reader r(j, "config");
  if (const json* s = r.child("seed")) {
    if (s->is_null())
      c.seed.reset();
    else if (s->is_number_unsigned())
      c.seed = s->get<std::uint64_t>();
    else
      throw std::invalid_argument("config.seed: expected a non-negative integer");
  }
  r.get("workers", c.workers);
  r.get("observed", c.observed);
  r.get("output", c.output);
  r.get("replay_stride_seconds", c.replay_stride_seconds);
  r.get("return_delta_seconds", c.return_delta_seconds);
  if (const json* s = r.child("sim")) read_sim(*s, c.sim);
  if (const json* s = r.child("model")) read_model(*s, c.model);
  if (const json* s = r.child("smc")) read_smc(*s, c.smc);
  if (const json* s = r.child("moea")) read_moea(*s, c.moea);
  if (const json* s = r.child("genetic")) read_genetic(*s, c.genetic);
  if (const json* s = r.child("distance")) {
    Reader rd(*s, "distance");
    rd.get("w1", c.distance.w1);
    rd.get("w2", c.distance.w2);
    rd.get("include_mean", c.distance.include_mean);
    rd.finish();
  }
  r.finish();
  return c;
}

RunConfig load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot open config " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::uint64_t config_hash(const RunConfig& config) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : to_json(config, -1)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace lobabc::cli
