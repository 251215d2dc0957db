#include "lobabc/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "lobabc/cli/pipeline.hpp"
#include "lobabc/ingest/events.hpp"
#include "lobabc/moea/moea.hpp"
#include "lobabc/sim/simulator.hpp"
#include "lobabc/smc/abc_smc.hpp"

namespace lobabc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw InputError("cannot write " + p.string());
  out << std::setprecision(17);
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
}

std::string hex(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << v;
  return ss.str();
}

// Column names for a theta: scalars, then the upper triangle of each block.
std::vector<std::string> theta_columns(const sim::ParameterSpace& space) {
  std::vector<std::string> cols = space.names;
  for (std::size_t c = 0; c < space.covariance_count(); ++c)
    for (int r = 0; r < space.covariance_dims[c]; ++r)
      for (int s = r; s < space.covariance_dims[c]; ++s)
        cols.push_back(space.covariance_names[c] + "_" + std::to_string(r) + "_" + std::to_string(s));
  return cols;
}

void write_theta(std::ostream& out, const sim::ThetaVector& t) {
  for (double x : t.scalars) out << ',' << x;
  for (const auto& m : t.covariances)
    for (int r = 0; r < m.rows(); ++r)
      for (int s = r; s < m.cols(); ++s) out << ',' << m(r, s);
}

const char* kSummaryColumns = "beta1_0,beta1_1,beta1_2,beta2_0,beta2_1,beta2_2";

void write_summary_cells(std::ostream& out, const auxiliary::AuxSummary& s) {
  for (std::size_t k = 0; k < 3; ++k) out << ',' << (k < s.beta1.size() ? s.beta1[k] : std::nan(""));
  for (std::size_t k = 0; k < 3; ++k) out << ',' << (k < s.beta2.size() ? s.beta2[k] : std::nan(""));
}

json distance_json(const auxiliary::DistanceConfig& d) {
  return {{"scale1", d.scale1}, {"scale2", d.scale2}, {"w1", d.w1}, {"w2", d.w2},
          {"include_mean", d.include_mean}};
}

json manifest(const RunConfig& config, const std::string& command) {
  json m;
  m["program"] = "lobabc";
  m["version"] = kVersion;
  m["command"] = command;
  m["seed"] = config.seed ? json(*config.seed) : json(nullptr);
  m["workers"] = config.resolved_workers();
  m["config_hash"] = hex(config_hash(config));
  m["config"] = json::parse(to_json(config));
  return m;
}

void write_manifest(const std::string& dir, const json& m) {
  auto out = open_out(fs::path(dir) / "manifest.json");
  out << m.dump(2) << '\n';
}

struct Observed {
  sim::LobPath path;
  auxiliary::AuxSummary summary;
  ingest::ReplayReport report;
};

Observed observe(const RunConfig& config, std::ostream& log) {
  if (config.observed.empty()) throw InputError("no observed data file (set 'observed' or --observed)");
  if (!fs::exists(config.observed)) throw InputError("observed data not found: " + config.observed);
  Observed o;
  try {
    o.path = load_observed(config.observed, config, &o.report);
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
  if (!o.report.skipped.empty())
    log << "observed: skipped " << o.report.skipped.size() << " rows/events (first: line "
        << o.report.skipped.front().line << ": " << o.report.skipped.front().message << ")\n";
  o.summary = ingest::summarize_observed(o.path, config.return_delta_seconds);
  if (!o.summary.converged) throw InputError("auxiliary fit failed on the observed data");
  return o;
}

json observed_json(const RunConfig& config, const Observed& o) {
  return {{"file", config.observed},
          {"snapshots", o.path.snapshots.size()},
          {"summary", json::parse(auxiliary::to_json(o.summary))}};
}

void write_marginal_cdf(const std::string& dir, const sim::ParameterSpace& space,
                        const std::vector<sim::ThetaVector>& thetas,
                        const std::vector<double>& weights) {
  auto out = open_out(fs::path(dir) / "marginal_cdf.csv");
  out << "parameter,value,cdf\n";
  for (std::size_t k = 0; k < space.size(); ++k) {
    std::vector<std::size_t> idx(thetas.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](auto a, auto b) { return thetas[a].scalars[k] < thetas[b].scalars[k]; });
    double total = 0;
    for (double w : weights) total += w;
    double c = 0;
    for (auto i : idx) {
      c += weights[i];
      out << space.names[k] << ',' << thetas[i].scalars[k] << ',' << std::min(1.0, c / total) << '\n';
    }
  }
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void print_theta(std::ostream& log, const char* label, const sim::ThetaVector& t,
                 const sim::ParameterSpace& space) {
  log << label << ':';
  for (std::size_t k = 0; k < space.size(); ++k) log << ' ' << space.names[k] << '=' << t.scalars[k];
  log << '\n';
}

}  // namespace

// ---------------------------------------------------------------- tables

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw InputError("missing column '" + name + "'");
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  const auto c = column(name);
  try {
    return std::stod(rows.at(row).at(c));
  } catch (const std::exception&) {
    throw InputError("column '" + name + "' row " + std::to_string(row + 1) + " is not a number");
  }
}

CsvTable read_table(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open " + file);
  CsvTable t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    return cells;
  };
  if (!std::getline(in, line)) throw InputError(file + " is empty");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw InputError(file + ": row width differs from header");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

MethodStats method_stats(const std::vector<double>& d1, const std::vector<double>& d2) {
  MethodStats s;
  s.count = d1.size();
  if (d1.empty()) return s;
  s.min_d1 = *std::min_element(d1.begin(), d1.end());
  s.min_d2 = *std::min_element(d2.begin(), d2.end());
  s.median_d1 = median_of(d1);
  s.median_d2 = median_of(d2);
  return s;
}

// ---------------------------------------------------------------- commands

int cmd_init(const std::string& file, bool force, std::ostream& log) {
  if (fs::exists(file) && !force) throw InputError(file + " exists (use --force to overwrite)");
  auto out = open_out(file);
  out << to_json(default_config()) << '\n';
  log << "wrote default configuration to " << file << '\n';
  return kOk;
}

int cmd_simulate(const RunConfig& config, const SimulateOptions& options, std::ostream& log) {
  const auto space = config.model.space();
  sim::ThetaVector theta = config.model.reference_theta();
  if (!options.theta_file.empty()) {
    std::ifstream in(options.theta_file);
    if (!in) throw InputError("theta file not found: " + options.theta_file);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      theta = theta_from_json(ss.str(), config.model);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  for (const auto& [name, value] : options.overrides) {
    std::size_t k = 0;
    try {
      k = space.index_of(name);
    } catch (const std::exception&) {
      throw InputError("unknown parameter '" + name + "'");
    }
    theta.scalars[k] = value;
  }
  try {
    space.validate(theta);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }

  ensure_dir(config.output);
  Rng rng = make_stream(config.seed.value_or(1));
  std::vector<lob::BookEvent> events;
  sim::LobPath path;
  try {
    path = sim::simulate_day(config.model.agent_params(theta), config.sim, rng,
                             options.write_events ? &events : nullptr);
  } catch (const sim::SimulationAborted& e) {
    throw InputError(std::string("simulation aborted: ") + e.what());
  }
  sim::save_csv(path, (fs::path(config.output) / "path.csv").string());
  {
    auto out = open_out(fs::path(config.output) / "path.json");
    out << sim::to_json(path) << '\n';
  }
  if (options.write_events)
    ingest::save_events(events, (fs::path(config.output) / "events.csv").string());
  {
    auto out = open_out(fs::path(config.output) / "theta.json");
    out << theta_to_json(theta, space) << '\n';
  }
  auto m = manifest(config, "simulate");
  m["theta"] = json::parse(theta_to_json(theta, space));
  m["snapshots"] = path.snapshots.size();
  write_manifest(config.output, m);
  log << "snapshots: " << path.snapshots.size() << '\n'
      << "mean spread: " << path.mean_spread() << '\n'
      << "traded volume: " << path.traded_volume() << '\n';
  return kOk;
}

int cmd_summarize(const RunConfig& config, const std::string& input, std::ostream& log) {
  RunConfig c = config;
  c.observed = input;
  const auto o = observe(c, log);
  ensure_dir(config.output);
  auto out = open_out(fs::path(config.output) / "summary.json");
  const std::string text = auxiliary::to_json(o.summary);
  out << text << '\n';
  log << text << '\n';
  return kOk;
}

int cmd_calibrate_smc(const RunConfig& config, std::ostream& log) {
  if (!config.seed) throw InputError("calibration needs an explicit seed");
  const auto observed = observe(config, log);
  ensure_dir(config.output);
  const auto model = build_model(config);
  const auto& space = model.space;

  smc::SmcConfig sc = config.smc;
  sc.seed = *config.seed;
  sc.workers = config.resolved_workers();
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }

  auto trace_out = open_out(fs::path(config.output) / "trace.jsonl");
  auto on_iter = [&](const smc::IterationTrace& t, const std::vector<smc::Particle>&) {
    json j{{"iteration", t.iteration},     {"eps", t.eps},
           {"ess_before", t.ess_before},   {"resampled", t.resampled},
           {"ess", t.ess},                 {"log_evidence", t.log_evidence},
           {"moved", t.moved},             {"simulated", t.simulated},
           {"min_distance", t.min_distance}, {"median_distance", t.median_distance},
           {"weight_histogram", t.weight_histogram}};
    trace_out << j.dump() << '\n';
    trace_out.flush();
    log << "iteration " << t.iteration << ": eps=" << t.eps << " ess=" << t.ess
        << " median distance=" << t.median_distance << '\n';
  };
  const auto result = smc::run_smc(model, observed.summary, sc, config.distance, on_iter);
  if (result.collapsed) {
    // The collapse iteration never reaches the callback.
    const auto& t = result.trace.back();
    trace_out << json{{"iteration", t.iteration}, {"eps", t.eps}, {"ess", 0},
                      {"collapsed", true}, {"diagnostic", result.diagnostic}}
                     .dump()
              << '\n';
  }

  {
    auto out = open_out(fs::path(config.output) / "particles.csv");
    out << "index,weight,ancestor";
    for (const auto& c : theta_columns(space)) out << ',' << c;
    out << ",d1,d2,distance,converged," << kSummaryColumns << '\n';
    for (std::size_t i = 0; i < result.particles.size(); ++i) {
      const auto& p = result.particles[i];
      double d1 = 0, d2 = 0;
      bool conv = true;
      for (const auto& r : p.replicates) {
        d1 += r.distance.d1;
        d2 += r.distance.d2;
        conv = conv && r.summary.converged;
      }
      const auto s = static_cast<double>(std::max<std::size_t>(1, p.replicates.size()));
      out << i << ',' << p.weight << ',' << p.ancestor;
      write_theta(out, p.theta);
      out << ',' << d1 / s << ',' << d2 / s << ',' << smc::mean_distance(p) << ',' << conv;
      write_summary_cells(out, p.replicates.empty() ? auxiliary::AuxSummary{} : p.replicates[0].summary);
      out << '\n';
    }
  }
  {
    std::vector<sim::ThetaVector> thetas;
    for (const auto& p : result.particles) thetas.push_back(p.theta);
    write_marginal_cdf(config.output, space, thetas, result.weights());
  }
  {
    auto out = open_out(fs::path(config.output) / "objective_scatter.csv");
    out << "index,weight,d1,d2\n";
    for (std::size_t i = 0; i < result.particles.size(); ++i)
      for (const auto& r : result.particles[i].replicates)
        out << i << ',' << result.particles[i].weight << ',' << r.distance.d1 << ',' << r.distance.d2 << '\n';
  }

  auto m = manifest(config, "calibrate-smc");
  m["observed"] = observed_json(config, observed);
  m["distance"] = distance_json(result.distance);
  m["iterations_run"] = result.trace.size();
  m["status"] = result.collapsed ? "collapsed" : "ok";
  if (result.collapsed) m["diagnostic"] = result.diagnostic;
  if (!result.collapsed) {
    m["mmse"] = json::parse(theta_to_json(result.mmse(), space));
    m["map"] = json::parse(theta_to_json(result.map(), space));
  }
  write_manifest(config.output, m);

  if (result.collapsed) {
    log << "weight collapse: " << result.diagnostic << '\n';
    return kCollapsed;
  }
  print_theta(log, "posterior mean", result.mmse(), space);
  return kOk;
}

int cmd_calibrate_moea(const RunConfig& config, std::ostream& log) {
  if (!config.seed) throw InputError("calibration needs an explicit seed");
  const auto observed = observe(config, log);
  ensure_dir(config.output);
  const auto model = build_model(config);
  const auto& space = model.space;

  moea::MoeaConfig mc = config.moea;
  mc.seed = *config.seed;
  mc.workers = config.resolved_workers();
  mc.crossover_prob = config.genetic.moea_crossover_prob;
  try {
    mc.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }

  const auto cols = theta_columns(space);
  auto fronts = open_out(fs::path(config.output) / "fronts.csv");
  fronts << "generation,rank,created";
  for (const auto& c : cols) fronts << ',' << c;
  fronts << ",d1,d2\n";
  auto on_gen = [&](std::size_t g, const std::vector<moea::RankedSolution>& pop) {
    std::size_t front = 0;
    for (const auto& s : pop) {
      if (s.rank != 1) continue;
      ++front;
      fronts << g << ',' << s.rank << ',' << s.generation;
      write_theta(fronts, s.theta);
      fronts << ',' << s.objectives[0] << ',' << s.objectives[1] << '\n';
    }
    log << "generation " << g << ": front size " << front << '\n';
  };
  const auto result = moea::run_moea(model, observed.summary, mc, config.distance, on_gen);

  {
    auto out = open_out(fs::path(config.output) / "population.csv");
    out << "index,rank,created";
    for (const auto& c : cols) out << ',' << c;
    out << ",d1,d2," << kSummaryColumns << '\n';
    for (std::size_t i = 0; i < result.population.size(); ++i) {
      const auto& s = result.population[i];
      out << i << ',' << s.rank << ',' << s.generation;
      write_theta(out, s.theta);
      out << ',' << s.objectives[0] << ',' << s.objectives[1];
      write_summary_cells(out, s.summary);
      out << '\n';
    }
  }
  {
    auto out = open_out(fs::path(config.output) / "objective_scatter.csv");
    out << "index,rank,d1,d2\n";
    for (std::size_t i = 0; i < result.population.size(); ++i) {
      const auto& s = result.population[i];
      out << i << ',' << s.rank << ',' << s.objectives[0] << ',' << s.objectives[1] << '\n';
    }
  }
  {
    std::vector<sim::ThetaVector> front;
    for (const auto& s : result.population)
      if (s.rank == 1) front.push_back(s.theta);
    write_marginal_cdf(config.output, space, front, std::vector<double>(front.size(), 1.0));
  }
  auto m = manifest(config, "calibrate-moea");
  m["observed"] = observed_json(config, observed);
  m["distance"] = distance_json(result.distance);
  m["status"] = "ok";
  write_manifest(config.output, m);
  return kOk;
}

int cmd_compare(const std::string& smc_dir, const std::string& moea_dir,
                const std::string& output, std::ostream& log) {
  const auto smc_table = read_table((fs::path(smc_dir) / "particles.csv").string());
  const auto moea_table = read_table((fs::path(moea_dir) / "population.csv").string());
  for (const char* c : {"weight", "d1", "d2"}) smc_table.column(c);
  for (const char* c : {"rank", "d1", "d2"}) moea_table.column(c);

  // SMC: top decile by weight, ties kept in file order.
  std::vector<std::size_t> order(smc_table.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return smc_table.number(a, "weight") > smc_table.number(b, "weight");
  });
  const std::size_t top = std::max<std::size_t>(1, (order.size() + 9) / 10);
  std::vector<double> s1, s2, m1, m2;
  for (std::size_t k = 0; k < std::min(top, order.size()); ++k) {
    s1.push_back(smc_table.number(order[k], "d1"));
    s2.push_back(smc_table.number(order[k], "d2"));
  }
  for (std::size_t i = 0; i < moea_table.rows.size(); ++i)
    if (moea_table.number(i, "rank") == 1) {
      m1.push_back(moea_table.number(i, "d1"));
      m2.push_back(moea_table.number(i, "d2"));
    }
  if (m1.empty()) throw std::logic_error("MOEA dump has no rank-1 solution");

  ensure_dir(output);
  {
    auto out = open_out(fs::path(output) / "compare_scatter.csv");
    out << "method,tag,d1,d2\n";
    std::vector<bool> is_top(smc_table.rows.size(), false);
    for (std::size_t k = 0; k < top && k < order.size(); ++k) is_top[order[k]] = true;
    for (std::size_t i = 0; i < smc_table.rows.size(); ++i)
      out << "smc," << (is_top[i] ? "top_decile" : "other") << ',' << smc_table.number(i, "d1")
          << ',' << smc_table.number(i, "d2") << '\n';
    for (std::size_t i = 0; i < moea_table.rows.size(); ++i)
      out << "moea," << (moea_table.number(i, "rank") == 1 ? "rank1" : "other") << ','
          << moea_table.number(i, "d1") << ',' << moea_table.number(i, "d2") << '\n';
  }
  const auto a = method_stats(s1, s2), b = method_stats(m1, m2);
  auto out = open_out(fs::path(output) / "compare_summary.csv");
  out << "method,count,min_d1,median_d1,min_d2,median_d2\n";
  out << "smc_top_decile," << a.count << ',' << a.min_d1 << ',' << a.median_d1 << ',' << a.min_d2
      << ',' << a.median_d2 << '\n';
  out << "moea_rank1," << b.count << ',' << b.min_d1 << ',' << b.median_d1 << ',' << b.min_d2
      << ',' << b.median_d2 << '\n';
  log << std::left << std::setw(16) << "method" << std::setw(7) << "count" << std::setw(12)
      << "min d1" << std::setw(12) << "median d1" << std::setw(12) << "min d2" << "median d2\n";
  for (const auto& [name, s] : {std::pair{"smc top decile", a}, std::pair{"moea rank 1", b}})
    log << std::setw(16) << name << std::setw(7) << s.count << std::setw(12) << s.min_d1
        << std::setw(12) << s.median_d1 << std::setw(12) << s.min_d2 << s.median_d2 << '\n';
  return kOk;
}

}  // namespace lobabc::cli
