#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "lobabc/cli/commands.hpp"

using namespace lobabc;

namespace {

struct Common {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string output;
  std::string observed;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_file, "JSON configuration (see `init`)");
  app->add_option("--seed", c.seed, "RNG seed");
  app->add_option("-w,--workers", c.workers, "worker threads (overrides LOBABC_WORKERS)");
  app->add_option("-o,--output", c.output, "output directory");
}

// Config file, then LOBABC_WORKERS, then flags.
cli::RunConfig resolve(const Common& c) {
  cli::RunConfig config = c.config_file.empty() ? cli::default_config() : cli::load_config(c.config_file);
  if (const char* env = std::getenv("LOBABC_WORKERS")) {
    try {
      config.workers = std::stoul(env);
    } catch (const std::exception&) {
      throw cli::InputError("LOBABC_WORKERS must be a positive integer");
    }
  }
  if (c.seed) config.seed = c.seed;
  if (c.workers) config.workers = *c.workers;
  if (!c.output.empty()) config.output = c.output;
  if (!c.observed.empty()) config.observed = c.observed;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Limit order book simulator with ABC-SMC and MOEA calibration"};
  app.require_subcommand(1);

  std::string init_file = "lobabc.json";
  bool force = false;
  auto* init = app.add_subcommand("init", "write a configuration file with every default");
  init->add_option("file", init_file, "destination")->capture_default_str();
  init->add_flag("--force", force, "overwrite an existing file");

  Common sim_c;
  cli::SimulateOptions sim_opt;
  std::vector<std::string> sets;
  std::optional<std::size_t> intervals;
  auto* simulate = app.add_subcommand("simulate", "simulate one trading day");
  add_common(simulate, sim_c);
  simulate->add_option("--theta", sim_opt.theta_file, "theta JSON file");
  simulate->add_option("--set", sets, "override a parameter, name=value")->take_all();
  simulate->add_flag("--events", sim_opt.write_events, "also write the event feed");
  simulate->add_option("--intervals", intervals, "number of intervals");

  Common sum_c;
  std::string sum_input;
  auto* summarize = app.add_subcommand("summarize", "fit the auxiliary models to a data file");
  add_common(summarize, sum_c);
  summarize->add_option("input", sum_input, "event CSV, snapshot CSV or snapshot JSON")->required();

  Common smc_c;
  std::optional<std::size_t> particles, iterations, replicates;
  std::optional<double> quantile, alpha;
  auto* smc = app.add_subcommand("calibrate-smc", "ABC-SMC calibration");
  add_common(smc, smc_c);
  smc->add_option("--observed", smc_c.observed, "observed data file");
  smc->add_option("--particles", particles, "N");
  smc->add_option("--iterations", iterations, "T");
  smc->add_option("--replicates", replicates, "simulations per particle");
  smc->add_option("--quantile", quantile, "tolerance quantile q");
  smc->add_option("--alpha", alpha, "minimum relative tolerance decrease");

  Common moea_c;
  std::optional<std::size_t> population, generations;
  auto* moea = app.add_subcommand("calibrate-moea", "multi-objective baseline");
  add_common(moea, moea_c);
  moea->add_option("--observed", moea_c.observed, "observed data file");
  moea->add_option("--population", population, "population size");
  moea->add_option("--generations", generations, "generations");

  std::string smc_dir, moea_dir, cmp_out = "compare";
  auto* compare = app.add_subcommand("compare", "compare SMC and MOEA runs");
  compare->add_option("smc_dir", smc_dir, "calibrate-smc output")->required();
  compare->add_option("moea_dir", moea_dir, "calibrate-moea output")->required();
  compare->add_option("-o,--output", cmp_out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kBadInput;
  }

  try {
    if (*init) return cli::cmd_init(init_file, force, std::cout);
    if (*simulate) {
      auto config = resolve(sim_c);
      if (intervals) config.sim.intervals = *intervals;
      for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw cli::InputError("--set expects name=value, got " + s);
        try {
          sim_opt.overrides[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
        } catch (const std::exception&) {
          throw cli::InputError("--set value is not a number: " + s);
        }
      }
      return cli::cmd_simulate(config, sim_opt, std::cout);
    }
    if (*summarize) return cli::cmd_summarize(resolve(sum_c), sum_input, std::cout);
    if (*smc) {
      auto config = resolve(smc_c);
      if (particles) config.smc.particles = *particles;
      if (iterations) config.smc.iterations = *iterations;
      if (replicates) config.smc.replicates = *replicates;
      if (quantile) config.smc.quantile = *quantile;
      if (alpha) config.smc.alpha = *alpha;
      return cli::cmd_calibrate_smc(config, std::cout);
    }
    if (*moea) {
      auto config = resolve(moea_c);
      if (population) config.moea.population = *population;
      if (generations) config.moea.generations = *generations;
      return cli::cmd_calibrate_moea(config, std::cout);
    }
    if (*compare) return cli::cmd_compare(smc_dir, moea_dir, cmp_out, std::cout);
  } catch (const cli::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return cli::kInternalError;
  }
  return cli::kBadInput;
}
