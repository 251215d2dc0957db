#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lobabc/cli/commands.hpp"
#include "lobabc/cli/config.hpp"
#include "lobabc/cli/pipeline.hpp"

using namespace lobabc;
using namespace lobabc::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("lobabc_cli_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Short days with a 10 s return grid still give the auxiliary fits enough data.
RunConfig tiny_config(const fs::path& out) {
  RunConfig c = default_config();
  c.sim.intervals = 240;
  c.return_delta_seconds = 10;
  c.smc.particles = 12;
  c.smc.iterations = 2;
  c.moea.population = 12;
  c.moea.generations = 2;
  c.workers = 1;
  c.output = out.string();
  return c;
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig c = default_config();
  CHECK(c.smc.iterations == 20);
  CHECK(c.smc.particles == 200);
  CHECK(c.smc.quantile == 0.9);
  CHECK(c.smc.alpha == 0.1);
  CHECK(c.moea.population == c.smc.particles);
  CHECK(c.genetic.smc_crossover_prob == 0.05);
  CHECK(c.genetic.moea_crossover_prob == 0.7);
  CHECK(*c.seed == 1);
}

TEST_CASE("config JSON round-trip, unknown keys and hash") {
  RunConfig c = default_config();
  c.smc.particles = 77;
  c.model.market_rate_hi = 3.5;
  c.genetic.eta_m = 12;
  c.seed.reset();
  const std::string text = to_json(c);
  const RunConfig back = config_from_json(text);
  CHECK(to_json(back) == text);
  CHECK_FALSE(back.seed.has_value());
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c) != config_hash(default_config()));

  // Partial files keep defaults for everything omitted.
  const RunConfig partial = config_from_json(R"({"smc": {"particles": 40}})");
  CHECK(partial.smc.particles == 40);
  CHECK(partial.smc.iterations == 20);

  CHECK_THROWS_AS(config_from_json(R"({"bogus": 1})"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(R"({"smc": {"partcles": 40}})"), std::invalid_argument);
  CHECK_THROWS(config_from_json(R"({"smc": {"kernel": "triangular"}})"));
  CHECK_THROWS(config_from_json("[1, 2"));
}

TEST_CASE("FNV-1a hash of the canonical JSON") {
  const RunConfig c = default_config();
  const std::string canon = nlohmann::json::parse(to_json(c)).dump(-1);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  CHECK(config_hash(c) == h);
}

TEST_CASE("theta JSON") {
  const sim::ReferenceModel model;
  const auto space = model.space();
  const auto ref = model.reference_theta();
  CHECK(theta_from_json("{}", model) == ref);
  const auto t = theta_from_json(theta_to_json(ref, space), model);
  CHECK(t == ref);
  const auto moved = theta_from_json(R"({")" + space.names[0] + R"(": 5.5})", model);
  CHECK(moved.scalars[0] == 5.5);
  CHECK(moved.scalars[1] == ref.scalars[1]);
  CHECK_THROWS(theta_from_json(R"({"not_a_parameter": 1})", model));
  CHECK_THROWS(theta_from_json(R"({")" + space.covariance_names[0] + R"(": [[1]]})", model));
  CHECK_THROWS(theta_from_json("[]", model));
}

TEST_CASE("model built from a config") {
  const RunConfig c = default_config();
  const auto m = build_model(c);
  Rng rng = make_stream(1);
  for (int i = 0; i < 100; ++i) {
    const auto t = m.sample_prior(rng);
    CHECK(m.space.contains(t));
    CHECK(std::isfinite(m.log_prior(t)));
  }
  auto out = m.sample_prior(rng);
  out.scalars[0] = m.space.upper[0] + 1;
  CHECK(std::isinf(m.log_prior(out)));
  CHECK(covariance_mixture(c).dim() == static_cast<int>(m.space.covariance_dims[0]));
}

TEST_CASE("method statistics") {
  const auto s = method_stats({3, 1, 2, 10}, {0.5, 0.25, 4, 1});
  CHECK(s.count == 4);
  CHECK(s.min_d1 == 1);
  CHECK(s.median_d1 == 2.5);
  CHECK(s.min_d2 == 0.25);
  CHECK(s.median_d2 == 0.75);
  CHECK(method_stats({}, {}).count == 0);
}

TEST_CASE("CSV table reader") {
  TempDir dir;
  const fs::path f = dir.path / "t.csv";
  std::ofstream(f) << "a,b\n1,2.5\n3,x\n";
  const CsvTable t = read_table(f.string());
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  CHECK(t.number(0, "b") == 2.5);
  CHECK_THROWS_AS(t.column("c"), InputError);
  CHECK_THROWS(t.number(1, "b"));
  CHECK_THROWS_AS(read_table((dir.path / "missing.csv").string()), InputError);
}

TEST_CASE("end-to-end: simulate, summarize, calibrate, compare") {
  TempDir dir;
  std::ostringstream log;
  const fs::path cfg_file = dir.path / "config.json";
  CHECK(cmd_init(cfg_file.string(), false, log) == kOk);
  CHECK_THROWS_AS(cmd_init(cfg_file.string(), false, log), InputError);
  CHECK(config_from_json(slurp(cfg_file)).smc.particles == 200);

  RunConfig c = tiny_config(dir.path / "sim");
  SimulateOptions so;
  so.write_events = true;
  REQUIRE(cmd_simulate(c, so, log) == kOk);
  for (const char* f : {"path.csv", "path.json", "events.csv", "theta.json", "manifest.json"})
    CHECK(fs::exists(dir.path / "sim" / f));

  // Events and snapshot files summarize to the same numbers.
  c.output = (dir.path / "sum_events").string();
  REQUIRE(cmd_summarize(c, (dir.path / "sim" / "events.csv").string(), log) == kOk);
  c.output = (dir.path / "sum_path").string();
  REQUIRE(cmd_summarize(c, (dir.path / "sim" / "path.csv").string(), log) == kOk);
  const auto a = nlohmann::json::parse(slurp(dir.path / "sum_events" / "summary.json"));
  const auto b = nlohmann::json::parse(slurp(dir.path / "sum_path" / "summary.json"));
  CHECK(a.at("beta1") == b.at("beta1"));
  CHECK(a.at("beta2") == b.at("beta2"));

  c.observed = (dir.path / "sim" / "events.csv").string();
  c.output = (dir.path / "smc").string();
  REQUIRE(cmd_calibrate_smc(c, log) == kOk);
  const CsvTable particles = read_table((dir.path / "smc" / "particles.csv").string());
  CHECK(particles.rows.size() == 12);
  double total = 0;
  for (std::size_t i = 0; i < particles.rows.size(); ++i) total += particles.number(i, "weight");
  CHECK(total == doctest::Approx(1).epsilon(1e-9));
  for (const char* f : {"trace.jsonl", "marginal_cdf.csv", "objective_scatter.csv", "manifest.json"})
    CHECK(fs::exists(dir.path / "smc" / f));
  const auto manifest = nlohmann::json::parse(slurp(dir.path / "smc" / "manifest.json"));
  CHECK(manifest.contains("mmse"));

  c.output = (dir.path / "moea").string();
  REQUIRE(cmd_calibrate_moea(c, log) == kOk);
  const CsvTable pop = read_table((dir.path / "moea" / "population.csv").string());
  CHECK(pop.rows.size() == 12);

  REQUIRE(cmd_compare((dir.path / "smc").string(), (dir.path / "moea").string(),
                      (dir.path / "cmp").string(), log) == kOk);
  const CsvTable summary = read_table((dir.path / "cmp" / "compare_summary.csv").string());
  CHECK(summary.rows.size() == 2);
}

TEST_CASE("user errors surface as input errors") {
  TempDir dir;
  std::ostringstream log;
  RunConfig c = tiny_config(dir.path / "out");
  CHECK_THROWS_AS(cmd_calibrate_smc(c, log), InputError);  // no observed data
  c.observed = (dir.path / "nope.csv").string();
  CHECK_THROWS_AS(cmd_calibrate_smc(c, log), InputError);
  SimulateOptions so;
  so.theta_file = (dir.path / "missing.json").string();
  CHECK_THROWS_AS(cmd_simulate(c, so, log), InputError);
  so = SimulateOptions{};
  so.overrides["tail_dof"] = 1000;
  CHECK_THROWS_AS(cmd_simulate(c, so, log), InputError);
  so.overrides = {{"no_such", 1.0}};
  CHECK_THROWS_AS(cmd_simulate(c, so, log), InputError);
  CHECK_THROWS_AS(cmd_summarize(c, (dir.path / "missing.csv").string(), log), InputError);
}
