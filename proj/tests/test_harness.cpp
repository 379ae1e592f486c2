#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dropsim/errors.hpp"
#include "dropsim/harness/config.hpp"
#include "dropsim/harness/fit.hpp"
#include "dropsim/harness/output.hpp"
#include "dropsim/harness/scenarios.hpp"
#include "dropsim/rng.hpp"

using namespace dropsim;
namespace fs = std::filesystem;

namespace {

const std::map<std::string, double> kControls{{"points", 5.0}, {"margin", 1.08}};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("dropsim_harness_" + name);
  fs::remove_all(d);
  return d;
}

// Runs a scenario with extra config text into dir; returns the manifest bytes.
std::string run(const std::string& scenario, const std::string& text, const fs::path& dir,
                OutputFormat fmt = OutputFormat::Csv) {
  const ScenarioInfo& info = scenario_info(scenario);
  ScenarioConfig cfg = parse_config(text, scenario, info.defaults, info.medium);
  cfg.out_dir = dir;
  cfg.format = fmt;
  return slurp(run_scenario(cfg).manifest);
}

int cli(const std::string& args) {
  const std::string cmd = std::string(DROPSIM_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("config parses sections, comments and overrides") {
  const std::string text =
      "# comment\n"
      "[run]\n"
      "seed = 42\n"
      "format = json  # trailing\n"
      "snapshot_every = 3\n"
      "[medium]\n"
      "c = 12.5\n"
      "a_m_over_g = 4.0\n"
      "[scenario]\n"
      "points = 9\n";
  const ScenarioConfig cfg = parse_config(text, "x", kControls);
  CHECK(cfg.seed == 42);
  CHECK(cfg.format == OutputFormat::Json);
  CHECK(cfg.snapshot_every == 3);
  CHECK(cfg.medium.c == 12.5);
  CHECK(cfg.medium.a_m == doctest::Approx(4.0 * cfg.medium.g));
  CHECK(cfg.control("points") == 9.0);
  CHECK(cfg.control("margin") == 1.08);
  CHECK_THROWS_AS(cfg.control("nope"), ConfigError);

  const ScenarioConfig empty = parse_config("", "x", kControls);
  CHECK(empty.controls == kControls);
  CHECK(empty.seed == 1);
}

TEST_CASE("config is strict") {
  CHECK_THROWS_AS(parse_config("[scenario]\npoints_ = 3\n", "x", kControls), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nsede = 3\n", "x", kControls), ConfigError);
  CHECK_THROWS_AS(parse_config("[medium]\nC = 3\n", "x", kControls), ConfigError);
  CHECK_THROWS_AS(parse_config("[extra]\n", "x", kControls), ConfigError);
  CHECK_THROWS_AS(parse_config("points = 3\n", "x", kControls), ConfigError);
  CHECK_THROWS_AS(parse_config("[scenario]\npoints = 3\npoints = 4\n", "x", kControls),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("[scenario]\npoints = three\n", "x", kControls), ConfigError);
  CHECK_THROWS_AS(parse_config("[scenario]\npoints = 3x\n", "x", kControls), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nseed = -1\n", "x", kControls), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nformat = xml\n", "x", kControls), ConfigError);
  CHECK_THROWS_AS(parse_config("[medium]\nc = -1\n", "x", kControls), ConfigError);
  CHECK_THROWS_AS(parse_config("[scenario\n", "x", kControls), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/dropsim.cfg", "x", kControls), ConfigError);
}

TEST_CASE("histogram") {
  const std::vector<double> edges{0.0, 1.0, 2.0, 3.0};
  const Histogram e = histogram({}, edges);
  CHECK(e.counts == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(e.below == 0.0);
  CHECK(e.above == 0.0);

  const std::vector<double> v{-1.0, 0.0, 0.5, 1.0, 2.999, 3.0, 7.0};
  const Histogram h = histogram(v, edges);
  CHECK(h.counts == std::vector<double>{2.0, 1.0, 1.0});
  CHECK(h.below == 1.0);
  CHECK(h.above == 2.0);
  double total = h.below + h.above;
  for (double c : h.counts) total += c;
  CHECK(total == v.size());

  std::vector<double> many(1000000);
  Philox rng(9, 0);
  for (double& x : many) x = 1.0 + rng.uniform();
  const Histogram one = histogram(many, edges);
  CHECK(one.counts[1] == 1e6);

  const std::vector<double> w{2.0, 0.5};
  const std::vector<double> two{0.2, 0.3};
  CHECK(histogram(two, edges, w).counts[0] == 2.5);
  const std::vector<double> bad{0.0, 1.0, 1.0};
  CHECK_THROWS_AS(histogram(v, bad), DomainError);
  CHECK_THROWS_AS(histogram(two, edges, std::vector<double>{1.0}), DomainError);

  const auto u = uniform_edges(0.0, 90.0, 5.0);
  CHECK(u.size() == 19);
  CHECK(u.back() == 90.0);
  const std::vector<double> counts{5.0, 3.0, 1.0, 1.0, 4.0};
  CHECK(*first_local_minimum(counts) == 2);
  CHECK_FALSE(first_local_minimum(std::vector<double>{1.0, 2.0, 3.0}).has_value());
}

TEST_CASE("line and exponential fits") {
  std::vector<double> x, y, ye;
  for (int i = 0; i < 20; ++i) {
    x.push_back(0.1 * i);
    y.push_back(2.0 * x.back() + 1.0);
    ye.push_back(std::exp(-3.0 * x.back()));
  }
  const FitResult f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.n_points == 20);
  CHECK(std::fabs(fit_exponential(x, ye).slope + 3.0) <= 1e-10);

  CHECK_THROWS_AS(fit_line(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0}),
                  DomainError);
  CHECK_THROWS_AS(fit_line(std::vector<double>{1.0, 1.0, 1.0}, std::vector<double>{1.0, 2.0, 3.0}),
                  NumericError);
  CHECK_THROWS_AS(fit_exponential(x, y = std::vector<double>(20, -1.0)), DomainError);
}

TEST_CASE("noisy line fit covers the true slope") {
  // Slope standard error sigma / sqrt(sum (x - mean)^2); 200 seeded trials,
  // at most 1% may miss by more than 3 standard errors.
  const double sigma = 0.3;
  int misses = 0;
  double sxx = 0.0;
  std::vector<double> x;
  for (int i = 0; i < 50; ++i) x.push_back(0.2 * i);
  const double mean = 0.2 * 49 / 2.0;
  for (double v : x) sxx += (v - mean) * (v - mean);
  const double se = sigma / std::sqrt(sxx);
  for (int trial = 0; trial < 200; ++trial) {
    Philox rng(77, static_cast<std::uint64_t>(trial));
    std::vector<double> y;
    for (double v : x) y.push_back(-1.5 * v + 4.0 + sigma * standard_normal(rng));
    const FitResult f = fit_line(x, y);
    if (std::fabs(f.slope + 1.5) > 3.0 * se) ++misses;
    CHECK(f.r_squared >= 0.0);
    CHECK(f.r_squared <= 1.0);
  }
  CHECK(misses <= 2);
}

TEST_CASE("two-sample KS statistic") {
  CHECK(ks_statistic({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
  CHECK(ks_statistic({1.0, 2.0}, {3.0, 4.0}) == 1.0);
  CHECK(ks_critical(100, 100, 0.001) ==
        doctest::Approx(std::sqrt(-0.5 * std::log(0.0005)) * std::sqrt(0.02)).epsilon(1e-12));
  std::vector<double> a, b, c;
  Philox ra(1, 0), rb(2, 0);
  for (int i = 0; i < 5000; ++i) {
    a.push_back(standard_normal(ra));
    b.push_back(standard_normal(rb));
    c.push_back(a.back() + 0.2);
  }
  CHECK(ks_statistic(a, b) < ks_critical(a.size(), b.size(), 0.001));
  CHECK(ks_statistic(c, b) > ks_critical(c.size(), b.size(), 0.001));
}

TEST_CASE("numbers, tables and digests") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-2.5e-300) == "-2.5e-300");
  CHECK(format_number(3.0) == "3");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(INFINITY) == "inf");

  Table t{{"a", "b"}, {}};
  t.add({1.0, 0.25});
  t.add({-3.0, 1e-9});
  CHECK(t.to_csv() == "a,b\n1,0.25\n-3,1e-09\n");
  CHECK(t.to_json().dump() == R"([{"a":1.0,"b":0.25},{"a":-3.0,"b":1e-09}])");
  CHECK_THROWS_AS(t.add({1.0}), DomainError);

  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("output set writes a digest manifest") {
  const fs::path dir = scratch("output");
  OutputSet out(dir);
  out.write("a.csv", "x\n1\n");
  const std::string manifest = slurp(out.write_manifest("demo", 5));
  const Json j = Json::parse(manifest);
  CHECK(j["scenario"] == "demo");
  CHECK(j["seed"] == 5);
  CHECK(j["files"][0]["file"] == "a.csv");
  CHECK(j["files"][0]["bytes"] == 4);
  CHECK(j["files"][0]["sha256"] == sha256_hex("x\n1\n"));
  fs::remove_all(dir);
}

TEST_CASE("scenario registry") {
  const std::vector<std::string> names{"walker_speed_sweep", "boundary_reflection", "single_slit",
                                       "double_slit",        "tunnelling_sweep",    "orbiting_pair",
                                       "spin_tables",        "pair_alignment_torque",
                                       "rotating_bath_demo"};
  CHECK(scenario_registry().size() == names.size());
  for (const auto& n : names) CHECK(scenario_info(n).name == n);
  CHECK_THROWS_AS(scenario_info("quadruple_slit"), ConfigError);
}

TEST_CASE("walker speed sweep summary and table") {
  const fs::path dir = scratch("sweep");
  run("walker_speed_sweep", "", dir);
  const Json s = Json::parse(slurp(dir / "summary.json"));
  CHECK(s["scenario"] == "walker_speed_sweep");
  CHECK(s["metrics"]["fit"]["r_squared"].get<double>() >= 0.999);
  CHECK(s["metrics"]["gamma_max"].get<double>() >= 2.0);
  const std::string csv = slurp(dir / "speed_sweep.csv");
  CHECK(csv.rfind("a_m_over_g,T_over_tau,v,gamma,speed_law_lhs\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("same seed, same bytes; other seed, other bytes") {
  const std::string small_slit =
      "[scenario]\ntrajectories = 300\nexit_radius = 60\nny = 1024\n";
  for (const std::string& sc : {std::string("walker_speed_sweep"), std::string("spin_tables"),
                                std::string("orbiting_pair"), std::string("pair_alignment_torque"),
                                std::string("rotating_bath_demo")}) {
    CAPTURE(sc);
    const fs::path a = scratch(sc + "_a"), b = scratch(sc + "_b");
    CHECK(run(sc, "", a) == run(sc, "", b));
    fs::remove_all(a);
    fs::remove_all(b);
  }

  const fs::path a = scratch("slit_a"), b = scratch("slit_b"), c = scratch("slit_c");
  const std::string m1 = run("single_slit", small_slit, a);
  const int threads = omp_get_max_threads();
  omp_set_num_threads(1);
  const std::string m2 = run("single_slit", small_slit, b);
  omp_set_num_threads(threads);
  CHECK(m1 == m2);
  const std::string m3 = run("single_slit", "[run]\nseed = 2\n" + small_slit, c);
  CHECK(m1 != m3);
  CHECK(slurp(a / "histogram.csv") != slurp(c / "histogram.csv"));
  for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST_CASE("json format and snapshots") {
  const fs::path dir = scratch("json");
  run("spin_tables", "", dir, OutputFormat::Json);
  CHECK(fs::exists(dir / "alpha_rows.json"));
  CHECK_FALSE(fs::exists(dir / "alpha_rows.csv"));
  const Json rows = Json::parse(slurp(dir / "alpha_rows.json"));
  CHECK(rows.is_array());
  CHECK(rows.size() >= 5);
  fs::remove_all(dir);

  const fs::path snap = scratch("snap");
  run("tunnelling_sweep",
      "[run]\nsnapshot_every = 2000\n[scenario]\nn = 2048\ndt = 0.1\nwidth_max = 2.0\n", snap);
  CHECK(fs::exists(snap / "snapshot_0.hdr"));
  CHECK(fs::exists(snap / "snapshot_0.bin"));
  const Json m = Json::parse(slurp(snap / "manifest.json"));
  bool listed = false;
  for (const auto& f : m["files"]) listed = listed || f["file"] == "snapshot_0.bin";
  CHECK(listed);
  fs::remove_all(snap);
}

TEST_CASE("scenario controls are validated") {
  const fs::path dir = scratch("bad");
  CHECK_THROWS_AS(run("walker_speed_sweep", "[scenario]\npoints = 0\n", dir), ConfigError);
  CHECK_THROWS_AS(run("walker_speed_sweep", "[scenario]\na_max_over_g = 30\n", dir),
                  RegimeError);
  fs::remove_all(dir);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  CHECK(cli("--list") == 0);
  CHECK(cli("spin_tables --out " + (dir / "ok").string()) == 0);
  CHECK(fs::exists(dir / "ok" / "manifest.json"));
  CHECK(cli("") == kExitConfig);
  CHECK(cli("no_such_scenario") == kExitConfig);
  CHECK(cli("spin_tables --format xml") == kExitConfig);
  {
    std::ofstream(dir / "bad.cfg") << "[scenario]\nLo = 2\n";
  }
  CHECK(cli("spin_tables --config " + (dir / "bad.cfg").string()) == kExitConfig);
  {
    std::ofstream(dir / "regime.cfg") << "[scenario]\na_max_over_g = 30\n";
  }
  CHECK(cli("walker_speed_sweep --out " + (dir / "r").string() + " --config " +
            (dir / "regime.cfg").string()) == kExitRegime);
  {
    std::ofstream(dir / "numeric.cfg") << "[scenario]\ndt_over_tau = 3\n";
  }
  CHECK(cli("boundary_reflection --out " + (dir / "n").string() + " --config " +
            (dir / "numeric.cfg").string()) == kExitNumeric);
  fs::remove_all(dir);
}
