#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "cvasym/config.hpp"
#include "cvasym/errors.hpp"
#include "cvasym/experiments.hpp"
#include "cvasym/mc_harness.hpp"

using namespace cvasym;

namespace {

std::vector<ExperimentRecord> fixture() {
  return {
      {"variance_ratio", "polynomial:beta=1.5,kappa=0.5", 5000, 4321, 2, 0, "ho@-0.5", 0.12345678901234567, 42},
      {"variance_ratio", "polynomial:beta=1.5,kappa=0.5", 5000, 4321, 2, 1, "ho@-0.5", -3.5e-300, 43},
      {"lemma_sweep", "geometric:r=0.5", 300, 250, 1, 7, "checks", 1234.0, 18446744073709551615ULL},
      {"cov_match", "uniform", 10, 9, 1, -1, "sup_diff_mean", std::numeric_limits<double>::quiet_NaN(), 0},
      {"cov_match", "uniform", 10, 9, 1, 0, "x", std::numeric_limits<double>::infinity(), 1},
  };
}

void check_same(const std::vector<ExperimentRecord>& a, const std::vector<ExperimentRecord>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("CSV emission") {
  CHECK(to_csv({}) == std::string(kCsvHeader) + "\n");
  const auto recs = fixture();
  const std::string one = to_csv({recs[0]});
  CHECK(std::count(one.begin(), one.end(), '\n') == 2);
  char digits[40];
  std::snprintf(digits, sizeof digits, "%.17g", recs[0].value);
  CHECK(one.find(digits) != std::string::npos);
  CHECK(one.find("\"polynomial:beta=1.5,kappa=0.5\"") != std::string::npos);
  check_same(parse_csv(one), {recs[0]});
  check_same(parse_csv(to_csv(recs)), recs);
  CHECK_THROWS_AS(parse_csv("a,b\n"), DataError);
}

TEST_CASE("JSON and CSV agree field for field") {
  const auto recs = fixture();
  check_same(parse_json(to_json(recs)), parse_csv(to_csv(recs)));
  CHECK(parse_json(to_json({})).empty());
}

TEST_CASE("emit writes files and rejects bad paths") {
  const auto recs = fixture();
  const std::string path = (std::filesystem::temp_directory_path() / "cvasym_emit_test.csv").string();
  emit(recs, OutputFormat::csv, path);
  CHECK(slurp(path) == to_csv(recs));
  emit(recs, OutputFormat::json, path);
  CHECK(slurp(path) == to_json(recs));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(emit(recs, OutputFormat::csv, "/nonexistent-dir/x/out.csv"), DataError);
}

TEST_CASE("summarize") {
  std::vector<ExperimentRecord> recs;
  const double vals[] = {1.5, 2.25, -0.75, 4.0, 3.125};
  for (int i = 0; i < 5; ++i) recs.push_back({"e", "f", 100, 90, 1, i, "s", vals[i], 0});
  recs.push_back({"e", "f", 100, 90, 2, 0, "s", 7.0, 0});
  recs.push_back({"e", "f", 100, 90, 1, -1, "s", 1e9, 0});  // summary row ignored
  recs.push_back({"e", "f", 100, 90, 1, 0, "other", 3.0, 0});
  const auto rows = summarize(recs, "s", {GroupKey::V});
  REQUIRE(rows.size() == 2);
  double mean = 0.0;
  for (double v : vals) mean += v / 5;
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  CHECK(rows[0].group == std::vector<std::string>{"1"});
  CHECK(rows[0].count == 5);
  CHECK(rows[0].mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(rows[0].stderr_ == doctest::Approx(std::sqrt(ss / 4 / 5)).epsilon(1e-12));
  CHECK(rows[1].single);
  CHECK(rows[1].mean == 7.0);
  CHECK(rows[1].stderr_ == 0.0);

  std::vector<ExperimentRecord> flat;
  for (int i = 0; i < 4; ++i) flat.push_back({"e", "f", 1, 1, 1, i, "c", 2.5, 0});
  CHECK(summarize(flat, "c", {}).front().stderr_ == 0.0);
}

TEST_CASE("Kolmogorov-Smirnov statistic") {
  CHECK(ks_statistic({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_statistic({1, 2}, {3, 4}) == 1.0);
  CHECK(ks_statistic({1, 2, 3, 4}, {2.5}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(ks_statistic({}, {1}), DataError);
}

TEST_CASE("parallel_for covers every index once and propagates errors") {
  std::vector<int> hits(1000, 0);
  parallel_for(1000, 4, [&](Index i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(100, 3, [](Index i) {
                    if (i == 37) throw DataError("boom");
                  }),
                  DataError);
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(R"(
experiment: variance_ratio
family: geometric:r=0.6
n: [1200, 2400]
n_t: {rule: fraction, fraction: 0.8}
V: [1, 2]
replicates: 7
base_seed: 9
k_max: auto
gn: {mode: isotonic, eps_c: 0.5, eps_u: 0.2}
output: {path: out.json, format: json}
)");
  CHECK(c.experiment == "variance_ratio");
  CHECK(c.family.kind == FamilyKind::geometric);
  CHECK(c.n == std::vector<Index>{1200, 2400});
  CHECK(c.n_t.n_t(2400, 1) == 1920);
  CHECK(c.replicates == 7);
  CHECK(c.base_seed == 9);
  CHECK(c.k_max == 0);
  CHECK(c.gn_mode == GnMode::isotonic);
  CHECK(c.eps.c == 0.5);
  CHECK(c.format == OutputFormat::json);
  CHECK(c.output_path == "out.json");

  const ExperimentConfig j = parse_config(R"({"experiment": "lemma_sweep", "replicates": 3})");
  CHECK(j.replicates == 3);

  NtRule w;
  w.kind = NtRule::Kind::window;
  CHECK(w.n_t(10000, 0) == 10000 - (736 + 1584) / 2);
}

TEST_CASE("config errors carry field paths") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const std::string m = message(R"(
experiment: variance_ratio
replicates: 0
V: [1, 0]
n: [100]
n_t: [100]
colour: blue
gn: {mode: fancy}
)");
  CHECK(m.find("replicates") != std::string::npos);
  CHECK(m.find("V[1]") != std::string::npos);
  CHECK(m.find("n_t (for n[0] = 100)") != std::string::npos);
  CHECK(m.find("colour: unknown key") != std::string::npos);
  CHECK(m.find("gn.mode") != std::string::npos);
  CHECK(message("experiment: nonsense\n").find("experiment") != std::string::npos);
  CHECK(message("replicates: many\n").find("replicates") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.yaml"), ConfigError);
}

TEST_CASE("default configs validate") {
  for (const char* e : {"unbiasedness", "variance_ratio", "cov_match", "excess_risk_shape", "argmin_law",
                        "lemma_sweep", "coupling_check"})
    CHECK(validate_config(default_config(e)).empty());
}

TEST_CASE("runs are deterministic and independent of worker count") {
  ExperimentConfig c = parse_config(R"(
experiment: variance_ratio
family: geometric:r=0.6
n: [1200]
n_t: [1000]
V: [1, 2]
replicates: 12
base_seed: 5
threads: 1
)");
  const auto a = run_experiment(c);
  c.threads = 3;
  const auto b = run_experiment(c);
  CHECK(to_csv(a) == to_csv(b));
  std::set<std::tuple<std::string, Index, Index, Index, Index, std::string>> keys;
  for (const auto& r : a) CHECK(keys.insert({r.experiment, r.n, r.n_t, r.V, r.replicate, r.statistic}).second);
  CHECK(std::is_sorted(a.begin(), a.end()));
  c.base_seed = 6;
  CHECK(to_csv(run_experiment(c)) != to_csv(a));
}

TEST_CASE("each experiment runs on a small config") {
  for (const char* e : {"unbiasedness", "cov_match", "excess_risk_shape", "argmin_law", "lemma_sweep",
                        "coupling_check"}) {
    ExperimentConfig c = default_config(e);
    c.replicates = 3;
    if (std::string(e) == "cov_match" || std::string(e) == "excess_risk_shape") c.n = {500};
    c.threads = 2;
    const auto recs = run_experiment(c);
    CHECK_FALSE(recs.empty());
    for (const auto& r : recs) CHECK(r.experiment == e);
  }
}
