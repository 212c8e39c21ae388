#include "cvasym/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "cvasym/errors.hpp"
#include "cvasym/oracle_scaling.hpp"

namespace cvasym {

namespace {

const std::set<std::string> kExperiments = {"unbiasedness",      "variance_ratio", "cov_match",
                                            "excess_risk_shape", "argmin_law",     "lemma_sweep",
                                            "coupling_check"};

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += "\n  " + s;
  return out;
}

// Collects conversion failures instead of throwing on the first one.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  template <typename T>
  void scalar(const YAML::Node& node, const std::string& path, T& out) {
    try {
      out = node.as<T>();
    } catch (const YAML::Exception&) {
      errors_.push_back(path + ": expected " + type_name<T>());
    }
  }

  template <typename T>
  void list(const YAML::Node& node, const std::string& path, std::vector<T>& out) {
    if (node.IsScalar()) {
      T v{};
      scalar(node, path, v);
      out = {v};
      return;
    }
    if (!node.IsSequence()) {
      errors_.push_back(path + ": expected a list");
      return;
    }
    out.clear();
    for (std::size_t i = 0; i < node.size(); ++i) {
      T v{};
      scalar(node[i], path + "[" + std::to_string(i) + "]", v);
      out.push_back(v);
    }
  }

  void unknown_keys(const YAML::Node& node, const std::string& prefix, const std::set<std::string>& known) {
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (!known.count(key)) errors_.push_back(prefix + key + ": unknown key");
    }
  }

 private:
  template <typename T>
  static std::string type_name() {
    if constexpr (std::is_floating_point_v<T>) return "a number";
    else if constexpr (std::is_integral_v<T>) return "an integer";
    else return "a string";
  }

  std::vector<std::string>& errors_;
};

}  // namespace

Index NtRule::n_t(Index n, std::size_t ladder_pos) const {
  switch (kind) {
    case Kind::explicit_list:
      if (ladder_pos >= values.size()) throw ConfigError("n_t.values: no entry for n = " + std::to_string(n));
      return values[ladder_pos];
    case Kind::fraction:
      return static_cast<Index>(std::llround(fraction * static_cast<double>(n)));
    case Kind::window: {
      const NtWindow w = nt_window(n, d4, d5);
      if (w.empty()) throw ConfigError("n_t: empty n_v window for n = " + std::to_string(n));
      return n - w.midpoint();
    }
  }
  return 0;
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> err;
  if (!kExperiments.count(cfg.experiment)) err.push_back("experiment: unknown experiment '" + cfg.experiment + "'");
  if (cfg.replicates < 1) err.push_back("replicates: must be >= 1");
  if (cfg.n.empty()) err.push_back("n: ladder is empty");
  for (std::size_t i = 0; i < cfg.n.size(); ++i) {
    const std::string p = "n[" + std::to_string(i) + "]";
    if (cfg.n[i] < 2) {
      err.push_back(p + ": must be >= 2");
      continue;
    }
    try {
      const Index nt = cfg.n_t.n_t(cfg.n[i], i);
      if (nt < 1 || nt > cfg.n[i] - 1)
        err.push_back("n_t (for " + p + " = " + std::to_string(cfg.n[i]) + "): need 1 <= n_t <= n - 1, got " +
                      std::to_string(nt));
    } catch (const std::exception& e) {
      err.push_back(e.what());
    }
  }
  if (cfg.n_t.kind == NtRule::Kind::explicit_list && cfg.n_t.values.size() != cfg.n.size())
    err.push_back("n_t.values: length must match n");
  if (cfg.n_t.kind == NtRule::Kind::fraction && !(cfg.n_t.fraction > 0.0 && cfg.n_t.fraction < 1.0))
    err.push_back("n_t.fraction: must lie in (0, 1)");
  if (cfg.V.empty()) err.push_back("V: list is empty");
  for (std::size_t i = 0; i < cfg.V.size(); ++i)
    if (cfg.V[i] < 1) err.push_back("V[" + std::to_string(i) + "]: must be >= 1");
  if (!(cfg.x > 0.0)) err.push_back("x: must be > 0");
  if (!(cfg.x_max >= cfg.x)) err.push_back("x_max: must be >= x");
  if (cfg.k_max < 0) err.push_back("k_max: must be >= 0");
  if (!(cfg.eps.c > 0.0)) err.push_back("gn.eps_c: must be > 0");
  if (cfg.threads < 0) err.push_back("threads: must be >= 0");
  return err;
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");

  std::vector<std::string> err;
  Reader rd(err);
  ExperimentConfig cfg;
  if (root["experiment"]) {
    rd.scalar(root["experiment"], "experiment", cfg.experiment);
    if (kExperiments.count(cfg.experiment)) cfg = default_config(cfg.experiment);
  } else {
    err.push_back("experiment: missing");
  }
  rd.unknown_keys(root, "", {"experiment", "family", "n", "n_t", "V", "x", "x_max", "replicates", "base_seed",
                             "k_max", "alphas", "gn", "threads", "output"});

  if (root["family"]) {
    std::string spec;
    rd.scalar(root["family"], "family", spec);
    try {
      cfg.family = FamilySpec::parse(spec);
    } catch (const std::exception& e) {
      err.push_back(std::string("family: ") + e.what());
    }
  }
  if (root["n"]) rd.list(root["n"], "n", cfg.n);
  if (const YAML::Node nt = root["n_t"]) {
    if (nt.IsMap()) {
      rd.unknown_keys(nt, "n_t.", {"rule", "values", "fraction", "d4", "d5"});
      std::string rule = "fraction";
      if (nt["rule"]) rd.scalar(nt["rule"], "n_t.rule", rule);
      if (rule == "explicit") cfg.n_t.kind = NtRule::Kind::explicit_list;
      else if (rule == "fraction") cfg.n_t.kind = NtRule::Kind::fraction;
      else if (rule == "window") cfg.n_t.kind = NtRule::Kind::window;
      else err.push_back("n_t.rule: expected explicit, fraction or window");
      if (nt["values"]) rd.list(nt["values"], "n_t.values", cfg.n_t.values);
      if (nt["fraction"]) rd.scalar(nt["fraction"], "n_t.fraction", cfg.n_t.fraction);
      if (nt["d4"]) rd.scalar(nt["d4"], "n_t.d4", cfg.n_t.d4);
      if (nt["d5"]) rd.scalar(nt["d5"], "n_t.d5", cfg.n_t.d5);
    } else {
      cfg.n_t.kind = NtRule::Kind::explicit_list;
      rd.list(nt, "n_t", cfg.n_t.values);
    }
  }
  if (root["V"]) rd.list(root["V"], "V", cfg.V);
  if (root["x"]) rd.scalar(root["x"], "x", cfg.x);
  if (root["x_max"]) rd.scalar(root["x_max"], "x_max", cfg.x_max);
  if (root["replicates"]) rd.scalar(root["replicates"], "replicates", cfg.replicates);
  if (root["base_seed"]) rd.scalar(root["base_seed"], "base_seed", cfg.base_seed);
  if (const YAML::Node k = root["k_max"]) {
    if (k.IsScalar() && k.Scalar() == "auto") cfg.k_max = 0;
    else rd.scalar(k, "k_max", cfg.k_max);
  }
  if (root["alphas"]) rd.list(root["alphas"], "alphas", cfg.alphas);
  if (const YAML::Node gn = root["gn"]) {
    rd.unknown_keys(gn, "gn.", {"mode", "eps_c", "eps_u"});
    if (gn["mode"]) {
      std::string mode;
      rd.scalar(gn["mode"], "gn.mode", mode);
      if (mode == "lemma") cfg.gn_mode = GnMode::lemma;
      else if (mode == "isotonic") cfg.gn_mode = GnMode::isotonic;
      else err.push_back("gn.mode: expected lemma or isotonic");
    }
    if (gn["eps_c"]) rd.scalar(gn["eps_c"], "gn.eps_c", cfg.eps.c);
    if (gn["eps_u"]) rd.scalar(gn["eps_u"], "gn.eps_u", cfg.eps.u);
  }
  if (root["threads"]) rd.scalar(root["threads"], "threads", cfg.threads);
  if (const YAML::Node out = root["output"]) {
    rd.unknown_keys(out, "output.", {"path", "format"});
    if (out["path"]) rd.scalar(out["path"], "output.path", cfg.output_path);
    if (out["format"]) {
      std::string f;
      rd.scalar(out["format"], "output.format", f);
      if (f == "csv") cfg.format = OutputFormat::csv;
      else if (f == "json") cfg.format = OutputFormat::json;
      else err.push_back("output.format: expected csv or json");
    }
  }
  for (auto& e : validate_config(cfg)) err.push_back(std::move(e));
  if (!err.empty()) throw ConfigError("invalid config:" + join(err));
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.family = FamilySpec::parse("polynomial:beta=1.5,kappa=0.5");
  if (experiment == "unbiasedness") {
    c.n = {300};
    c.n_t.kind = NtRule::Kind::explicit_list;
    c.n_t.values = {250};
    c.k_max = 10;
    c.replicates = 10000;
  } else if (experiment == "variance_ratio") {
    c.n = {5000};
    c.n_t.kind = NtRule::Kind::window;
    c.V = {1, 2, 5};
    c.replicates = 2000;
  } else if (experiment == "cov_match" || experiment == "excess_risk_shape") {
    c.n = {500, 2000, 8000};
    c.n_t.kind = NtRule::Kind::window;
    c.n_t.d4 = 0.3;
    c.n_t.d5 = 0.02;
    c.replicates = experiment == "cov_match" ? 20 : 200;
  } else if (experiment == "argmin_law") {
    c.n = {2000};
    c.n_t.kind = NtRule::Kind::window;
    c.V = {1, 5};
    c.replicates = 500;
  } else if (experiment == "lemma_sweep") {
    c.replicates = 200;
  } else if (experiment == "coupling_check") {
    c.replicates = 20;
  }
  return c;
}

Index worker_count(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("CVASYM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return v;
    throw ConfigError("CVASYM_THREADS: expected a positive integer");
  }
  if (cfg.threads > 0) return cfg.threads;
  return std::max<Index>(1, static_cast<Index>(std::thread::hardware_concurrency()));
}

}  // namespace cvasym
