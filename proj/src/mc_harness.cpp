#include "cvasym/mc_harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "cvasym/errors.hpp"
#include "cvasym/experiments.hpp"

namespace cvasym {

bool operator<(const ExperimentRecord& a, const ExperimentRecord& b) { return a.key() < b.key(); }

bool operator==(const ExperimentRecord& a, const ExperimentRecord& b) {
  const bool same_value = a.value == b.value || (std::isnan(a.value) && std::isnan(b.value));
  return a.key() == b.key() && a.family == b.family && a.seed == b.seed && same_value;
}

void parallel_for(Index count, Index workers, const std::function<void(Index)>& body) {
  workers = std::clamp<Index>(workers, 1, std::max<Index>(count, 1));
  if (workers == 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first;
  std::mutex mu;
  auto work = [&] {
    for (Index i = next++; i < count && !failed; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (Index w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) {
  const auto err = validate_config(cfg);
  if (!err.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : err) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  const Index workers = worker_count(cfg);
  std::vector<ExperimentRecord> out;
  const std::string& e = cfg.experiment;
  if (e == "unbiasedness") out = experiments::unbiasedness(cfg, workers);
  else if (e == "variance_ratio") out = experiments::variance_ratio(cfg, workers);
  else if (e == "cov_match") out = experiments::cov_match(cfg, workers);
  else if (e == "excess_risk_shape") out = experiments::excess_risk_shape(cfg, workers);
  else if (e == "argmin_law") out = experiments::argmin_law(cfg, workers);
  else if (e == "lemma_sweep") out = experiments::lemma_sweep(cfg, workers);
  else if (e == "coupling_check") out = experiments::coupling_check(cfg, workers);
  std::sort(out.begin(), out.end());
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i - 1].key() == out[i].key())
      throw DataError("run_experiment: duplicate record key for statistic " + out[i].statistic);
  return out;
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

template <typename T>
T parse_number(const std::string& s, const char* field) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw DataError(std::string("parse: bad ") + field + " '" + s + "'");
  return v;
}

double parse_value(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return parse_number<double>(s, "value");
}

}  // namespace

std::string to_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : records) {
    out += csv_field(r.experiment) + ',' + csv_field(r.family) + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.n_t) + ',' + std::to_string(r.V) + ',' + std::to_string(r.replicate) + ',' +
           csv_field(r.statistic) + ',' + format_double(r.value) + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

std::string to_json(const std::vector<ExperimentRecord>& records) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json o;
    o["experiment"] = r.experiment;
    o["family"] = r.family;
    o["n"] = r.n;
    o["n_t"] = r.n_t;
    o["V"] = r.V;
    o["replicate"] = r.replicate;
    o["statistic"] = r.statistic;
    if (std::isfinite(r.value)) o["value"] = r.value;
    else o["value"] = format_double(r.value);
    o["seed"] = r.seed;
    arr.push_back(std::move(o));
  }
  return arr.dump(1) + "\n";
}

std::vector<ExperimentRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw DataError("parse_csv: unexpected header");
  std::vector<ExperimentRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw DataError("parse_csv: expected 9 fields, got " + std::to_string(f.size()));
    ExperimentRecord r;
    r.experiment = f[0];
    r.family = f[1];
    r.n = parse_number<Index>(f[2], "n");
    r.n_t = parse_number<Index>(f[3], "n_t");
    r.V = parse_number<Index>(f[4], "V");
    r.replicate = parse_number<Index>(f[5], "replicate");
    r.statistic = f[6];
    r.value = parse_value(f[7]);
    r.seed = parse_number<std::uint64_t>(f[8], "seed");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExperimentRecord> parse_json(const std::string& text) {
  std::vector<ExperimentRecord> out;
  try {
    for (const auto& o : nlohmann::json::parse(text)) {
      ExperimentRecord r;
      r.experiment = o.at("experiment").get<std::string>();
      r.family = o.at("family").get<std::string>();
      r.n = o.at("n").get<Index>();
      r.n_t = o.at("n_t").get<Index>();
      r.V = o.at("V").get<Index>();
      r.replicate = o.at("replicate").get<Index>();
      r.statistic = o.at("statistic").get<std::string>();
      const auto& v = o.at("value");
      r.value = v.is_string() ? parse_value(v.get<std::string>()) : v.get<double>();
      r.seed = o.at("seed").get<std::uint64_t>();
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("parse_json: ") + e.what());
  }
  return out;
}

void emit(const std::vector<ExperimentRecord>& records, OutputFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("emit: cannot open " + path + " for writing");
  out << (format == OutputFormat::csv ? to_csv(records) : to_json(records));
  if (!out) throw DataError("emit: write to " + path + " failed");
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records, const std::string& statistic,
                                  const std::vector<GroupKey>& group_keys) {
  std::map<std::vector<std::string>, std::vector<double>> groups;
  for (const auto& r : records) {
    if (r.statistic != statistic || r.replicate < 0) continue;
    std::vector<std::string> key;
    for (GroupKey k : group_keys) {
      switch (k) {
        case GroupKey::experiment: key.push_back(r.experiment); break;
        case GroupKey::family: key.push_back(r.family); break;
        case GroupKey::n: key.push_back(std::to_string(r.n)); break;
        case GroupKey::n_t: key.push_back(std::to_string(r.n_t)); break;
        case GroupKey::V: key.push_back(std::to_string(r.V)); break;
      }
    }
    groups[key].push_back(r.value);
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, v] : groups) {
    SummaryRow row;
    row.group = key;
    row.count = static_cast<Index>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    row.mean = sum / static_cast<double>(v.size());
    if (v.size() == 1) {
      row.single = true;
    } else {
      double ss = 0.0;
      for (double x : v) ss += (x - row.mean) * (x - row.mean);
      row.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    out.push_back(std::move(row));
  }
  return out;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DataError("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace cvasym
