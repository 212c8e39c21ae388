#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "cvasym/config.hpp"
#include "cvasym/types.hpp"

namespace cvasym {

struct ExperimentRecord {
  std::string experiment, family;
  Index n = 0, n_t = 0, V = 0;
  Index replicate = 0;  // -1 for per-cell summary rows
  std::string statistic;
  double value = 0.0;
  std::uint64_t seed = 0;

  auto key() const { return std::tie(experiment, n, n_t, V, replicate, statistic); }
};

bool operator<(const ExperimentRecord& a, const ExperimentRecord& b);
bool operator==(const ExperimentRecord& a, const ExperimentRecord& b);

// Sorted by (experiment, n, n_t, V, replicate, statistic).  Throws
// ConfigError on invalid config, DataError on a duplicate key.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg);

// Runs body(i) for i in [0, count) on `workers` threads.  The first exception
// thrown by any body is rethrown after all workers stop.
void parallel_for(Index count, Index workers, const std::function<void(Index)>& body);

inline constexpr const char* kCsvHeader = "experiment,family,n,n_t,V,replicate,statistic,value,seed";

std::string to_csv(const std::vector<ExperimentRecord>& records);
std::string to_json(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> parse_csv(const std::string& text);
std::vector<ExperimentRecord> parse_json(const std::string& text);

// Writes the file; throws DataError when the path is not writable.
void emit(const std::vector<ExperimentRecord>& records, OutputFormat format, const std::string& path);

enum class GroupKey { experiment, family, n, n_t, V };

struct SummaryRow {
  std::vector<std::string> group;  // values of the group keys, in order
  double mean = 0.0;
  double stderr_ = 0.0;
  Index count = 0;
  bool single = false;  // count == 1, stderr reported as 0
};

// Mean, standard error of the mean and count of `statistic` per group;
// summary rows (replicate < 0) are skipped.
std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records, const std::string& statistic,
                                  const std::vector<GroupKey>& group_keys);

// sup |F_a - F_b| of the two empirical distribution functions.
double ks_statistic(std::vector<double> a, std::vector<double> b);

}  // namespace cvasym
