#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cvasym/limit_process.hpp"
#include "cvasym/spectral_density.hpp"
#include "cvasym/types.hpp"

namespace cvasym {

// How n_t follows n: an explicit list aligned with the n ladder, a fixed
// fraction, or n - midpoint of nt_window(n, d4, d5).
struct NtRule {
  enum class Kind { explicit_list, fraction, window };
  Kind kind = Kind::fraction;
  std::vector<Index> values;
  double fraction = 0.9;
  double d4 = 0.2, d5 = 0.05;

  Index n_t(Index n, std::size_t ladder_pos) const;
};

enum class OutputFormat { csv, json };

struct ExperimentConfig {
  std::string experiment;
  FamilySpec family;
  std::vector<Index> n{1000};
  NtRule n_t;
  std::vector<Index> V{1};
  double x = 3.0;
  Index replicates = 100;
  std::uint64_t base_seed = 1;
  Index k_max = 0;  // 0 selects k* + f_n extent at level x_max
  double x_max = 12.0;
  std::vector<double> alphas{-0.5, 0.5, 1.0};
  EpsSpec eps;
  GnMode gn_mode = GnMode::lemma;
  Index threads = 0;  // 0: CVASYM_THREADS, else hardware concurrency
  std::string output_path;
  OutputFormat format = OutputFormat::csv;
};

// Every violated constraint, prefixed by its field path.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

// YAML mapping (JSON is accepted as a YAML subset).  Throws ConfigError
// listing field paths for unknown keys, bad types and failed validation.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Defaults used by `cvasym sweep`.
ExperimentConfig default_config(const std::string& experiment);

Index worker_count(const ExperimentConfig& cfg);

}  // namespace cvasym
