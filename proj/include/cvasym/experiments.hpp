#pragma once

#include <string>
#include <vector>

#include "cvasym/config.hpp"
#include "cvasym/limit_process.hpp"
#include "cvasym/mc_harness.hpp"
#include "cvasym/oracle_scaling.hpp"

namespace cvasym {

// A (family, n, n_t, x) whose scaling is canonical and non-degenerate.
struct AdmissibleConfig {
  FamilySpec family;
  Index n = 0, n_t = 0;
  double x = 1.0;
};

AdmissibleConfig random_admissible(Rng& rng);

struct LemmaReport {
  Index checks = 0;
  Index odgs = 0, fn = 0, window = 0, gn = 0;  // violations per group
  std::vector<std::string> violations;
  // Same statements with the integer-rounding corrections: Delta >= floor(n_t/n_v),
  // slope >= sqrt(Delta/(Delta+1)) beyond 1, slope >= -sqrt(Delta/(Delta-1)) on [-1,0].
  Index corrected_checks = 0;
  std::vector<std::string> corrected_violations;
};

// Every exact inequality on scaling, f_n, the window at level x and g_n.
LemmaReport lemma_report(const AdmissibleConfig& ac, EpsSpec eps = {}, GnMode mode = GnMode::lemma);

// (ell(s_{k*+j}) - ell(s_{k*})) / e on knots [j_lo, j_hi].
GridFunction loss_process(const Eigen::Ref<const Eigen::VectorXd>& theta_hat, const CoefficientSequence& seq,
                          const ScalingSummary& sc, Index j_lo, Index j_hi);

// Largest |C - K| over knot pairs of equal sign (0 counts as both).
double same_sign_sup(const Eigen::MatrixXd& C, const Eigen::MatrixXd& K, Index j_lo);

// Statistic name with a real parameter, e.g. "ho@-0.5".
std::string stat_name(const std::string& base, double param);

namespace experiments {

std::vector<ExperimentRecord> unbiasedness(const ExperimentConfig& cfg, Index workers);
std::vector<ExperimentRecord> variance_ratio(const ExperimentConfig& cfg, Index workers);
std::vector<ExperimentRecord> cov_match(const ExperimentConfig& cfg, Index workers);
std::vector<ExperimentRecord> excess_risk_shape(const ExperimentConfig& cfg, Index workers);
std::vector<ExperimentRecord> argmin_law(const ExperimentConfig& cfg, Index workers);
std::vector<ExperimentRecord> lemma_sweep(const ExperimentConfig& cfg, Index workers);
std::vector<ExperimentRecord> coupling_check(const ExperimentConfig& cfg, Index workers);

}  // namespace experiments

}  // namespace cvasym
