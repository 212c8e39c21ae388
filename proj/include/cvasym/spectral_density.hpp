#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "cvasym/rng.hpp"
#include "cvasym/special_functions.hpp"
#include "cvasym/types.hpp"

namespace cvasym {

// Cosine basis on [0,1]: psi_0 = 1, psi_j(x) = sqrt(2) cos(2 pi j x).
double psi(Index j, double x);

enum class TailKind { zero, geometric, polynomial };

// Closed-form rule for theta_j beyond the explicit head:
//   geometric:  theta_j = scale * param^j
//   polynomial: theta_j = scale * j^{-param}
struct TailRule {
  TailKind kind = TailKind::zero;
  double param = 0.0;
  double scale = 0.0;

  static TailRule zero() { return {}; }
  static TailRule geometric(double r, double a = 1.0) { return {TailKind::geometric, r, a}; }
  static TailRule polynomial(double beta, double kappa = 1.0) {
    return {TailKind::polynomial, beta, kappa};
  }
};

// theta_0 .. theta_J stored explicitly, theta_j for j > J from the tail rule.
class CoefficientSequence {
 public:
  explicit CoefficientSequence(std::vector<double> head, TailRule tail = TailRule::zero());

  double theta(Index j) const;
  double theta_sq(Index j) const { const double t = theta(j); return t * t; }
  Index head_last() const { return static_cast<Index>(head_.size()) - 1; }
  const std::vector<double>& head() const { return head_; }
  const TailRule& tail() const { return tail_; }

  // sum_{j>k} theta_j^2 (the bias term R(k)), exact.
  double tail_sq_sum(Index k) const;
  // sum_{j>k} |theta_j|; +inf when the tail is not summable.
  double abs_tail_sum(Index k) const;
  double l2_norm_sq() const { return tail_sq_sum(-1); }
  double ell1_norm() const { return abs_tail_sum(-1); }
  bool ell1_finite() const;
  // theta_j^2 non-increasing over j >= 1.
  bool monotone_sq() const;

  Eigen::VectorXd theta_range(Index from, Index to) const;

  // sum_{j>=1} theta_j cos(j t) and sum_{j>=1} theta_j sin(j t) / j.
  double cos_series(double t) const;
  double sin_over_j_series(double t) const;

 private:
  std::vector<double> head_;
  TailRule tail_;
  std::vector<double> sq_suffix_;   // sum_{j=i}^{J} theta_j^2
  std::vector<double> abs_suffix_;
  std::shared_ptr<const PolylogSeries> li_cos_;
  std::shared_ptr<const PolylogSeries> li_sin_;
};

enum class FamilyKind { uniform, geometric, polynomial, plateau };

struct FamilyParams {
  double ratio = 0.0;     // geometric r
  double exponent = 0.0;  // polynomial beta
  double scale = 1.0;     // polynomial kappa
  double height = 0.0;    // plateau h
  Index width = 0;        // plateau u
};

struct FamilySpec {
  FamilyKind kind = FamilyKind::uniform;
  FamilyParams params;

  // "uniform", "geometric:r=0.5", "polynomial:beta=1.5,kappa=0.5",
  // "plateau:h=0.001111,u=30"
  static FamilySpec parse(const std::string& text);
  std::string to_string() const;
};

CoefficientSequence make_family(FamilyKind kind, const FamilyParams& params);
inline CoefficientSequence make_family(const FamilySpec& spec) {
  return make_family(spec.kind, spec.params);
}

// s(x) = sum_j theta_j psi_j(x), tails summed in closed form.
double density_eval(const CoefficientSequence& seq, double x);
// F(x) = int_0^x s.
double cdf_eval(const CoefficientSequence& seq, double x);

struct DensityModel {
  CoefficientSequence seq;
  double l2_norm_sq = 0.0;
  double ell1_norm = 0.0;
  double sup_norm_lower = 0.0;  // max |s| over the certification grid
  double sup_norm = 0.0;        // certified upper bound on ||s||_inf
  double min_lower = 0.0;       // certified lower bound on min s
  bool nonneg_certified = false;
};

DensityModel make_density_model(const CoefficientSequence& seq);

// Rejection sampling under the envelope 1 + sqrt(2) sum_{j>=1} |theta_j|.
std::vector<double> sample_density(const DensityModel& model, Index n, Rng& rng);

// Cov(psi_i(X), psi_j(X)) for X ~ s.
double cov_psi(const CoefficientSequence& seq, Index i, Index j);
// cov_psi over i, j in [lo, hi].
Eigen::MatrixXd cov_psi_matrix(const CoefficientSequence& seq, Index lo, Index hi);
// ((1 - delta_ij)/sqrt(2) + delta_ij) theta_{|i-j|} over i, j in [lo, hi].
Eigen::MatrixXd toeplitz_cov_matrix(const CoefficientSequence& seq, Index lo, Index hi);

}  // namespace cvasym
