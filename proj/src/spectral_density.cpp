#include "cvasym/spectral_density.hpp"

#include <charconv>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "cvasym/errors.hpp"

namespace cvasym {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr Index kCertGrid = 20000;     // intervals on [0, 1/2]
constexpr Index kLipschitzCap = 1 << 20;

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

double psi(Index j, double x) {
  if (j == 0) return 1.0;
  return kSqrt2 * std::cos(2.0 * kPi * static_cast<double>(j) * x);
}

CoefficientSequence::CoefficientSequence(std::vector<double> head, TailRule tail)
    : head_(std::move(head)), tail_(tail) {
  if (head_.empty() || head_[0] != 1.0)
    throw ParameterError("CoefficientSequence: theta_0 must equal 1");
  for (double v : head_)
    if (!std::isfinite(v)) throw ParameterError("CoefficientSequence: non-finite coefficient");
  switch (tail_.kind) {
    case TailKind::zero:
      break;
    case TailKind::geometric:
      if (!(tail_.param > 0.0 && tail_.param < 1.0))
        throw ParameterError("geometric tail: ratio must lie in (0, 1)");
      break;
    case TailKind::polynomial:
      if (!(tail_.param > 0.5))
        throw ParameterError("polynomial tail: exponent must exceed 1/2 for square summability");
      li_cos_ = std::make_shared<PolylogSeries>(tail_.param);
      li_sin_ = std::make_shared<PolylogSeries>(tail_.param + 1.0);
      break;
  }
  const std::size_t m = head_.size();
  sq_suffix_.assign(m + 1, 0.0);
  abs_suffix_.assign(m + 1, 0.0);
  for (std::size_t i = m; i-- > 0;) {
    sq_suffix_[i] = sq_suffix_[i + 1] + head_[i] * head_[i];
    abs_suffix_[i] = abs_suffix_[i + 1] + std::abs(head_[i]);
  }
}

double CoefficientSequence::theta(Index j) const {
  if (j < 0) throw ParameterError("theta: negative index");
  if (j <= head_last()) return head_[static_cast<std::size_t>(j)];
  const double jd = static_cast<double>(j);
  switch (tail_.kind) {
    case TailKind::geometric:
      return tail_.scale * std::pow(tail_.param, jd);
    case TailKind::polynomial:
      return tail_.scale * std::pow(jd, -tail_.param);
    case TailKind::zero:
      break;
  }
  return 0.0;
}

double CoefficientSequence::tail_sq_sum(Index k) const {
  if (k < -1) throw ParameterError("tail_sq_sum: index below -1");
  const Index J = head_last();
  const Index m = std::max(k, J);
  double beyond = 0.0;
  const double a = tail_.scale, p = tail_.param;
  switch (tail_.kind) {
    case TailKind::geometric:
      beyond = a * a * std::pow(p, 2.0 * static_cast<double>(m + 1)) / (1.0 - p * p);
      break;
    case TailKind::polynomial:
      beyond = a * a * hurwitz_zeta(2.0 * p, static_cast<double>(m + 1));
      break;
    case TailKind::zero:
      break;
  }
  if (k < J) beyond += sq_suffix_[static_cast<std::size_t>(k + 1)];
  return beyond;
}

bool CoefficientSequence::ell1_finite() const {
  return tail_.kind != TailKind::polynomial || tail_.param > 1.0 || tail_.scale == 0.0;
}

double CoefficientSequence::abs_tail_sum(Index k) const {
  if (k < -1) throw ParameterError("abs_tail_sum: index below -1");
  if (!ell1_finite()) return kInf;
  const Index J = head_last();
  const Index m = std::max(k, J);
  double beyond = 0.0;
  const double a = std::abs(tail_.scale), p = tail_.param;
  switch (tail_.kind) {
    case TailKind::geometric:
      beyond = a * std::pow(p, static_cast<double>(m + 1)) / (1.0 - p);
      break;
    case TailKind::polynomial:
      beyond = a == 0.0 ? 0.0 : a * hurwitz_zeta(p, static_cast<double>(m + 1));
      break;
    case TailKind::zero:
      break;
  }
  if (k < J) beyond += abs_suffix_[static_cast<std::size_t>(k + 1)];
  return beyond;
}

bool CoefficientSequence::monotone_sq() const {
  const Index J = head_last();
  for (Index j = 1; j <= J; ++j) {
    const double next = theta_sq(j + 1);
    if (!geq_tol(theta_sq(j), next)) return false;
  }
  return true;  // closed-form tails are non-increasing
}

Eigen::VectorXd CoefficientSequence::theta_range(Index from, Index to) const {
  if (from < 0 || to < from - 1) throw ParameterError("theta_range: bad range");
  Eigen::VectorXd out(to - from + 1);
  for (Index j = from; j <= to; ++j) out[j - from] = theta(j);
  return out;
}

double CoefficientSequence::cos_series(double t) const {
  const Index J = head_last();
  double head_sum = 0.0;
  for (Index j = 1; j <= J; ++j) head_sum += head_[j] * std::cos(static_cast<double>(j) * t);
  switch (tail_.kind) {
    case TailKind::zero:
      return head_sum;
    case TailKind::geometric: {
      const std::complex<double> z = std::polar(tail_.param, t);
      const std::complex<double> zj = std::pow(z, static_cast<double>(J + 1));
      return head_sum + tail_.scale * std::real(zj / (1.0 - z));
    }
    case TailKind::polynomial: {
      double partial = 0.0;
      for (Index j = 1; j <= J; ++j)
        partial += std::pow(static_cast<double>(j), -tail_.param) * std::cos(static_cast<double>(j) * t);
      return head_sum + tail_.scale * (std::real((*li_cos_)(t)) - partial);
    }
  }
  return head_sum;
}

double CoefficientSequence::sin_over_j_series(double t) const {
  const Index J = head_last();
  double head_sum = 0.0;
  for (Index j = 1; j <= J; ++j)
    head_sum += head_[j] * std::sin(static_cast<double>(j) * t) / static_cast<double>(j);
  switch (tail_.kind) {
    case TailKind::zero:
      return head_sum;
    case TailKind::geometric: {
      const std::complex<double> z = std::polar(tail_.param, t);
      std::complex<double> acc = -std::log(1.0 - z);
      std::complex<double> zj = 1.0;
      for (Index j = 1; j <= J; ++j) {
        zj *= z;
        acc -= zj / static_cast<double>(j);
      }
      // scale * r^j with r^j already inside z^j
      return head_sum + tail_.scale * std::imag(acc);
    }
    case TailKind::polynomial: {
      double partial = 0.0;
      for (Index j = 1; j <= J; ++j) {
        const double jd = static_cast<double>(j);
        partial += std::pow(jd, -tail_.param - 1.0) * std::sin(jd * t);
      }
      return head_sum + tail_.scale * (std::imag((*li_sin_)(t)) - partial);
    }
  }
  return head_sum;
}

FamilySpec FamilySpec::parse(const std::string& text) {
  FamilySpec spec;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (kind == "uniform") spec.kind = FamilyKind::uniform;
  else if (kind == "geometric") spec.kind = FamilyKind::geometric;
  else if (kind == "polynomial") spec.kind = FamilyKind::polynomial;
  else if (kind == "plateau") spec.kind = FamilyKind::plateau;
  else throw ConfigError("unknown family kind: " + kind);
  if (colon == std::string::npos) return spec;
  std::stringstream rest(text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("family parameter without '=': " + item);
    const std::string key = item.substr(0, eq);
    double value = 0.0;
    try {
      value = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("family parameter not numeric: " + item);
    }
    if (key == "r" || key == "ratio") spec.params.ratio = value;
    else if (key == "beta" || key == "exponent") spec.params.exponent = value;
    else if (key == "kappa" || key == "scale") spec.params.scale = value;
    else if (key == "h" || key == "height") spec.params.height = value;
    else if (key == "u" || key == "width") spec.params.width = static_cast<Index>(std::llround(value));
    else throw ConfigError("unknown family parameter: " + key);
  }
  return spec;
}

std::string FamilySpec::to_string() const {
  switch (kind) {
    case FamilyKind::uniform:
      return "uniform";
    case FamilyKind::geometric:
      return "geometric:r=" + fmt_double(params.ratio);
    case FamilyKind::polynomial:
      return "polynomial:beta=" + fmt_double(params.exponent) + ",kappa=" + fmt_double(params.scale);
    case FamilyKind::plateau:
      return "plateau:h=" + fmt_double(params.height) + ",u=" + std::to_string(params.width);
  }
  return "uniform";
}

CoefficientSequence make_family(FamilyKind kind, const FamilyParams& params) {
  switch (kind) {
    case FamilyKind::uniform:
      return CoefficientSequence({1.0});
    case FamilyKind::geometric:
      if (!(params.ratio > 0.0 && params.ratio < 1.0))
        throw ParameterError("geometric family: need 0 < r < 1");
      return CoefficientSequence({1.0}, TailRule::geometric(params.ratio));
    case FamilyKind::polynomial:
      if (!(params.exponent > 1.0)) throw ParameterError("polynomial family: need beta > 1");
      if (!(params.scale > 0.0)) throw ParameterError("polynomial family: need kappa > 0");
      return CoefficientSequence({1.0}, TailRule::polynomial(params.exponent, params.scale));
    case FamilyKind::plateau: {
      if (!(params.height > 0.0)) throw ParameterError("plateau family: need h > 0");
      if (params.width < 0) throw ParameterError("plateau family: need u >= 0");
      std::vector<double> head(static_cast<std::size_t>(params.width) + 1, std::sqrt(params.height));
      head[0] = 1.0;
      return CoefficientSequence(std::move(head));
    }
  }
  throw ParameterError("make_family: unknown kind");
}

double density_eval(const CoefficientSequence& seq, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("density_eval: x outside [0, 1]");
  if (!seq.ell1_finite()) throw UnsupportedError("density_eval: coefficients not absolutely summable");
  return 1.0 + kSqrt2 * seq.cos_series(2.0 * kPi * x);
}

double cdf_eval(const CoefficientSequence& seq, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("cdf_eval: x outside [0, 1]");
  if (x > 0.5) return 1.0 - cdf_eval(seq, 1.0 - x);
  return x + kSqrt2 / (2.0 * kPi) * seq.sin_over_j_series(2.0 * kPi * x);
}

DensityModel make_density_model(const CoefficientSequence& seq) {
  if (!seq.ell1_finite())
    throw UnsupportedError("make_density_model: coefficients not absolutely summable");
  DensityModel m{seq};
  m.l2_norm_sq = seq.l2_norm_sq();
  m.ell1_norm = seq.ell1_norm();

  // s is symmetric about 1/2, so a grid on [0, 1/2] covers [0, 1].
  const double h = 0.5 / static_cast<double>(kCertGrid);
  double max_abs = 0.0, min_val = kInf;
  for (Index i = 0; i <= kCertGrid; ++i) {
    const double v = density_eval(seq, static_cast<double>(i) * h);
    max_abs = std::max(max_abs, std::abs(v));
    min_val = std::min(min_val, v);
  }

  // Split s = s_J + t_J: |t_J| <= sqrt2 sum_{j>J}|theta_j|, and s_J is
  // Lipschitz with constant 2 sqrt2 pi sum_{j<=J} j |theta_j|.
  double best = kInf;
  double weighted = 0.0;
  Index next_check = 0;
  for (Index J = 0; J <= kLipschitzCap; ++J) {
    if (J > 0) weighted += static_cast<double>(J) * std::abs(seq.theta(J));
    if (J != next_check) continue;
    next_check = next_check == 0 ? 1 : 2 * next_check;
    const double tau = kSqrt2 * seq.abs_tail_sum(J);
    const double slack = 2.0 * kSqrt2 * kPi * weighted * h / 2.0 + 2.0 * tau;
    best = std::min(best, slack);
    if (tau < 1e-18 && J >= seq.head_last()) break;
  }
  m.sup_norm_lower = max_abs;
  m.sup_norm = std::min(max_abs + best, 1.0 + kSqrt2 * seq.abs_tail_sum(0));
  m.min_lower = min_val - best;
  m.nonneg_certified = m.min_lower >= 0.0;
  return m;
}

std::vector<double> sample_density(const DensityModel& model, Index n, Rng& rng) {
  if (n < 0) throw ParameterError("sample_density: negative sample size");
  if (!model.nonneg_certified)
    throw DomainError("sample_density: density not certified nonnegative");
  const double envelope = 1.0 + kSqrt2 * model.seq.abs_tail_sum(0);
  if (1.0 / envelope < 1e-3) throw UnsupportedError("sample_density: acceptance rate below 1e-3");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  while (static_cast<Index>(out.size()) < n) {
    const double x = unif(rng);
    const double u = unif(rng);
    if (u * envelope <= density_eval(model.seq, x)) out.push_back(x);
  }
  return out;
}

double cov_psi(const CoefficientSequence& seq, Index i, Index j) {
  if (i < 0 || j < 0) throw ParameterError("cov_psi: negative index");
  if (i == 0 || j == 0) return 0.0;
  const double c = i == j ? 1.0 : 1.0 / kSqrt2;
  return seq.theta(i + j) / kSqrt2 + c * seq.theta(std::abs(i - j)) - seq.theta(i) * seq.theta(j);
}

Eigen::MatrixXd cov_psi_matrix(const CoefficientSequence& seq, Index lo, Index hi) {
  if (lo < 0 || hi < lo) throw ParameterError("cov_psi_matrix: bad range");
  const Index m = hi - lo + 1;
  const Eigen::VectorXd th = seq.theta_range(0, 2 * hi);
  Eigen::MatrixXd out(m, m);
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) {
      const Index i = lo + a, j = lo + b;
      if (i == 0 || j == 0) {
        out(a, b) = 0.0;
        continue;
      }
      const double c = i == j ? 1.0 : 1.0 / kSqrt2;
      out(a, b) = th[i + j] / kSqrt2 + c * th[std::abs(i - j)] - th[i] * th[j];
    }
  }
  return out;
}

Eigen::MatrixXd toeplitz_cov_matrix(const CoefficientSequence& seq, Index lo, Index hi) {
  if (lo < 0 || hi < lo) throw ParameterError("toeplitz_cov_matrix: bad range");
  const Index m = hi - lo + 1;
  const Eigen::VectorXd th = seq.theta_range(0, m - 1);
  Eigen::MatrixXd out(m, m);
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) out(a, b) = a == b ? 1.0 : th[std::abs(a - b)] / kSqrt2;
  return out;
}

}  // namespace cvasym
