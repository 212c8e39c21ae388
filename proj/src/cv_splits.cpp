#include "cvasym/cv_splits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cvasym/errors.hpp"

namespace cvasym {

void validate_scheme(Index n, Index n_t, Index V) {
  if (V < 1) throw SchemeError("split scheme: V >= 1 violated");
  if (n_t < 1) throw SchemeError("split scheme: n_t >= 1 violated");
  if (n_t > n - 1) throw SchemeError("split scheme: n_t <= n-1 violated");
  if (V * (n - n_t) > n)
    throw SchemeError("split scheme: (V-1)/V*n <= n_t violated (" + std::to_string(V) + "*(" +
                      std::to_string(n) + "-" + std::to_string(n_t) + ") > " + std::to_string(n) + ")");
}

SplitScheme make_scheme(Index n, Index n_t, Index V, Rng& rng) {
  validate_scheme(n, n_t, V);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  const Index nv = n - n_t;
  SplitScheme s{n, n_t, V, {}};
  s.folds.reserve(static_cast<std::size_t>(V));
  std::vector<char> in_test(static_cast<std::size_t>(n));
  for (Index v = 0; v < V; ++v) {
    Fold f;
    f.test.assign(perm.begin() + v * nv, perm.begin() + (v + 1) * nv);
    std::sort(f.test.begin(), f.test.end());
    std::fill(in_test.begin(), in_test.end(), 0);
    for (Index i : f.test) in_test[static_cast<std::size_t>(i)] = 1;
    f.train.reserve(static_cast<std::size_t>(n_t));
    for (Index i = 0; i < n; ++i)
      if (!in_test[static_cast<std::size_t>(i)]) f.train.push_back(i);
    s.folds.push_back(std::move(f));
  }
  return s;
}

Eigen::VectorXd holdout_curve(const Sample& sample, const Fold& fold, Index k_max) {
  if (fold.train.empty() || fold.test.empty()) throw DataError("holdout: empty T or T^c");
  const Eigen::VectorXd tr = empirical_coeffs(sample, fold.train, k_max).theta_hat;
  const Eigen::VectorXd te = empirical_coeffs(sample, fold.test, k_max).theta_hat;
  Eigen::VectorXd out(k_max + 1);
  double acc = 0.0;
  for (Index j = 0; j <= k_max; ++j) {
    acc += tr[j] * (tr[j] - 2.0 * te[j]);
    out[j] = acc;
  }
  return out;
}

double holdout_crit(const Sample& sample, std::span<const Index> T, Index k) {
  if (k < 0) throw ParameterError("holdout_crit: negative k");
  const Index n = sample.size();
  std::vector<char> in_train(static_cast<std::size_t>(n), 0);
  Fold f;
  for (Index i : T) {
    if (i < 0 || i >= n) throw ParameterError("holdout_crit: index out of range");
    if (in_train[static_cast<std::size_t>(i)]) throw ParameterError("holdout_crit: duplicate index");
    in_train[static_cast<std::size_t>(i)] = 1;
    f.train.push_back(i);
  }
  for (Index i = 0; i < n; ++i)
    if (!in_train[static_cast<std::size_t>(i)]) f.test.push_back(i);
  return holdout_curve(sample, f, k)[k];
}

Eigen::VectorXd cv_curve(const Sample& sample, const SplitScheme& scheme, Index k_max) {
  if (scheme.folds.empty()) throw SchemeError("cv: scheme has no folds");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(k_max + 1);
  for (const Fold& f : scheme.folds) acc += holdout_curve(sample, f, k_max);
  return acc / static_cast<double>(scheme.folds.size());
}

double cv_crit(const Sample& sample, const SplitScheme& scheme, Index k) {
  if (k < 0) throw ParameterError("cv_crit: negative k");
  return cv_curve(sample, scheme, k)[k];
}

Selection select_k(const Eigen::Ref<const Eigen::VectorXd>& values) {
  if (values.size() == 0) throw DataError("select_k: empty criterion");
  for (Index k = 0; k < values.size(); ++k)
    if (std::isnan(values[k])) throw DataError("select_k: NaN criterion value at k=" + std::to_string(k));
  Selection s;
  const double m = values.minCoeff();
  for (Index k = 0; k < values.size(); ++k)
    if (values[k] == m) s.argmin_set.push_back(k);
  s.k = s.argmin_set.front();
  s.boundary_hit = s.k == values.size() - 1;
  return s;
}

RescaledProcesses rescaled_processes(const Sample& sample, const SplitScheme& scheme,
                                     const CoefficientSequence& seq, const ScalingSummary& sc,
                                     Index j_lo, Index j_hi) {
  if (j_lo < -sc.k_star || j_lo > 0 || j_hi < 0)
    throw ParameterError("rescaled_processes: need -k* <= j_lo <= 0 <= j_hi");
  if (!(sc.e_frak > 0.0)) throw ConstructionError("rescaled_processes: degenerate scaling");
  const Index ks = sc.k_star, k_max = ks + j_hi;
  const double delta = static_cast<double>(sc.delta);
  const Eigen::VectorXd theta = seq.theta_range(0, k_max);
  RescaledProcesses out;
  out.cv = GridFunction::zeros(j_lo, j_hi, delta);
  for (const Fold& f : scheme.folds) {
    const Eigen::VectorXd tr = empirical_coeffs(sample, f.train, k_max).theta_hat;
    const Eigen::VectorXd te = empirical_coeffs(sample, f.test, k_max).theta_hat;
    // per-index contributions to HO and to the excess risk
    auto ho_term = [&](Index i) { return tr[i] * (tr[i] - 2.0 * te[i]); };
    auto risk_term = [&](Index i) {
      const double d = tr[i] - theta[i];
      return d * d - theta[i] * theta[i];
    };
    GridFunction ho = GridFunction::zeros(j_lo, j_hi, delta);
    GridFunction L = GridFunction::zeros(j_lo, j_hi, delta);
    double acc_ho = 0.0, acc_L = 0.0;
    for (Index j = 1; j <= j_hi; ++j) {
      acc_ho += ho_term(ks + j);
      acc_L += risk_term(ks + j);
      ho.at(j) = acc_ho / sc.e_frak;
      L.at(j) = acc_L / sc.e_frak;
    }
    acc_ho = acc_L = 0.0;
    for (Index j = -1; j >= j_lo; --j) {
      acc_ho -= ho_term(ks + j + 1);
      acc_L -= risk_term(ks + j + 1);
      ho.at(j) = acc_ho / sc.e_frak;
      L.at(j) = acc_L / sc.e_frak;
    }
    GridFunction Z(j_lo, delta, L.values() - ho.values());
    out.cv.values() += ho.values();
    out.ho.push_back(std::move(ho));
    out.L.push_back(std::move(L));
    out.Z.push_back(std::move(Z));
  }
  out.cv.values() /= static_cast<double>(scheme.folds.size());
  return out;
}

}  // namespace cvasym
