#include "geoclust/regression.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "geoclust/errors.hpp"
#include "geoclust/parallel.hpp"
#include "geoclust/stats.hpp"

namespace geoclust {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_design(const DesignMatrix& d) {
  if (d.X.rows() != d.y.size())
    throw ValidationError("design matrix and response length differ");
  if (d.X.cols() < 1) throw ValidationError("design matrix has no columns");
  if (!d.names.empty() && d.names.size() != d.p())
    throw ValidationError("design matrix has " + std::to_string(d.p()) +
                          " columns but " + std::to_string(d.names.size()) +
                          " names");
}

std::string column_name(const DesignMatrix& d, Eigen::Index j) {
  const auto idx = static_cast<std::size_t>(j);
  return idx < d.names.size() ? d.names[idx] : "column " + std::to_string(j);
}

}  // namespace

DesignMatrix build_design(const std::vector<double>& response,
                          const std::vector<CovariateColumn>& columns) {
  const std::size_t n = response.size();
  if (n == 0) throw ValidationError("empty response");

  struct Encoded {
    std::string name;
    std::vector<double> values;
  };
  std::vector<Encoded> encoded;
  for (const CovariateColumn& col : columns) {
    if (!col.categorical) {
      if (col.numeric.size() != n)
        throw ValidationError("covariate '" + col.name + "' has " +
                              std::to_string(col.numeric.size()) +
                              " values, expected " + std::to_string(n));
      encoded.push_back({col.name, col.numeric});
      continue;
    }
    if (col.categories.size() != n)
      throw ValidationError("covariate '" + col.name + "' has " +
                            std::to_string(col.categories.size()) +
                            " values, expected " + std::to_string(n));
    std::set<std::string> levels(col.categories.begin(), col.categories.end());
    if (!levels.count(col.baseline))
      throw ValidationError("baseline level '" + col.baseline +
                            "' not present among values of covariate '" +
                            col.name + "'");
    for (const std::string& level : levels) {
      if (level == col.baseline) continue;
      Encoded e{col.name + "=" + level, std::vector<double>(n, 0.0)};
      for (std::size_t i = 0; i < n; ++i)
        if (col.categories[i] == level) e.values[i] = 1.0;
      encoded.push_back(std::move(e));
    }
  }

  DesignMatrix d;
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(encoded.size() + 1);
  d.X = Eigen::MatrixXd::Ones(rows, cols);
  d.y = Eigen::VectorXd(rows);
  d.names.reserve(encoded.size() + 1);
  d.names.push_back("intercept");
  for (std::size_t i = 0; i < n; ++i)
    d.y[static_cast<Eigen::Index>(i)] = response[i];
  for (std::size_t c = 0; c < encoded.size(); ++c) {
    d.names.push_back(encoded[c].name);
    for (std::size_t i = 0; i < n; ++i)
      d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c + 1)) =
          encoded[c].values[i];
  }
  return d;
}

OlsFit ols_fit(const DesignMatrix& design) {
  check_design(design);
  const auto n = static_cast<Eigen::Index>(design.n());
  const auto p = static_cast<Eigen::Index>(design.p());
  if (n <= p)
    throw ValidationError("OLS needs n > p (n = " + std::to_string(n) +
                          ", p = " + std::to_string(p) + ")");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.X);
  if (qr.rank() < p) {
    const auto& perm = qr.colsPermutation().indices();
    std::string msg = "singular design matrix; dependent columns:";
    for (Eigen::Index j = qr.rank(); j < p; ++j)
      msg += " '" + column_name(design, perm[j]) + "'";
    throw NumericalError(msg);
  }

  OlsFit fit;
  fit.coefficients = qr.solve(design.y);
  fit.fitted = design.X * fit.coefficients;
  fit.residuals = design.y - fit.fitted;

  const double rss = fit.residuals.squaredNorm();
  const double mean = design.y.mean();
  const double tss = (design.y.array() - mean).square().sum();
  fit.r2 = tss > 0.0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 0.0;
  fit.sigma2 = rss / static_cast<double>(n - p);

  // (X'X)^-1 = P R^-1 R^-T P' from the pivoted factorization.
  const Eigen::MatrixXd r =
      qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd rinv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd cov_pivoted = rinv * rinv.transpose();
  const Eigen::MatrixXd cov = qr.colsPermutation() * cov_pivoted *
                              qr.colsPermutation().transpose();

  fit.std_errors = (fit.sigma2 * cov.diagonal().array()).sqrt();
  fit.t_values = Eigen::VectorXd(p);
  fit.p_values = Eigen::VectorXd(p);
  const double dof = static_cast<double>(n - p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double se = fit.std_errors[j];
    double t;
    if (se > 0.0) {
      t = fit.coefficients[j] / se;
    } else {
      t = fit.coefficients[j] == 0.0 ? 0.0 : kInf;
    }
    fit.t_values[j] = t;
    fit.p_values[j] = student_t_two_sided_p(t, dof);
  }
  return fit;
}

Eigen::VectorXd gwr_fit_at(std::size_t i, const DesignMatrix& design,
                           const Eigen::VectorXd& weights) {
  check_design(design);
  const auto n = static_cast<Eigen::Index>(design.n());
  const auto p = static_cast<Eigen::Index>(design.p());
  if (weights.size() != n)
    throw ValidationError("weight vector length != n");

  Eigen::Index positive = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (weights[j] < 0.0 || !std::isfinite(weights[j]))
      throw ValidationError("weights must be finite and nonnegative");
    if (weights[j] > 0.0) ++positive;
  }
  if (positive < p) {
    throw LocalSingularityError(
        i, "local fit at location " + std::to_string(i) + ": only " +
               std::to_string(positive) + " positive-weight observations for " +
               std::to_string(p) + " coefficients");
  }

  const Eigen::VectorXd sqrt_w = weights.cwiseSqrt();
  const Eigen::MatrixXd xw = sqrt_w.asDiagonal() * design.X;
  const Eigen::VectorXd yw = sqrt_w.cwiseProduct(design.y);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xw);
  if (qr.rank() < p) {
    throw LocalSingularityError(
        i, "local fit at location " + std::to_string(i) +
               ": weighted design is rank deficient");
  }
  return qr.solve(yw);
}

double local_r2(std::size_t i, const DesignMatrix& design,
                const Eigen::VectorXd& weights,
                const Eigen::VectorXd& beta_i) {
  check_design(design);
  if (weights.size() != static_cast<Eigen::Index>(design.n()))
    throw ValidationError("weight vector length != n");
  const double wsum = weights.sum();
  if (!(wsum > 0.0))
    throw NumericalError("local R^2 at location " + std::to_string(i) +
                         ": zero total weight");
  const double wmean = weights.dot(design.y) / wsum;
  const Eigen::ArrayXd dev = design.y.array() - wmean;
  const double denom = (weights.array() * dev.square()).sum();
  if (denom <= 0.0)
    throw NumericalError("local R^2 at location " + std::to_string(i) +
                         ": zero weighted variance");
  const Eigen::ArrayXd resid = (design.y - design.X * beta_i).array();
  const double num = (weights.array() * resid.square()).sum();
  return std::clamp(1.0 - num / denom, 0.0, 1.0);
}

double quasi_global_r2(const GwrFit& fit, const Eigen::VectorXd& y) {
  if (fit.residuals.size() != y.size())
    throw ValidationError("fit/response length mismatch");
  const double tss = (y.array() - y.mean()).square().sum();
  if (tss <= 0.0)
    throw NumericalError("quasi-global R^2 undefined: response has zero variance");
  return 1.0 - fit.residuals.squaredNorm() / tss;
}

GwrFit gwr_fit(const DesignMatrix& design, const DistanceMatrix& dists,
               const KernelSpec& spec) {
  check_design(design);
  const std::size_t n = design.n();
  if (static_cast<std::size_t>(dists.rows()) != n ||
      static_cast<std::size_t>(dists.cols()) != n)
    throw ValidationError("distance matrix does not match design rows");
  spec.validate(n);

  GwrFit fit;
  fit.kernel = spec;
  fit.beta = Eigen::MatrixXd(design.X.rows(), design.X.cols());
  fit.fitted = Eigen::VectorXd(design.X.rows());
  fit.local_r2 = Eigen::VectorXd(design.X.rows());

  parallel_for(n, [&](std::size_t i) {
    const Eigen::VectorXd w = weights_for_location(i, dists, spec);
    const Eigen::VectorXd beta_i = gwr_fit_at(i, design, w);
    const auto row = static_cast<Eigen::Index>(i);
    fit.beta.row(row) = beta_i.transpose();
    fit.fitted[row] = design.X.row(row).dot(beta_i);
    fit.local_r2[row] = local_r2(i, design, w, beta_i);
  });

  fit.residuals = design.y - fit.fitted;
  fit.quasi_global_r2 = quasi_global_r2(fit, design.y);
  fit.cv_score = cv_score(design, dists, spec);
  return fit;
}

Eigen::VectorXd cv_prediction_errors(const DesignMatrix& design,
                                     const DistanceMatrix& dists,
                                     const KernelSpec& spec) {
  check_design(design);
  const std::size_t n = design.n();
  if (static_cast<std::size_t>(dists.rows()) != n ||
      static_cast<std::size_t>(dists.cols()) != n)
    throw ValidationError("distance matrix does not match design rows");
  spec.validate(n);

  Eigen::VectorXd errors(static_cast<Eigen::Index>(n));
  parallel_for(n, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    Eigen::VectorXd w;
    try {
      w = weights_for_location(i, dists, spec);
    } catch (const NumericalError&) {
      errors[row] = kInf;  // degenerate local bandwidth
      return;
    }
    w[row] = 0.0;  // leave the location itself out
    try {
      const Eigen::VectorXd beta_i = gwr_fit_at(i, design, w);
      const double pred = design.X.row(row).dot(beta_i);
      const double err = design.y[row] - pred;
      errors[row] = err * err;
    } catch (const LocalSingularityError&) {
      errors[row] = kInf;
    }
  });
  return errors;
}

double cv_score(const DesignMatrix& design, const DistanceMatrix& dists,
                const KernelSpec& spec, double singular_penalty) {
  const Eigen::VectorXd errors = cv_prediction_errors(design, dists, spec);
  double score = 0.0;
  for (Eigen::Index i = 0; i < errors.size(); ++i) {
    if (std::isinf(errors[i])) {
      if (std::isinf(singular_penalty)) return kInf;
      score += singular_penalty;
    } else {
      score += errors[i];
    }
  }
  return score;
}

BandwidthSearchResult optimize_bandwidth_detailed(const DesignMatrix& design,
                                                  const DistanceMatrix& dists,
                                                  KernelKind kind) {
  check_design(design);
  const std::size_t n = design.n();
  const std::size_t p = design.p();
  if (static_cast<std::size_t>(dists.rows()) != n)
    throw ValidationError("distance matrix does not match design rows");

  BandwidthSearchResult result;

  // CV scores at the double-precision noise floor rank as exact zeros: a
  // leave-one-out RMS error below ~1e-9 of the response scale is rounding,
  // not signal, and must not drive the choice of bandwidth.
  const double score_floor = 1e-18 * design.y.squaredNorm();
  auto effective = [&](double score) {
    return score <= score_floor ? 0.0 : score;
  };

  if (kind == KernelKind::adaptive_bisquare) {
    if (n < p + 3)
      throw NumericalError(
          "no feasible bandwidth: adaptive scan range [p+2, n] is empty (n = " +
          std::to_string(n) + ", p = " + std::to_string(p) + ")");
    int best_k = -1;
    double best_eff = kInf;
    double best_raw = kInf;
    for (std::size_t k = p + 2; k <= n; ++k) {
      const double score =
          cv_score(design, dists, KernelSpec::adaptive_bisquare(static_cast<int>(k)));
      result.probes.push_back({static_cast<double>(k), score});
      if (effective(score) < best_eff) {  // strict: smallest k wins ties
        best_eff = effective(score);
        best_raw = score;
        best_k = static_cast<int>(k);
      }
    }
    if (best_k < 0 || std::isinf(best_eff))
      throw NumericalError(
          "no feasible bandwidth: every adaptive neighbor count gave a "
          "singular leave-one-out fit");
    result.best = KernelSpec::adaptive_bisquare(best_k);
    result.best_score = best_raw;
    return result;
  }

  // Fixed Gaussian: golden-section search on log-bandwidth.
  double min_nonzero = kInf;
  double max_dist = 0.0;
  for (Eigen::Index i = 0; i < dists.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < dists.cols(); ++j) {
      const double d = dists(i, j);
      if (d > 0.0) min_nonzero = std::min(min_nonzero, d);
      max_dist = std::max(max_dist, d);
    }
  }
  if (!std::isfinite(min_nonzero) || max_dist <= 0.0)
    throw NumericalError(
        "no feasible bandwidth: all centroid distances are zero");

  double best_bw = 0.0;
  double best_eff = kInf;
  double best_raw = kInf;
  auto probe = [&](double log_bw) {
    const double bw = std::exp(log_bw);
    const double score =
        cv_score(design, dists, KernelSpec::fixed_gaussian(bw));
    result.probes.push_back({bw, score});
    const double eff = effective(score);
    if (eff < best_eff || (eff == best_eff && bw > best_bw)) {
      best_eff = eff;
      best_raw = score;
      best_bw = bw;
    }
    return score;
  };

  double lo = std::log(0.1 * min_nonzero);
  double hi = std::log(10.0 * max_dist);
  probe(lo);
  probe(hi);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = probe(x1);
  double f2 = probe(x2);
  for (int iter = 0; iter < 60; ++iter) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = probe(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = probe(x2);
    }
  }

  if (std::isinf(best_eff))
    throw NumericalError(
        "no feasible bandwidth: every probed bandwidth gave a singular "
        "leave-one-out fit");
  result.best = KernelSpec::fixed_gaussian(best_bw);
  result.best_score = best_raw;
  return result;
}

KernelSpec optimize_bandwidth(const DesignMatrix& design,
                              const DistanceMatrix& dists, KernelKind kind) {
  return optimize_bandwidth_detailed(design, dists, kind).best;
}

}  // namespace geoclust
