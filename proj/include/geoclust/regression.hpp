#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "geoclust/geometry.hpp"
#include "geoclust/kernels.hpp"

namespace geoclust {

// Response and covariates with a leading all-ones intercept column.
struct DesignMatrix {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> names;  // names[0] == "intercept"

  std::size_t n() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(X.cols()); }
};

// Input column for design construction. Categorical columns are one-hot
// encoded against the baseline level; encoded columns are named
// "<name>=<level>" with levels in lexicographic order.
struct CovariateColumn {
  std::string name;
  bool categorical = false;
  std::string baseline;
  std::vector<double> numeric;
  std::vector<std::string> categories;
};

DesignMatrix build_design(const std::vector<double>& response,
                          const std::vector<CovariateColumn>& columns);

struct OlsFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd t_values;
  Eigen::VectorXd p_values;
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;
  double r2 = 0.0;
  double sigma2 = 0.0;  // residual variance, RSS / (n - p)
};

// Ordinary least squares via column-pivoted QR. Rank deficiency raises a
// singular-design error naming the dependent columns. p-values come from the
// t distribution with n - p degrees of freedom.
OlsFit ols_fit(const DesignMatrix& design);

// Weighted least-squares coefficients at location i: QR of sqrt(W) X against
// sqrt(W) y. Throws LocalSingularityError when fewer than p observations
// carry positive weight or the weighted design is rank deficient.
Eigen::VectorXd gwr_fit_at(std::size_t i, const DesignMatrix& design,
                           const Eigen::VectorXd& weights);

struct GwrFit {
  Eigen::MatrixXd beta;  // n x p, one coefficient row per location
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;
  Eigen::VectorXd local_r2;
  double quasi_global_r2 = 0.0;
  KernelSpec kernel;
  double cv_score = 0.0;
};

// Local fit at every location with kernel weights from `spec`. Local fits
// run in parallel; output does not depend on the thread count.
GwrFit gwr_fit(const DesignMatrix& design, const DistanceMatrix& dists,
               const KernelSpec& spec);

// Squared leave-one-out prediction error per location (weight on self forced
// to zero before refitting). Singular leave-one-out fits yield +infinity.
Eigen::VectorXd cv_prediction_errors(const DesignMatrix& design,
                                     const DistanceMatrix& dists,
                                     const KernelSpec& spec);

// Leave-one-out cross-validation score: the sum of squared prediction
// errors. Each singular location contributes `singular_penalty` (the default
// +infinity makes the whole bandwidth infeasible).
double cv_score(const DesignMatrix& design, const DistanceMatrix& dists,
                const KernelSpec& spec,
                double singular_penalty =
                    std::numeric_limits<double>::infinity());

struct BandwidthProbe {
  double value = 0.0;  // bandwidth or neighbor count
  double score = 0.0;
};

struct BandwidthSearchResult {
  KernelSpec best;
  double best_score = 0.0;
  std::vector<BandwidthProbe> probes;
};

// Bandwidth selection by LOO CV. Fixed Gaussian: golden-section search on
// log-bandwidth over [0.1 * min nonzero distance, 10 * max distance], 60
// iterations, returning the best probed value (ties toward the larger
// bandwidth). Adaptive bisquare: exhaustive scan of k in [p+2, n], smallest
// k on ties. Throws NumericalError when no probed bandwidth is feasible.
BandwidthSearchResult optimize_bandwidth_detailed(const DesignMatrix& design,
                                                  const DistanceMatrix& dists,
                                                  KernelKind kind);
KernelSpec optimize_bandwidth(const DesignMatrix& design,
                              const DistanceMatrix& dists, KernelKind kind);

// Geographically weighted R^2 at location i for coefficients beta_i:
// 1 - sum_j w_j r_j^2 / sum_j w_j (y_j - wmean(y))^2, clamped to [0, 1].
double local_r2(std::size_t i, const DesignMatrix& design,
                const Eigen::VectorXd& weights, const Eigen::VectorXd& beta_i);

// 1 - RSS / TSS over the GWR fitted values.
double quasi_global_r2(const GwrFit& fit, const Eigen::VectorXd& y);

}  // namespace geoclust
