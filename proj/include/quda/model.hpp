#pragma once

// The fitted quadratic rule
//
//   D(z) = (z - mu)' Omega (z - mu) + delta' (z - mu) + eta,
//
// which assigns class 1 when D(z) > 0 and class 2 otherwise, plus the Bayes
// rule computed from known Gaussian parameters.

#include <cstddef>
#include <span>

#include "quda/delta_cd.hpp"
#include "quda/linalg.hpp"
#include "quda/moments.hpp"
#include "quda/omega_admm.hpp"

namespace quda {

struct FitDiagnostics {
  double rho = 0.0;
  int admm_iterations = 0;
  double admm_primal_residual = 0.0;
  double admm_dual_residual = 0.0;
  bool admm_converged = true;
  int cd_sweeps = 0;
  double cd_kkt_residual = 0.0;
  bool cd_converged = true;
  double insample_error = 0.0;
  std::size_t n1 = 0, n2 = 0;
};

struct QudaModel {
  Vector mu;  ///< midpoint of the class means
  SymMatrix omega;
  Vector delta;
  double eta = 0.0;
  double lambda = 0.0;
  double lambda_delta = 0.0;
  FitDiagnostics diagnostics;

  std::size_t dim() const noexcept { return mu.size(); }
  void validate() const;
};

/// Ground-truth Gaussian parameters and the Bayes components derived from them.
struct SyntheticTruth {
  Vector mu1, mu2;
  SymMatrix sigma1, sigma2;
  SymMatrix omega_true;  ///< inv(sigma2) - inv(sigma1)
  Vector delta_true;     ///< (inv(sigma1) + inv(sigma2)) (mu1 - mu2)
  double pi1 = 0.5, pi2 = 0.5;

  std::size_t dim() const noexcept { return mu1.size(); }
};

double discriminant(const QudaModel& model, std::span<const double> z);
/// 1 if discriminant(z) > 0, else 2.
int classify(const QudaModel& model, std::span<const double> z);

/// Assembles the rule from already-solved Omega and delta: scores `train` and
/// searches the intercept on it.
QudaModel assemble_model(const ClassMoments& m, const OmegaSolution& omega,
                         const DeltaSolution& delta, const LabeledDataset& train);

/// moments -> Omega (ADMM) -> gamma -> delta (lasso) -> intercept scan.
QudaModel fit(const LabeledDataset& data, double lambda, double lambda_delta,
              const AdmmConfig& cfg = {});

/// Bayes rule for known parameters, with the precision matrices and log
/// determinants factored once.
class OracleRule {
 public:
  explicit OracleRule(const SyntheticTruth& truth);

  /// log(pi1 f1(z)) - log(pi2 f2(z)), dropping the shared constant.
  double log_ratio(std::span<const double> z) const;
  int classify(std::span<const double> z) const { return log_ratio(z) > 0.0 ? 1 : 2; }

 private:
  Vector mu1_, mu2_;
  SymMatrix prec1_, prec2_;
  double offset_ = 0.0;
};

int oracle_classify(const SyntheticTruth& truth, std::span<const double> z);

/// Rule built from the true components with the analytic intercept
/// 2 log(pi1/pi2) + 1/4 dmu' Omega dmu + log|S2| - log|S1|.
QudaModel model_from_truth(const SyntheticTruth& truth);

}  // namespace quda
