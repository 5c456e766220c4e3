#pragma once

#include <span>

#include "quda/linalg.hpp"
#include "quda/moments.hpp"

namespace quda {

struct DeltaConfig {
  int max_sweeps = 100000;
  /// Converged when no coordinate moves more than this in a full sweep.
  double tol = 1e-8;
};

struct DeltaSolution {
  Vector delta;
  Vector gamma_hat;
  double lambda_delta = 0.0;
  int iterations = 0;  ///< full sweeps
  double kkt_residual = 0.0;
  bool converged = false;
};

/// 4 (mu1 - mu2) + (S1 - S2) Omega (mu1 - mu2)
Vector compute_gamma_hat(const ClassMoments& m, const SymMatrix& omega);

/// Cyclic coordinate descent on 1/2 d'(S1 + S2)d - gamma'd + lambda_delta |d|_1.
/// `warm` (if non-empty) is the starting point.
DeltaSolution solve_delta(const ClassMoments& m, std::span<const double> gamma_hat,
                          double lambda_delta, const DeltaConfig& cfg = {},
                          std::span<const double> warm = {});

/// Same problem for an explicit quadratic term `a`.
DeltaSolution solve_lasso_quadratic(const SymMatrix& a, std::span<const double> gamma,
                                    double lambda, const DeltaConfig& cfg = {},
                                    std::span<const double> warm = {});

double lasso_objective(const SymMatrix& a, std::span<const double> gamma, double lambda,
                       std::span<const double> delta);
double kkt_residual_lasso(const SymMatrix& a, std::span<const double> gamma, double lambda,
                          std::span<const double> delta);

}  // namespace quda
