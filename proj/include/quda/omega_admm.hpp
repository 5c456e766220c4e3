#pragma once

// ADMM for the l1-penalized differential precision objective
//
//   min_W  1/2 tr(W' S1 W S2) - tr(W (S1 - S2)) + lambda |W|_1
//
// split as W (smooth part) = Psi (penalized part) with scaled dual Lambda.
// The smooth update is closed form through the eigendecompositions of S1 and
// S2, which are computed once per solver.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "quda/linalg.hpp"
#include "quda/moments.hpp"

namespace quda {

struct AdmmConfig {
  /// Penalty parameter; unset selects default_rho() from the spectra.
  std::optional<double> rho;
  int max_iter = 500;
  double tol_abs = 1e-5;
  double tol_rel = 1e-4;

  void validate() const;
};

struct OmegaSolution {
  SymMatrix omega;   ///< (Psi + Psi') / 2, used by the classifier
  Matrix omega_raw;  ///< Psi at exit; exactly sparse
  double lambda = 0.0;
  double rho = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
  /// (i, j) with omega(i, j) != 0, row-major order.
  std::vector<std::pair<std::size_t, std::size_t>> support;
};

/// B(j, k) = 1 / (d1[j] * d2[k] + rho); negative eigenvalues are clamped to 0.
Matrix build_b_matrix(std::span<const double> d1, std::span<const double> d2, double rho);

/// U1 [B o (U1' A U2)] U2', the solution of S1 W S2 + rho W = A.
Matrix omega_update(const Matrix& a_k, const SymEigen& eig1, const SymEigen& eig2, const Matrix& b);

/// Geometric mean of the extreme nonzero eigenvalues of S2 (x) S1.
double default_rho(std::span<const double> d1, std::span<const double> d2);

/// Holds the factorizations and the (Psi, Lambda) state, so consecutive calls
/// to solve() warm-start from the previous penalty.
class OmegaSolver {
 public:
  OmegaSolver(const ClassMoments& m, const AdmmConfig& cfg);

  OmegaSolution solve(double lambda);
  void reset();

  double rho() const noexcept { return rho_; }
  std::size_t dim() const noexcept { return diff_.rows(); }

 private:
  AdmmConfig cfg_;
  Matrix diff_;
  SymEigen eig1_, eig2_;
  double rho_ = 0.0;
  Matrix b_;
  Matrix psi_, dual_;
};

/// Cold-start solve.
OmegaSolution solve_omega(const ClassMoments& m, double lambda, const AdmmConfig& cfg = {});

/// Largest violation of the stationarity and subgradient conditions at `omega`.
double kkt_residual_omega(const Matrix& omega, const ClassMoments& m, double lambda);

}  // namespace quda
