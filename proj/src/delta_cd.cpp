#include "quda/delta_cd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quda/error.hpp"

namespace quda {

Vector compute_gamma_hat(const ClassMoments& m, const SymMatrix& omega) {
  const std::size_t p = m.p();
  if (omega.dim() != p || m.mu2.size() != p || m.sigma1.dim() != p || m.sigma2.dim() != p) {
    throw Error(Errc::ShapeMismatch, "compute_gamma_hat: omega is " + std::to_string(omega.dim()) +
                                         "-dimensional, moments are " + std::to_string(p));
  }
  Vector diff(p);
  for (std::size_t j = 0; j < p; ++j) diff[j] = m.mu1[j] - m.mu2[j];
  const Vector w = mat_vec(omega.matrix(), diff);
  const Vector sw = mat_vec(m.sigma_diff(), w);
  Vector gamma(p);
  for (std::size_t j = 0; j < p; ++j) gamma[j] = 4.0 * diff[j] + sw[j];
  return gamma;
}

double lasso_objective(const SymMatrix& a, std::span<const double> gamma, double lambda,
                       std::span<const double> delta) {
  const Vector ad = mat_vec(a.matrix(), delta);
  double l1 = 0.0;
  for (double d : delta) l1 += std::abs(d);
  return 0.5 * dot(delta, ad) - dot(gamma, delta) + lambda * l1;
}

double kkt_residual_lasso(const SymMatrix& a, std::span<const double> gamma, double lambda,
                          std::span<const double> delta) {
  const Vector ad = mat_vec(a.matrix(), delta);
  double worst = 0.0;
  for (std::size_t j = 0; j < delta.size(); ++j) {
    const double g = gamma[j] - ad[j];
    const double v = delta[j] != 0.0 ? std::abs(g - lambda * (delta[j] > 0.0 ? 1.0 : -1.0))
                                     : std::max(std::abs(g) - lambda, 0.0);
    worst = std::max(worst, v);
  }
  return worst;
}

DeltaSolution solve_lasso_quadratic(const SymMatrix& a, std::span<const double> gamma,
                                    double lambda, const DeltaConfig& cfg,
                                    std::span<const double> warm) {
  const std::size_t p = a.dim();
  if (gamma.size() != p || (!warm.empty() && warm.size() != p)) {
    throw Error(Errc::ShapeMismatch, "solve_delta: quadratic term is " + std::to_string(p) +
                                         "-dimensional, gamma has " + std::to_string(gamma.size()));
  }
  if (!(lambda >= 0.0)) {
    throw Error(Errc::InvalidArgument, "lambda_delta must be nonnegative, got " + std::to_string(lambda));
  }
  for (std::size_t j = 0; j < p; ++j)
    if (!(a(j, j) > Tolerances::zero_diagonal)) {
      throw Error(Errc::ZeroDiagonal, "variable " + std::to_string(j) +
                                          " has no variance in either class");
    }

  DeltaSolution out;
  out.gamma_hat.assign(gamma.begin(), gamma.end());
  out.lambda_delta = lambda;
  out.delta = warm.empty() ? Vector(p, 0.0) : Vector(warm.begin(), warm.end());

  // residual = gamma - A delta, updated incrementally.
  Vector residual = mat_vec(a.matrix(), out.delta);
  for (std::size_t j = 0; j < p; ++j) residual[j] = gamma[j] - residual[j];

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    double max_step = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double ajj = a(j, j);
      const double old = out.delta[j];
      const double next = soft_threshold(residual[j] + ajj * old, lambda) / ajj;
      const double step = next - old;
      if (step == 0.0) continue;
      out.delta[j] = next;
      auto col = a.matrix().row(j);
      for (std::size_t k = 0; k < p; ++k) residual[k] -= col[k] * step;
      max_step = std::max(max_step, std::abs(step));
    }
    out.iterations = sweep;
    if (max_step < cfg.tol) {
      out.converged = true;
      break;
    }
  }
  out.kkt_residual = kkt_residual_lasso(a, gamma, lambda, out.delta);
  return out;
}

DeltaSolution solve_delta(const ClassMoments& m, std::span<const double> gamma_hat,
                          double lambda_delta, const DeltaConfig& cfg,
                          std::span<const double> warm) {
  const SymMatrix a = SymMatrix::symmetrized(m.sigma1.matrix() + m.sigma2.matrix());
  return solve_lasso_quadratic(a, gamma_hat, lambda_delta, cfg, warm);
}

}  // namespace quda
