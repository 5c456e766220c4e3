#include "quda/omega_admm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quda/error.hpp"
#include "quda/kernels.hpp"

namespace quda {

void AdmmConfig::validate() const {
  if (rho && !(*rho > 0.0)) throw Error(Errc::NonPositiveRho, "rho = " + std::to_string(*rho));
  if (max_iter < 1) throw Error(Errc::InvalidArgument, "max_iter must be positive");
  if (!(tol_abs > 0.0) || !(tol_rel > 0.0)) {
    throw Error(Errc::InvalidArgument, "ADMM tolerances must be positive");
  }
}

Matrix build_b_matrix(std::span<const double> d1, std::span<const double> d2, double rho) {
  if (!(rho > 0.0)) throw Error(Errc::NonPositiveRho, "rho = " + std::to_string(rho));
  Matrix b(d1.size(), d2.size());
  for (std::size_t j = 0; j < d1.size(); ++j) {
    const double a = std::max(d1[j], 0.0);
    for (std::size_t k = 0; k < d2.size(); ++k) b(j, k) = 1.0 / (a * std::max(d2[k], 0.0) + rho);
  }
  return b;
}

Matrix omega_update(const Matrix& a_k, const SymEigen& eig1, const SymEigen& eig2, const Matrix& b) {
  const std::size_t p = a_k.rows();
  if (a_k.cols() != p || eig1.vectors.rows() != p || eig2.vectors.rows() != p || b.rows() != p ||
      b.cols() != p) {
    throw Error(Errc::ShapeMismatch, "omega_update: operands must all be " + std::to_string(p) +
                                         "x" + std::to_string(p));
  }
  Matrix w = kernels::multiply(kernels::multiply_tn(eig1.vectors, a_k), eig2.vectors);
  auto wd = w.data();
  auto bd = b.data();
  for (std::size_t k = 0; k < wd.size(); ++k) wd[k] *= bd[k];
  return kernels::multiply_nt(kernels::multiply(eig1.vectors, w), eig2.vectors);
}

double default_rho(std::span<const double> d1, std::span<const double> d2) {
  constexpr double eps = 1e-8;
  auto extremes = [](std::span<const double> d) {
    double hi = 0.0;
    for (double v : d) hi = std::max(hi, v);
    double lo = hi;
    for (double v : d)
      if (v > Tolerances::rank_relative * hi) lo = std::min(lo, v);
    return std::pair{hi, lo};
  };
  const auto [hi1, lo1] = extremes(d1);
  const auto [hi2, lo2] = extremes(d2);
  return std::sqrt((hi1 * hi2 + eps) * (lo1 * lo2 + eps));
}

OmegaSolver::OmegaSolver(const ClassMoments& m, const AdmmConfig& cfg)
    : cfg_(cfg), diff_(m.sigma_diff()) {
  cfg_.validate();
  if (m.sigma1.dim() != m.sigma2.dim()) {
    throw Error(Errc::ShapeMismatch, "class covariances differ in dimension");
  }
  eig1_ = sym_eigen(m.sigma1);
  eig2_ = sym_eigen(m.sigma2);
  rho_ = cfg_.rho ? *cfg_.rho : default_rho(eig1_.values, eig2_.values);
  b_ = build_b_matrix(eig1_.values, eig2_.values, rho_);
  reset();
}

void OmegaSolver::reset() {
  psi_ = Matrix(dim(), dim());
  dual_ = Matrix(dim(), dim());
}

OmegaSolution OmegaSolver::solve(double lambda) {
  if (!(lambda >= 0.0)) {
    throw Error(Errc::InvalidArgument, "lambda must be nonnegative, got " + std::to_string(lambda));
  }
  const std::size_t p = dim();
  const double threshold = lambda / rho_;
  const double pd = static_cast<double>(p);

  OmegaSolution out;
  out.lambda = lambda;
  out.rho = rho_;
  Matrix a(p, p);
  Matrix omega;
  for (int it = 1; it <= cfg_.max_iter; ++it) {
    {
      auto ad = a.data();
      auto dd = diff_.data();
      auto ld = dual_.data();
      auto sd = psi_.data();
      for (std::size_t k = 0; k < ad.size(); ++k) ad[k] = dd[k] - ld[k] + rho_ * sd[k];
    }
    omega = omega_update(a, eig1_, eig2_, b_);

    double r2 = 0.0, s2 = 0.0, omega2 = 0.0, psi2 = 0.0, dual2 = 0.0;
    auto od = omega.data();
    auto sd = psi_.data();
    auto ld = dual_.data();
    for (std::size_t k = 0; k < od.size(); ++k) {
      const double next = soft_threshold(od[k] + ld[k] / rho_, threshold);
      const double step = next - sd[k];
      sd[k] = next;
      const double gap = od[k] - next;
      ld[k] += rho_ * gap;
      r2 += gap * gap;
      s2 += step * step;
      omega2 += od[k] * od[k];
      psi2 += next * next;
      dual2 += ld[k] * ld[k];
    }
    out.iterations = it;
    out.primal_residual = std::sqrt(r2);
    out.dual_residual = rho_ * std::sqrt(s2);
    const double eps_primal = pd * cfg_.tol_abs + cfg_.tol_rel * std::sqrt(std::max(omega2, psi2));
    const double eps_dual = pd * cfg_.tol_abs + cfg_.tol_rel * std::sqrt(dual2);
    if (out.primal_residual <= eps_primal && out.dual_residual <= eps_dual) {
      out.converged = true;
      break;
    }
  }

  out.omega_raw = psi_;
  out.omega = SymMatrix::symmetrized(psi_);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      if (out.omega(i, j) != 0.0) out.support.emplace_back(i, j);
  return out;
}

OmegaSolution solve_omega(const ClassMoments& m, double lambda, const AdmmConfig& cfg) {
  OmegaSolver solver(m, cfg);
  return solver.solve(lambda);
}

double kkt_residual_omega(const Matrix& omega, const ClassMoments& m, double lambda) {
  const std::size_t p = m.p();
  if (omega.rows() != p || omega.cols() != p) {
    throw Error(Errc::ShapeMismatch, "kkt_residual_omega: omega is " + std::to_string(omega.rows()) +
                                         "x" + std::to_string(omega.cols()) + ", moments have p = " +
                                         std::to_string(p));
  }
  Matrix g = kernels::multiply(kernels::multiply(m.sigma1.matrix(), omega), m.sigma2.matrix());
  g -= m.sigma_diff();
  double worst = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      const double w = omega(i, j);
      const double v = w != 0.0 ? std::abs(g(i, j) + lambda * (w > 0.0 ? 1.0 : -1.0))
                                : std::max(std::abs(g(i, j)) - lambda, 0.0);
      worst = std::max(worst, v);
    }
  return worst;
}

}  // namespace quda
