#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "quda/error.hpp"
#include "quda/kernels.hpp"
#include "quda/omega_admm.hpp"

using namespace quda;

namespace {

ClassMoments moments_from(const SymMatrix& s1, const SymMatrix& s2) {
  const std::size_t p = s1.dim();
  return ClassMoments{Vector(p, 0.0), Vector(p, 0.0), s1, s2, 100, 100};
}

SymMatrix diag(std::initializer_list<double> d) {
  return SymMatrix::symmetrized(Matrix::diagonal(std::vector<double>(d)));
}

AdmmConfig tight() {
  AdmmConfig c;
  c.tol_abs = 1e-10;
  c.tol_rel = 1e-10;
  c.max_iter = 20000;
  return c;
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no quda::Error thrown");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("B matrix examples") {
  const Vector two{2.0}, three{3.0};
  const Matrix b1 = build_b_matrix(two, three, 1.0);
  CHECK(b1(0, 0) == doctest::Approx(1.0 / 7.0).epsilon(1e-15));

  const Vector zeros(4, 0.0);
  const Matrix b2 = build_b_matrix(zeros, zeros, 2.0);
  for (double v : b2.data()) CHECK(v == 0.5);

  const Vector d{1.0, 0.0};
  const Matrix b3 = build_b_matrix(d, d, 1.0);
  CHECK(b3(0, 0) == 0.5);
  CHECK(b3(0, 1) == 1.0);
  CHECK(b3(1, 0) == 1.0);
  CHECK(b3(1, 1) == 1.0);

  const Vector neg{-1e-14, 1.0};
  CHECK(build_b_matrix(neg, neg, 1.0)(0, 0) == 1.0);
  CHECK(code_of([&] { build_b_matrix(d, d, 0.0); }) == Errc::NonPositiveRho);
}

TEST_CASE("omega update with identity moments halves the input") {
  const auto id = SymMatrix::symmetrized(Matrix::identity(3));
  const auto e = sym_eigen(id);
  const Matrix b = build_b_matrix(e.values, e.values, 1.0);
  Matrix a(3, 3);
  std::iota(a.data().begin(), a.data().end(), 1.0);
  const Matrix w = omega_update(a, e, e, b);
  CHECK(max_abs_diff(w, 0.5 * a) < 1e-15);
}

TEST_CASE("omega update on diagonal moments in the small rho limit") {
  const auto s1 = diag({1.0, 2.0}), s2 = diag({2.0, 1.0});
  const auto e1 = sym_eigen(s1), e2 = sym_eigen(s2);
  const double rho = 1e-12;
  const Matrix w = omega_update(s1.matrix() - s2.matrix(), e1, e2, build_b_matrix(e1.values, e2.values, rho));
  CHECK(w(0, 0) == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(w(1, 1) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::abs(w(0, 1)) < 1e-15);
  CHECK(std::abs(w(1, 0)) < 1e-15);
}

TEST_CASE("omega update matches the dense Kronecker solve") {
  std::mt19937_64 gen(31);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 10; ++t) {
    const auto s1 = oracle::random_spd(4, gen, 0.1, 3.0), s2 = oracle::random_spd(4, gen, 0.1, 3.0);
    Matrix a(4, 4);
    for (double& v : a.data()) v = nd(gen);
    const double rho = 0.3 + t * 0.2;
    const auto e1 = sym_eigen(s1), e2 = sym_eigen(s2);
    const Matrix w = omega_update(a, e1, e2, build_b_matrix(e1.values, e2.values, rho));
    const Matrix ref = oracle::kronecker_solve(s1.matrix(), s2.matrix(), a, rho);
    CHECK(max_abs_diff(w, ref) <= 1e-8 * std::max(1.0, max_abs(ref.data())));
    // Residual of S1 W S2 + rho W = A.
    Matrix lhs = kernels::serial::multiply(kernels::serial::multiply(s1.matrix(), w), s2.matrix());
    lhs += rho * w;
    CHECK(max_abs_diff(lhs, a) <= 1e-8 * std::max(1.0, max_abs(a.data())));
  }
}

TEST_CASE("omega update rejects mismatched shapes") {
  const auto e = sym_eigen(SymMatrix::symmetrized(Matrix::identity(3)));
  CHECK(code_of([&] { omega_update(Matrix(2, 2), e, e, Matrix(3, 3)); }) == Errc::ShapeMismatch);
}

TEST_CASE("equal covariances give a zero solution") {
  std::mt19937_64 gen(41);
  const auto s = oracle::random_spd(6, gen);
  for (double lambda : {0.0, 0.05, 1.0}) {
    const auto sol = solve_omega(moments_from(s, s), lambda);
    CHECK(sol.converged);
    CHECK(max_abs(sol.omega.matrix().data()) == 0.0);
    CHECK(sol.support.empty());
  }
}

TEST_CASE("unpenalized solution matches the Kronecker oracle at p = 3") {
  std::mt19937_64 gen(43);
  for (int t = 0; t < 5; ++t) {
    const auto s1 = oracle::random_spd(3, gen), s2 = oracle::random_spd(3, gen);
    const auto m = moments_from(s1, s2);
    const auto sol = solve_omega(m, 0.0, tight());
    CHECK(sol.converged);
    const Matrix ref = oracle::kronecker_solve(s1.matrix(), s2.matrix(), m.sigma_diff(), 0.0);
    CHECK(max_abs_diff(sol.omega.matrix(), ref) <= 1e-5);
    CHECK(kkt_residual_omega(ref, m, 0.0) <= 1e-8);
  }
}

TEST_CASE("a penalty above the max difference gives zero") {
  std::mt19937_64 gen(47);
  const auto s1 = oracle::random_spd(5, gen), s2 = oracle::random_spd(5, gen);
  const auto m = moments_from(s1, s2);
  const double lmax = max_abs(m.sigma_diff().data());
  const auto sol = solve_omega(m, lmax);
  CHECK(sol.converged);
  CHECK(max_abs(sol.omega.matrix().data()) == 0.0);
  CHECK(kkt_residual_omega(Matrix(5, 5), m, lmax) == 0.0);
  CHECK(kkt_residual_omega(Matrix(5, 5), m, 10.0 * lmax) == 0.0);
}

TEST_CASE("converged solutions pass the KKT check and the stopping rule") {
  std::mt19937_64 gen(53);
  for (double lambda : {0.01, 0.1, 0.5}) {
    const auto s1 = oracle::random_spd(10, gen, 0.3, 2.5), s2 = oracle::random_spd(10, gen, 0.3, 2.5);
    const auto m = moments_from(s1, s2);
    AdmmConfig cfg;
    cfg.max_iter = 5000;
    const auto sol = solve_omega(m, lambda, cfg);
    REQUIRE(sol.converged);
    CHECK(kkt_residual_omega(sol.omega_raw, m, lambda) <= 1e-3 * std::max(lambda, 1.0));
    const double psi_norm = frobenius_norm(sol.omega_raw);
    CHECK(sol.primal_residual <= 10 * cfg.tol_abs + cfg.tol_rel * (psi_norm + sol.primal_residual));
    CHECK(sol.dual_residual > 0.0);
  }
}

TEST_CASE("raw iterate is exactly sparse and consistent with the symmetrized output") {
  std::mt19937_64 gen(59);
  const auto s1 = oracle::random_spd(8, gen), s2 = oracle::random_spd(8, gen);
  const auto sol = solve_omega(moments_from(s1, s2), 0.2);
  std::size_t zeros = 0;
  for (double v : sol.omega_raw.data()) zeros += v == 0.0;
  CHECK(zeros > 0);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      CHECK(sol.omega(i, j) == 0.5 * (sol.omega_raw(i, j) + sol.omega_raw(j, i)));
  std::size_t nonzero = 0;
  for (double v : sol.omega.matrix().data()) nonzero += v != 0.0;
  CHECK(sol.support.size() == nonzero);
  for (auto [i, j] : sol.support) CHECK(sol.omega(i, j) != 0.0);
}

TEST_CASE("permuting variables permutes the solution") {
  std::mt19937_64 gen(61);
  const std::size_t p = 8;
  const auto s1 = oracle::random_spd(p, gen), s2 = oracle::random_spd(p, gen);
  std::vector<std::size_t> perm(p);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), gen);
  auto permute = [&](const SymMatrix& s) {
    Matrix out(p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) out(i, j) = s(perm[i], perm[j]);
    return SymMatrix::symmetrized(out);
  };
  AdmmConfig cfg = tight();
  cfg.rho = 1.0;
  const auto a = solve_omega(moments_from(s1, s2), 0.05, cfg);
  const auto b = solve_omega(moments_from(permute(s1), permute(s2)), 0.05, cfg);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  double worst = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) worst = std::max(worst, std::abs(b.omega(i, j) - a.omega(perm[i], perm[j])));
  CHECK(worst <= 1e-7);
}

TEST_CASE("warm-started path agrees with cold starts") {
  std::mt19937_64 gen(67);
  const auto m = moments_from(oracle::random_spd(7, gen), oracle::random_spd(7, gen));
  AdmmConfig cfg = tight();
  OmegaSolver solver(m, cfg);
  for (double lambda : {0.4, 0.2, 0.1, 0.05}) {
    const auto warm = solver.solve(lambda);
    const auto cold = solve_omega(m, lambda, cfg);
    CHECK(max_abs_diff(warm.omega.matrix(), cold.omega.matrix()) <= 1e-6);
  }
}

TEST_CASE("rank-deficient moments still produce a finite solution") {
  Matrix low(4, 4);
  low(0, 0) = 1.0;
  low(1, 1) = 0.5;
  const auto m = moments_from(SymMatrix::symmetrized(low), SymMatrix::symmetrized(Matrix::identity(4)));
  const auto sol = solve_omega(m, 0.05);
  CHECK(all_finite(sol.omega.matrix().data()));
  CHECK(sol.rho > 0.0);
}

TEST_CASE("default rho uses the smallest positive eigenvalues") {
  const Vector d1{4.0, 1.0, 0.0}, d2{2.0, 0.5};
  CHECK(default_rho(d1, d2) == doctest::Approx(std::sqrt((8.0 + 1e-8) * (0.5 + 1e-8))));
}

TEST_CASE("config validation") {
  AdmmConfig c;
  c.rho = -1.0;
  CHECK(code_of([&] { c.validate(); }) == Errc::NonPositiveRho);
  c.rho.reset();
  c.tol_abs = 0.0;
  CHECK(code_of([&] { c.validate(); }) == Errc::InvalidArgument);
  const auto m = moments_from(diag({1.0}), diag({2.0}));
  CHECK(code_of([&] { solve_omega(m, -0.1); }) == Errc::InvalidArgument);
  CHECK(code_of([&] { kkt_residual_omega(Matrix(2, 2), m, 0.0); }) == Errc::ShapeMismatch);
}

TEST_CASE("non-convergence is flagged, not thrown") {
  std::mt19937_64 gen(71);
  const auto m = moments_from(oracle::random_spd(6, gen), oracle::random_spd(6, gen));
  AdmmConfig cfg;
  cfg.max_iter = 2;
  const auto sol = solve_omega(m, 0.01, cfg);
  CHECK_FALSE(sol.converged);
  CHECK(sol.iterations == 2);
}
