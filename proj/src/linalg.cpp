#include "quda/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "quda/error.hpp"

namespace quda {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(Errc::ShapeMismatch, std::string(op) + ": " + std::to_string(a.rows()) + "x" +
                                         std::to_string(a.cols()) + " vs " +
                                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

void require_square(const Matrix& m, const char* op) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(Errc::ShapeMismatch, std::string(op) + ": expected a non-empty square matrix, got " +
                                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

SymMatrix SymMatrix::symmetrized(const Matrix& m) {
  require_square(m, "SymMatrix::symmetrized");
  SymMatrix s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s.m_(i, i) = m(i, i);
    for (std::size_t j = i + 1; j < m.cols(); ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  }
  return s;
}

SymMatrix SymMatrix::checked(const Matrix& m, double tol) {
  require_square(m, "SymMatrix::checked");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (!(std::abs(m(i, j) - m(j, i)) <= tol)) {
        throw Error(Errc::NotSymmetric, "entries (" + std::to_string(i) + "," + std::to_string(j) +
                                            ") and transpose differ by more than tolerance");
      }
  return symmetrized(m);
}

SymEigen sym_eigen(const SymMatrix& input, int max_sweeps) {
  const std::size_t n = input.dim();
  if (n == 0) throw Error(Errc::ShapeMismatch, "sym_eigen: empty matrix");
  if (!all_finite(input.matrix().data())) throw Error(Errc::NonFinite, "sym_eigen: input");

  Matrix a = input.matrix();
  // Rows of vt are the eigenvectors; rotating rows keeps memory access contiguous.
  Matrix vt = Matrix::identity(n);

  const double scale = frobenius_norm(a);
  bool converged = scale == 0.0;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-15 * scale) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Entry is below the rounding unit of both diagonals: drop it.
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          const double np = c * arp - s * arq;
          const double nq = s * arp + c * arq;
          a(r, p) = np;
          a(p, r) = np;
          a(r, q) = nq;
          a(q, r) = nq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        double* vp = vt.row(p).data();
        double* vq = vt.row(q).data();
        for (std::size_t r = 0; r < n; ++r) {
          const double x = vp[r];
          const double y = vq[r];
          vp[r] = c * x - s * y;
          vq[r] = s * x + c * y;
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) > 1e-15 * scale) {
      throw Error(Errc::NoConvergence, "sym_eigen: " + std::to_string(max_sweeps) +
                                           " Jacobi sweeps, off-diagonal norm " +
                                           std::to_string(std::sqrt(off)));
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  SymEigen out{Matrix(n, n), Vector(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a(src, src);
    auto v = vt.row(src);
    std::size_t arg = 0;
    for (std::size_t r = 1; r < n; ++r)
      if (std::abs(v[r]) > std::abs(v[arg])) arg = r;
    const double sign = v[arg] < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = sign * v[r];
  }
  return out;
}

double soft_threshold(double a, double b) {
  if (b < 0.0) throw Error(Errc::NegativeThreshold, "soft_threshold: b = " + std::to_string(b));
  if (a > b) return a - b;
  if (a < -b) return a + b;
  return 0.0;
}

Vector soft_threshold(std::span<const double> a, double b) {
  if (b < 0.0) throw Error(Errc::NegativeThreshold, "soft_threshold: b = " + std::to_string(b));
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = soft_threshold(a[i], b);
  return out;
}

Matrix soft_threshold(const Matrix& a, double b) {
  if (b < 0.0) throw Error(Errc::NegativeThreshold, "soft_threshold: b = " + std::to_string(b));
  Matrix out(a.rows(), a.cols());
  auto src = a.data();
  auto dst = out.data();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = soft_threshold(src[k], b);
  return out;
}

namespace {

const SymEigen& require_spd(const SymEigen& e, const char* op) {
  const double dmax = e.values.front();
  const double dmin = e.values.back();
  if (!(dmax > 0.0) || !(dmin > Tolerances::spd_relative * dmax)) {
    throw Error(Errc::NotPositiveDefinite, std::string(op) + ": eigenvalue range [" +
                                               std::to_string(dmin) + ", " + std::to_string(dmax) +
                                               "]");
  }
  return e;
}

}  // namespace

SymMatrix mat_inverse_spd(const SymMatrix& a) {
  const SymEigen e = sym_eigen(a);
  require_spd(e, "mat_inverse_spd");
  const std::size_t n = a.dim();
  SymMatrix inv(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += e.vectors(i, k) * e.vectors(j, k) / e.values[k];
      inv.set(i, j, s);
    }
  return inv;
}

double log_det_spd(const SymMatrix& a) {
  const SymEigen e = sym_eigen(a);
  require_spd(e, "log_det_spd");
  double s = 0.0;
  for (double d : e.values) s += std::log(d);
  return s;
}

double max_abs(std::span<const double> v) noexcept {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double frobenius_norm(const Matrix& m) noexcept {
  double s = 0.0;
  for (double x : m.data()) s += x * x;
  return std::sqrt(s);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

Vector mat_vec(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    throw Error(Errc::ShapeMismatch, "mat_vec: " + std::to_string(a.cols()) + " columns vs vector of " +
                                         std::to_string(x.size()));
  }
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool all_finite(std::span<const double> v) noexcept {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace quda
