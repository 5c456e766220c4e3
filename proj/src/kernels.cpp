#include "quda/kernels.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "quda/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace quda::kernels {

namespace {

// Below this many multiply-adds the thread start-up costs more than it saves.
constexpr std::size_t kParallelWork = 1u << 16;

void require(bool ok, const char* op, const Matrix& a, const Matrix& b) {
  if (!ok) {
    throw Error(Errc::ShapeMismatch, std::string(op) + ": " + std::to_string(a.rows()) + "x" +
                                         std::to_string(a.cols()) + " vs " +
                                         std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

}  // namespace

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) noexcept {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

namespace {

constexpr std::size_t kTile = 4;

// b packed as ceil(n/4) panels, each k x 4 contiguous, zero-padded.
std::vector<double> pack_columns(const Matrix& b) {
  const std::size_t k = b.rows(), n = b.cols();
  const std::size_t panels = (n + kTile - 1) / kTile;
  std::vector<double> out(panels * k * kTile, 0.0);
  for (std::size_t l = 0; l < k; ++l) {
    const double* bl = b.row(l).data();
    for (std::size_t j = 0; j < n; ++j) out[(j / kTile) * k * kTile + l * kTile + j % kTile] = bl[j];
  }
  return out;
}

// Rows [i0, i0 + 4) of a interleaved as k x 4, zero-padded past the last row.
void pack_rows(const Matrix& a, std::size_t i0, std::vector<double>& out) {
  const std::size_t k = a.cols();
  out.assign(k * kTile, 0.0);
  for (std::size_t r = 0; r < kTile && i0 + r < a.rows(); ++r) {
    const double* ar = a.row(i0 + r).data();
    for (std::size_t l = 0; l < k; ++l) out[l * kTile + r] = ar[l];
  }
}

// 4 x 4 block of a * b; every entry sums over l in ascending order.
void tile(const double* __restrict ap, const double* __restrict bp, std::size_t k, double acc[kTile][kTile]) {
  double c00 = 0, c01 = 0, c02 = 0, c03 = 0, c10 = 0, c11 = 0, c12 = 0, c13 = 0;
  double c20 = 0, c21 = 0, c22 = 0, c23 = 0, c30 = 0, c31 = 0, c32 = 0, c33 = 0;
  for (std::size_t l = 0; l < k; ++l) {
    const double a0 = ap[4 * l], a1 = ap[4 * l + 1], a2 = ap[4 * l + 2], a3 = ap[4 * l + 3];
    const double b0 = bp[4 * l], b1 = bp[4 * l + 1], b2 = bp[4 * l + 2], b3 = bp[4 * l + 3];
    c00 += a0 * b0, c01 += a0 * b1, c02 += a0 * b2, c03 += a0 * b3;
    c10 += a1 * b0, c11 += a1 * b1, c12 += a1 * b2, c13 += a1 * b3;
    c20 += a2 * b0, c21 += a2 * b1, c22 += a2 * b2, c23 += a2 * b3;
    c30 += a3 * b0, c31 += a3 * b1, c32 += a3 * b2, c33 += a3 * b3;
  }
  acc[0][0] = c00, acc[0][1] = c01, acc[0][2] = c02, acc[0][3] = c03;
  acc[1][0] = c10, acc[1][1] = c11, acc[1][2] = c12, acc[1][3] = c13;
  acc[2][0] = c20, acc[2][1] = c21, acc[2][2] = c22, acc[2][3] = c23;
  acc[3][0] = c30, acc[3][1] = c31, acc[3][2] = c32, acc[3][3] = c33;
}

}  // namespace

Matrix multiply(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "multiply", a, b);
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Matrix c(m, n);
  if (m == 0 || n == 0 || k == 0) return c;
  const std::vector<double> bp = pack_columns(b);
  const std::size_t panels = (n + kTile - 1) / kTile;
  const bool par = m * k * n >= kParallelWork;
  const auto blocks = static_cast<std::ptrdiff_t>((m + kTile - 1) / kTile);
#pragma omp parallel if (par)
  {
    std::vector<double> ap;
    double acc[kTile][kTile];
#pragma omp for schedule(static)
    for (std::ptrdiff_t bi = 0; bi < blocks; ++bi) {
      const std::size_t i0 = static_cast<std::size_t>(bi) * kTile;
      const std::size_t rows = std::min(kTile, m - i0);
      pack_rows(a, i0, ap);
      for (std::size_t pj = 0; pj < panels; ++pj) {
        tile(ap.data(), bp.data() + pj * k * kTile, k, acc);
        const std::size_t j0 = pj * kTile;
        const std::size_t cols = std::min(kTile, n - j0);
        for (std::size_t r = 0; r < rows; ++r) {
          double* cr = c.row(i0 + r).data() + j0;
          for (std::size_t q = 0; q < cols; ++q) cr[q] = acc[r][q];
        }
      }
    }
  }
  return c;
}

Matrix multiply_tn(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "multiply_tn", a, b);
  return multiply(a.transpose(), b);
}

Matrix multiply_nt(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "multiply_nt", a, b);
  return multiply(a, b.transpose());
}

namespace serial {

Matrix multiply(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "multiply", a, b);
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < a.cols(); ++l) s += a(i, l) * b(l, j);
      c(i, j) = s;
    }
  return c;
}

Matrix multiply_tn(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "multiply_tn", a, b);
  Matrix c(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < a.rows(); ++l) s += a(l, i) * b(l, j);
      c(i, j) = s;
    }
  return c;
}

Matrix multiply_nt(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "multiply_nt", a, b);
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < a.cols(); ++l) s += a(i, l) * b(j, l);
      c(i, j) = s;
    }
  return c;
}

}  // namespace serial

}  // namespace quda::kernels
