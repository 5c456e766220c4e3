#pragma once

// Dense row-major matrices, symmetric eigendecomposition and the proximal
// primitives shared by every solver.

#include <cstddef>
#include <span>
#include <vector>

namespace quda {

using Vector = std::vector<double>;

/// Numerical tolerances shared by solvers and tests.
struct Tolerances {
  static constexpr double symmetry = 1e-12;
  static constexpr double eigen_orthogonality = 1e-10;
  /// Relative eigenvalue floor for positive definiteness checks.
  static constexpr double spd_relative = 1e-12;
  /// Relative floor below which an eigenvalue counts as zero (rank detection).
  static constexpr double rank_relative = 1e-10;
  static constexpr double psd_slack = 1e-10;
  static constexpr double zero_diagonal = 1e-12;
  static constexpr double truth_support = 1e-10;
  static constexpr int jacobi_max_sweeps = 100;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);

/// Square matrix that is exactly symmetric.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : m_(dim, dim) {}

  /// Averages `m` with its transpose.
  static SymMatrix symmetrized(const Matrix& m);
  /// Accepts `m` if it is symmetric within `tol`, then makes it exactly symmetric.
  static SymMatrix checked(const Matrix& m, double tol = Tolerances::symmetry);

  std::size_t dim() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
  /// Writes both (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, double v) noexcept {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  const Matrix& matrix() const noexcept { return m_; }

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  Matrix m_;
};

struct SymEigen {
  Matrix vectors;  ///< column k is the eigenvector for values[k]
  Vector values;   ///< descending
};

/// Cyclic Jacobi eigendecomposition. Eigenvector signs are fixed so that the
/// largest-magnitude component of each vector is positive.
SymEigen sym_eigen(const SymMatrix& a, int max_sweeps = Tolerances::jacobi_max_sweeps);

double soft_threshold(double a, double b);
Vector soft_threshold(std::span<const double> a, double b);
Matrix soft_threshold(const Matrix& a, double b);

SymMatrix mat_inverse_spd(const SymMatrix& a);
double log_det_spd(const SymMatrix& a);

double max_abs(std::span<const double> v) noexcept;
double frobenius_norm(const Matrix& m) noexcept;
double max_abs_diff(const Matrix& a, const Matrix& b);
Vector mat_vec(const Matrix& a, std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b) noexcept;
bool all_finite(std::span<const double> v) noexcept;

}  // namespace quda
