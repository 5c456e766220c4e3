#pragma once

// Matrix products used in the hot loops. The default versions are
// packed, register-tiled and OpenMP-parallel over output rows; every output element is
// accumulated in a fixed order, so results do not depend on the thread count.
// kernels::serial holds the textbook triple loops kept as a test reference.

#include "quda/linalg.hpp"

namespace quda::kernels {

/// a * b
Matrix multiply(const Matrix& a, const Matrix& b);
/// transpose(a) * b
Matrix multiply_tn(const Matrix& a, const Matrix& b);
/// a * transpose(b)
Matrix multiply_nt(const Matrix& a, const Matrix& b);

int max_threads() noexcept;
void set_threads(int n) noexcept;

namespace serial {

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix multiply_tn(const Matrix& a, const Matrix& b);
Matrix multiply_nt(const Matrix& a, const Matrix& b);

}  // namespace serial

}  // namespace quda::kernels
