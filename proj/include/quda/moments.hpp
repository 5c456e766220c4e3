#pragma once

#include <cstddef>
#include <vector>

#include "quda/linalg.hpp"

namespace quda {

/// Rows of `x` are observations; labels are 1 or 2.
struct LabeledDataset {
  Matrix x;
  std::vector<int> labels;

  std::size_t n() const noexcept { return x.rows(); }
  std::size_t p() const noexcept { return x.cols(); }

  /// Throws on shape mismatch, non-finite entries or labels outside {1, 2}.
  void validate() const;
  LabeledDataset subset(const std::vector<std::size_t>& rows) const;
};

/// Per-class sample moments. Covariances use the 1/n_k divisor, not 1/(n_k - 1).
struct ClassMoments {
  Vector mu1, mu2;
  SymMatrix sigma1, sigma2;
  std::size_t n1 = 0, n2 = 0;

  std::size_t p() const noexcept { return mu1.size(); }
  /// sigma1 - sigma2
  Matrix sigma_diff() const { return sigma1.matrix() - sigma2.matrix(); }
};

ClassMoments estimate_moments(const LabeledDataset& data);

}  // namespace quda
