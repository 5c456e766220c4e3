#pragma once

#include <cstddef>
#include <span>

#include "quda/linalg.hpp"

namespace quda {

struct ScoredSample {
  double score = 0.0;  ///< raw discriminant, intercept excluded
  int label01 = 0;     ///< 1 for class 1, 0 for class 2
};

struct EtaSearch {
  double eta = 0.0;
  double insample_error = 0.0;
  std::size_t errors = 0;
  /// Number of lowest-scoring samples assigned to class 2.
  std::size_t k_star = 0;
};

/// (z - mu)' Omega (z - mu) + delta' (z - mu)
double discriminant_raw(std::span<const double> mu, const SymMatrix& omega,
                        std::span<const double> delta, std::span<const double> z);

/// Intercept minimizing the in-sample error of  score + eta > 0 => class 1.
/// Among minimizing cut points the widest open interval wins (the unbounded
/// end cases count as infinitely wide), then the smallest cut; eta is its
/// midpoint, or one unit past the extreme score for the unbounded cases.
EtaSearch search_eta(std::span<const ScoredSample> samples);

}  // namespace quda
