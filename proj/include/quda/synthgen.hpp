#pragma once

// Ground truth for the five benchmark models and seeded Gaussian sampling.
//
// Randomness: every stream is a std::mt19937_64 seeded through std::seed_seq
// from (master seed, stream path). Both are fully specified by the standard,
// and the normal and integer transforms below are implemented here instead of
// using the implementation-defined std:: distributions, so draws are
// identical across standard libraries.

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <random>

#include "quda/model.hpp"
#include "quda/moments.hpp"

namespace quda {

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {});

  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_low() { return 1.0 - uniform(); }
  /// Standard normal (Box-Muller; the second variate is cached).
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Deterministic child seed for a stream path below `master`.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

struct SyntheticSpec {
  int model_id = 2;
  std::size_t p = 50;
  std::size_t n1 = 100;
  std::size_t n2 = 100;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Sparse symmetric matrix with `positions` nonzeros drawn uniformly over the
/// upper triangle (diagonal included), values uniform on [-1, 1].
SymMatrix random_sparse_symmetric(std::size_t p, std::size_t positions, Rng& rng);

/// c * s such that I + c * s is SPD with 2-norm condition number `cond`;
/// nullopt when no positive c achieves it.
std::optional<SymMatrix> scale_for_condition(const SymMatrix& s, double cond);

using SparseDraw = std::function<SymMatrix(std::size_t attempt)>;

/// Model 5 difference matrix. Draws are retried (new sub-stream per attempt)
/// until one can be scaled; NotPositiveDefinite after `max_attempts`.
SymMatrix model5_difference(std::size_t p, std::size_t n1, std::uint64_t seed,
                            int max_attempts = 16, const SparseDraw& draw = {});

SyntheticTruth build_truth(const SyntheticSpec& spec);

/// Factors sigma once (eigendecomposition) and draws rows mu + U sqrt(D) g.
class GaussianSampler {
 public:
  GaussianSampler(Vector mu, const SymMatrix& sigma);
  Matrix draw(std::size_t n, Rng& rng) const;
  std::size_t dim() const noexcept { return mu_.size(); }

 private:
  Vector mu_;
  Matrix factor_;
};

Matrix sample_mvn(const Vector& mu, const SymMatrix& sigma, std::size_t n, std::uint64_t seed);

/// n1 class-1 rows followed by n2 class-2 rows.
LabeledDataset draw_labeled(const SyntheticTruth& truth, std::size_t n1, std::size_t n2, Rng& rng);

struct SyntheticData {
  LabeledDataset train;
  SyntheticTruth truth;
};

SyntheticData make_dataset(const SyntheticSpec& spec);
/// Independent test draw with `per_class` rows per class.
LabeledDataset make_test_set(const SyntheticSpec& spec, const SyntheticTruth& truth,
                             std::size_t per_class);

}  // namespace quda
