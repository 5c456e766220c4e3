#pragma once

// Stratified k-fold cross-validation over a joint (lambda, lambda_delta) grid,
// minimizing the held-out misclassification rate.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "quda/moments.hpp"
#include "quda/omega_admm.hpp"

namespace quda {

struct CvConfig {
  int folds = 5;
  /// Strictly descending. Empty selects the default grid.
  std::vector<double> lambda_grid;
  std::vector<double> lambda_delta_grid;
  /// Default grids: this many log-spaced points from the max down `decades`.
  int grid_points = 8;
  double grid_decades = 2.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct CvCell {
  std::size_t lambda_index = 0;
  std::size_t lambda_delta_index = 0;
  double lambda = 0.0;
  double lambda_delta = 0.0;
  double mean_mr = 0.0;  ///< mean over folds of errors / fold size
  std::vector<std::size_t> fold_errors;
  std::vector<std::size_t> fold_sizes;
};

struct CvResult {
  double lambda_star = 0.0;
  double lambda_delta_star = 0.0;
  std::size_t best_cell = 0;
  std::vector<double> lambda_grid;
  std::vector<double> lambda_delta_grid;
  bool lambda_grid_default = false;
  bool lambda_delta_grid_default = false;
  /// Row-major over (lambda_index, lambda_delta_index).
  std::vector<CvCell> table;
};

/// fold[i] in [0, folds); each class is shuffled and dealt round-robin.
std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed);

/// `points` log-spaced values from `top` down to top * 10^-decades.
std::vector<double> log_grid(double top, int points, double decades);

/// Default grids from the full data: lambda_max = max|S1 - S2| and
/// lambda_delta_max = max over the lambda grid of max|gamma_hat|.
std::pair<std::vector<double>, std::vector<double>> default_grids(const LabeledDataset& data,
                                                                  const CvConfig& cfg,
                                                                  const AdmmConfig& admm);

CvResult cv_select(const LabeledDataset& data, const CvConfig& cfg, const AdmmConfig& admm = {});

void write_cv_table_csv(const CvResult& result, std::ostream& out);

}  // namespace quda
