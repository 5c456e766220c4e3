#include "quda/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <string>

#include "quda/delta_cd.hpp"
#include "quda/error.hpp"
#include "quda/model.hpp"
#include "quda/synthgen.hpp"

namespace quda {

namespace {

void require_descending(const std::vector<double>& grid, const char* name) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i])) {
      throw Error(Errc::InvalidArgument, std::string(name) + " entries must be finite and nonnegative");
    }
    if (i > 0 && !(grid[i] < grid[i - 1])) {
      throw Error(Errc::InvalidArgument, std::string(name) + " must be strictly descending");
    }
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void CvConfig::validate() const {
  if (folds < 2) throw Error(Errc::InvalidArgument, "folds must be at least 2");
  if (grid_points < 1) throw Error(Errc::InvalidArgument, "grid_points must be positive");
  if (!(grid_decades >= 0.0)) throw Error(Errc::InvalidArgument, "grid_decades must be nonnegative");
  require_descending(lambda_grid, "lambda grid");
  require_descending(lambda_delta_grid, "lambda_delta grid");
}

std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed) {
  std::vector<int> fold(labels.size(), -1);
  Rng rng(seed, {0x46u});
  for (int cls : {1, 2}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) idx.push_back(i);
    // Fisher-Yates with the portable integer draw.
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
    for (std::size_t r = 0; r < idx.size(); ++r) fold[idx[r]] = static_cast<int>(r % folds);
  }
  return fold;
}

std::vector<double> log_grid(double top, int points, double decades) {
  std::vector<double> grid;
  if (!(top > 0.0)) return {0.0};
  for (int k = 0; k < points; ++k) {
    const double frac = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
    grid.push_back(top * std::pow(10.0, -decades * frac));
  }
  return grid;
}

std::pair<std::vector<double>, std::vector<double>> default_grids(const LabeledDataset& data,
                                                                  const CvConfig& cfg,
                                                                  const AdmmConfig& admm) {
  const ClassMoments m = estimate_moments(data);
  std::vector<double> lambdas = cfg.lambda_grid;
  if (lambdas.empty()) {
    lambdas = log_grid(max_abs(m.sigma_diff().data()), cfg.grid_points, cfg.grid_decades);
  }
  std::vector<double> deltas = cfg.lambda_delta_grid;
  if (deltas.empty()) {
    OmegaSolver solver(m, admm);
    double top = 0.0;
    for (double lambda : lambdas) {
      const OmegaSolution w = solver.solve(lambda);
      top = std::max(top, max_abs(compute_gamma_hat(m, w.omega)));
    }
    deltas = log_grid(top, cfg.grid_points, cfg.grid_decades);
  }
  return {lambdas, deltas};
}

CvResult cv_select(const LabeledDataset& data, const CvConfig& cfg, const AdmmConfig& admm) {
  cfg.validate();
  admm.validate();
  data.validate();
  for (int cls : {1, 2}) {
    const auto count = std::count(data.labels.begin(), data.labels.end(), cls);
    if (count < cfg.folds) {
      throw Error(Errc::TooFewPerClass, "class " + std::to_string(cls) + " has " +
                                            std::to_string(count) + " rows, fewer than " +
                                            std::to_string(cfg.folds) + " folds");
    }
  }

  CvResult result;
  result.lambda_grid_default = cfg.lambda_grid.empty();
  result.lambda_delta_grid_default = cfg.lambda_delta_grid.empty();
  std::tie(result.lambda_grid, result.lambda_delta_grid) = default_grids(data, cfg, admm);
  const auto& lambdas = result.lambda_grid;
  const auto& deltas = result.lambda_delta_grid;
  const std::size_t cells = lambdas.size() * deltas.size();
  const auto folds = static_cast<std::size_t>(cfg.folds);

  const std::vector<int> fold_of = stratified_folds(data.labels, cfg.folds, cfg.seed);
  // errors[f][cell], sizes[f]
  std::vector<std::vector<std::size_t>> errors(folds, std::vector<std::size_t>(cells, 0));
  std::vector<std::size_t> sizes(folds, 0);
  std::vector<std::exception_ptr> failures(folds);

  const auto nf = static_cast<std::ptrdiff_t>(folds);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t fi = 0; fi < nf; ++fi) {
    const auto f = static_cast<std::size_t>(fi);
    try {
      std::vector<std::size_t> train_rows, test_rows;
      for (std::size_t i = 0; i < data.n(); ++i)
        (fold_of[i] == static_cast<int>(f) ? test_rows : train_rows).push_back(i);
      const LabeledDataset train = data.subset(train_rows);
      const LabeledDataset test = data.subset(test_rows);
      sizes[f] = test.n();

      const ClassMoments m = estimate_moments(train);
      OmegaSolver solver(m, admm);
      for (std::size_t li = 0; li < lambdas.size(); ++li) {
        const OmegaSolution omega = solver.solve(lambdas[li]);
        const Vector gamma = compute_gamma_hat(m, omega.omega);
        Vector warm;
        for (std::size_t di = 0; di < deltas.size(); ++di) {
          const DeltaSolution delta = solve_delta(m, gamma, deltas[di], {}, warm);
          warm = delta.delta;
          const QudaModel model = assemble_model(m, omega, delta, train);
          std::size_t wrong = 0;
          for (std::size_t i = 0; i < test.n(); ++i)
            wrong += classify(model, test.x.row(i)) != test.labels[i] ? 1 : 0;
          errors[f][li * deltas.size() + di] = wrong;
        }
      }
    } catch (...) {
      failures[f] = std::current_exception();
    }
  }
  for (std::size_t f = 0; f < folds; ++f) {
    if (!failures[f]) continue;
    try {
      std::rethrow_exception(failures[f]);
    } catch (const Error& e) {
      rethrow_in_stage(e, "cv fold " + std::to_string(f));
    }
  }

  result.table.reserve(cells);
  double best = 2.0;
  for (std::size_t li = 0; li < lambdas.size(); ++li)
    for (std::size_t di = 0; di < deltas.size(); ++di) {
      CvCell cell;
      cell.lambda_index = li;
      cell.lambda_delta_index = di;
      cell.lambda = lambdas[li];
      cell.lambda_delta = deltas[di];
      double sum = 0.0;
      for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t e = errors[f][li * deltas.size() + di];
        cell.fold_errors.push_back(e);
        cell.fold_sizes.push_back(sizes[f]);
        sum += static_cast<double>(e) / static_cast<double>(sizes[f]);
      }
      cell.mean_mr = sum / static_cast<double>(folds);
      // Strict comparison keeps the earliest (largest-penalty) cell on ties.
      if (cell.mean_mr < best) {
        best = cell.mean_mr;
        result.best_cell = result.table.size();
      }
      result.table.push_back(std::move(cell));
    }
  result.lambda_star = result.table[result.best_cell].lambda;
  result.lambda_delta_star = result.table[result.best_cell].lambda_delta;
  return result;
}

void write_cv_table_csv(const CvResult& result, std::ostream& out) {
  out << "# grid: joint (lambda, lambda_delta) search; lambda grid "
      << (result.lambda_grid_default ? "default" : "user") << ", lambda_delta grid "
      << (result.lambda_delta_grid_default ? "default" : "user") << "\n";
  out << "lambda_index,lambda_delta_index,lambda,lambda_delta,mean_mr";
  const std::size_t folds = result.table.empty() ? 0 : result.table.front().fold_errors.size();
  for (std::size_t f = 0; f < folds; ++f) out << ",fold" << f << "_errors,fold" << f << "_size";
  out << ",selected\n";
  for (std::size_t c = 0; c < result.table.size(); ++c) {
    const CvCell& cell = result.table[c];
    out << cell.lambda_index << ',' << cell.lambda_delta_index << ',' << format_double(cell.lambda)
        << ',' << format_double(cell.lambda_delta) << ',' << format_double(cell.mean_mr);
    for (std::size_t f = 0; f < folds; ++f) out << ',' << cell.fold_errors[f] << ',' << cell.fold_sizes[f];
    out << ',' << (c == result.best_cell ? 1 : 0) << '\n';
  }
}

}  // namespace quda
