#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "quda/error.hpp"
#include "quda/metrics.hpp"
#include "quda/synthgen.hpp"
#include "quda/tuning.hpp"

using namespace quda;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no quda::Error thrown");
  return Errc::InvalidArgument;
}

CvConfig small_grid(std::vector<double> lambdas, std::vector<double> deltas) {
  CvConfig c;
  c.lambda_grid = std::move(lambdas);
  c.lambda_delta_grid = std::move(deltas);
  return c;
}

}  // namespace

TEST_CASE("single-point grids return that pair") {
  const auto data = make_dataset({2, 10, 40, 40, 3});
  const auto r = cv_select(data.train, small_grid({0.07}, {0.3}));
  CHECK(r.lambda_star == 0.07);
  CHECK(r.lambda_delta_star == 0.3);
  CHECK(r.table.size() == 1);
  CHECK(r.best_cell == 0);
  CHECK_FALSE(r.lambda_grid_default);
}

TEST_CASE("ties go to the sparser pair") {
  // Both penalties are far above every statistic, so all cells fit the same
  // empty rule and tie exactly.
  const auto data = make_dataset({2, 10, 40, 40, 3});
  const auto r = cv_select(data.train, small_grid({1e6, 1e5}, {2e6, 1e6}));
  for (const auto& cell : r.table) CHECK(cell.mean_mr == r.table.front().mean_mr);
  CHECK(r.lambda_star == 1e6);
  CHECK(r.lambda_delta_star == 2e6);
  CHECK(r.best_cell == 0);
}

TEST_CASE("fold assignment is stratified, complete and deterministic") {
  std::vector<int> labels(103, 1);
  std::fill(labels.begin() + 48, labels.end(), 2);
  const auto a = stratified_folds(labels, 5, 17);
  CHECK(a == stratified_folds(labels, 5, 17));
  CHECK_FALSE(a == stratified_folds(labels, 5, 18));
  for (int f : a) CHECK_UNARY(f >= 0 && f < 5);
  for (int cls : {1, 2}) {
    std::vector<int> count(5, 0);
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) ++count[a[i]];
    const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
    CHECK(*hi - *lo <= 1);
  }
}

TEST_CASE("table entries are fold averages in [0, 1]") {
  const auto data = make_dataset({4, 12, 50, 50, 8});
  CvConfig cfg;
  cfg.grid_points = 3;
  cfg.folds = 4;
  const auto r = cv_select(data.train, cfg);
  CHECK(r.lambda_grid_default);
  CHECK(r.table.size() == 9);
  for (const auto& cell : r.table) {
    CHECK_UNARY(cell.mean_mr >= 0.0 && cell.mean_mr <= 1.0);
    double sum = 0.0;
    std::size_t rows = 0;
    for (std::size_t f = 0; f < cell.fold_errors.size(); ++f) {
      sum += static_cast<double>(cell.fold_errors[f]) / static_cast<double>(cell.fold_sizes[f]);
      rows += cell.fold_sizes[f];
    }
    CHECK(cell.mean_mr == sum / 4.0);
    CHECK(rows == 100);
  }
  for (const auto& cell : r.table) CHECK(cell.mean_mr >= r.table[r.best_cell].mean_mr);
  const auto again = cv_select(data.train, cfg);
  CHECK(again.best_cell == r.best_cell);
  for (std::size_t c = 0; c < r.table.size(); ++c) CHECK(again.table[c].fold_errors == r.table[c].fold_errors);

  std::ostringstream csv;
  write_cv_table_csv(r, csv);
  const std::string text = csv.str();
  CHECK(text.find("lambda_index,lambda_delta_index,lambda,lambda_delta,mean_mr") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 11);
}

TEST_CASE("default grids span the requested decades") {
  const auto g = log_grid(5.0, 8, 2.0);
  CHECK(g.size() == 8);
  CHECK(g.front() == 5.0);
  CHECK(g.back() == doctest::Approx(0.05));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] < g[i - 1]);
  CHECK(log_grid(3.0, 1, 2.0) == std::vector<double>{3.0});
}

TEST_CASE("configuration and data errors") {
  const auto data = make_dataset({2, 5, 4, 10, 1});
  CHECK(code_of([&] { cv_select(data.train, CvConfig{}); }) == Errc::TooFewPerClass);
  CvConfig bad;
  bad.folds = 1;
  CHECK(code_of([&] { bad.validate(); }) == Errc::InvalidArgument);
  CHECK(code_of([] { small_grid({0.1, 0.2}, {}).validate(); }) == Errc::InvalidArgument);
  CHECK(code_of([] { small_grid({0.1, 0.1}, {}).validate(); }) == Errc::InvalidArgument);
}

TEST_CASE("cross-validated choice is close to the best choice on fresh data") {
  const SyntheticSpec spec{2, 50, 100, 100, 2024};
  const auto data = make_dataset(spec);
  const auto test = make_test_set(spec, data.truth, 2000);
  CvConfig cfg;
  cfg.seed = 5;
  const auto r = cv_select(data.train, cfg);
  double best = 1.0, chosen = 1.0;
  for (const auto& cell : r.table) {
    const double mr = misclassification_rate(fit(data.train, cell.lambda, cell.lambda_delta), test);
    best = std::min(best, mr);
    if (cell.lambda == r.lambda_star && cell.lambda_delta == r.lambda_delta_star) chosen = mr;
  }
  MESSAGE("cv-selected test MR " << chosen << ", best grid test MR " << best);
  CHECK(chosen <= best + 0.03);
}
