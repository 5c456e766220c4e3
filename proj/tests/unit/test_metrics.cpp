#include <cmath>
#include <sstream>

#include "doctest.h"
#include "quda/error.hpp"
#include "quda/metrics.hpp"

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

QudaModel always_class2(std::size_t p) {
  QudaModel m;
  m.mu.assign(p, 0.0);
  m.omega = SymMatrix(p);
  m.delta.assign(p, 0.0);
  m.eta = -1.0;
  return m;
}

LabeledDataset constant_labels(std::size_t n, std::size_t p, int label) {
  return LabeledDataset{Matrix(n, p, 0.5), std::vector<int>(n, label)};
}

CvConfig quick_cv() {
  CvConfig c;
  c.grid_points = 3;
  c.folds = 3;
  return c;
}

}  // namespace

TEST_CASE("misclassification rate examples") {
  const auto m = always_class2(3);
  CHECK(misclassification_rate(m, constant_labels(10, 3, 2)) == 0.0);
  CHECK(misclassification_rate(m, constant_labels(10, 3, 1)) == 1.0);
  CHECK(code_of([&] { misclassification_rate(m, constant_labels(0, 3, 1)); }) == Errc::EmptyInput);
}

TEST_CASE("support counts") {
  const auto t1 = build_truth({1, 50, 100, 100, 1});
  const auto true_inter = upper_support(t1.omega_true, Tolerances::truth_support);
  const auto true_main = vector_support(t1.delta_true, Tolerances::truth_support);
  CHECK(support_metrics(true_inter, true_main, t1) == SupportCounts{});
  const auto empty = support_metrics({}, true_main, t1);
  CHECK(empty.fn_inter == 6);
  CHECK(empty.fp_inter == 0);
  CHECK(empty.fn_main == 0);

  // Transposed pairs fold onto the same unique entry.
  IndexPairs flipped;
  for (auto [i, j] : true_inter) flipped.emplace_back(j, i);
  CHECK(support_metrics(flipped, true_main, t1) == SupportCounts{});

  const auto t3 = build_truth({3, 10, 100, 100, 1});
  const auto c = support_metrics({{0, 0}, {2, 5}, {5, 2}}, {0, 1, 4}, t3);
  CHECK(c.fp_inter == 2);
  CHECK(c.fn_inter == 0);
  CHECK(c.fp_main == 1);
  CHECK(c.fn_main == 0);
  CHECK(support_metrics({}, {}, t3).fn_main == 2);
  CHECK(code_of([&] { support_metrics({{0, 10}}, {}, t3); }) == Errc::ShapeMismatch);
  CHECK(code_of([&] { support_metrics({}, {10}, t3); }) == Errc::ShapeMismatch);
}

TEST_CASE("mean and standard error") {
  const auto s = mean_se({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
}

TEST_CASE("oracle error on model 2 at p = 50") {
  const SyntheticSpec spec{2, 50, 100, 100, 77};
  const auto truth = build_truth(spec);
  const double mr = misclassification_rate(OracleRule(truth), make_test_set(spec, truth, 5000));
  MESSAGE("oracle MR " << mr);
  CHECK(std::abs(mr - 0.0065) <= 0.003);
}

TEST_CASE("the Bayes rule is not beaten on a large test draw") {
  const SyntheticSpec spec{4, 20, 100, 100, 13};
  const auto data = make_dataset(spec);
  const auto test = make_test_set(spec, data.truth, 5000);
  const double oracle = misclassification_rate(OracleRule(data.truth), test);
  for (double lambda : {0.01, 0.05, 0.2}) {
    const double mr = misclassification_rate(fit(data.train, lambda, 0.05), test);
    const double se = std::sqrt(mr * (1.0 - mr) / static_cast<double>(test.n()));
    CHECK(oracle <= mr + 3.0 * se);
  }
}

TEST_CASE("benchmark is deterministic and its log reproduces the aggregates") {
  const SyntheticSpec spec{2, 10, 40, 40, 3};
  const auto a = run_benchmark(spec, 2, 200, quick_cv());
  const auto b = run_benchmark(spec, 2, 200, quick_cv());
  CHECK(format_table({a}) == format_table({b}));
  CHECK(a.records[0].mr == b.records[0].mr);
  CHECK(a.records[1].seed != a.records[0].seed);

  const auto c = run_benchmark({3, 10, 40, 40, 3}, 3, 200, quick_cv());
  std::stringstream log;
  write_replication_csv({a, c}, log);
  const auto back = read_replication_csv(log);
  REQUIRE(back.size() == 2);
  CHECK(format_table(back) == format_table({a, c}));
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& x = k == 0 ? a : c;
    CHECK(back[k].mr.mean == x.mr.mean);
    CHECK(back[k].mr.se == x.mr.se);
    CHECK(back[k].oracle_mr.mean == x.oracle_mr.mean);
    CHECK(back[k].fp_inter.mean == x.fp_inter.mean);
    CHECK(back[k].fn_main.se == x.fn_main.se);
    CHECK(back[k].reps == x.reps);
  }
}

TEST_CASE("a replication matches the pipeline run by hand") {
  const SyntheticSpec spec{2, 10, 40, 40, 21};
  const auto rec = run_replication(spec, 1, 300, quick_cv(), {});
  const auto rs = replication_spec(spec, 1);
  const auto data = make_dataset(rs);
  CvConfig cv = quick_cv();
  cv.seed = derive_seed(rs.seed, {0xC5});
  const auto tuned = cv_select(data.train, cv);
  const auto model = fit(data.train, tuned.lambda_star, tuned.lambda_delta_star);
  CHECK(rec.mr == misclassification_rate(model, make_test_set(rs, data.truth, 300)));
  CHECK(rec.lambda == tuned.lambda_star);
}

TEST_CASE("benchmark argument checks") {
  CHECK(code_of([] { run_benchmark({2, 10, 40, 40, 1}, 1, 100, quick_cv()); }) == Errc::InvalidArgument);
  std::stringstream bad("model,p\n1,2\n");
  CHECK(code_of([&] { read_replication_csv(bad); }) == Errc::ParseError);
}

TEST_CASE("table layout") {
  const auto s = summarize(2, 50, {ReplicationRecord{0, 1, 0.1, 0.1, 0.02, 0.01, {1, 2, 0, 0}, 3, 4, true},
                                   ReplicationRecord{1, 2, 0.1, 0.1, 0.04, 0.01, {3, 2, 0, 0}, 3, 4, true}});
  const auto t = format_table({s});
  CHECK(t.find("| 2 | 50 | QUDA | 3.00 (1.00) | 2.00 (1.00) | 0.00 (0.00) | 2.00 (0.00) | 0.00 (0.00) |") != std::string::npos);
  CHECK(t.find("| 2 | 50 | Oracle | 1.00 (0.00) |") != std::string::npos);
}
