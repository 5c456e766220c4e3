#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "quda/error.hpp"
#include "quda/model.hpp"
#include "quda/model_io.hpp"
#include "quda/synthgen.hpp"

using namespace quda;
namespace fs = std::filesystem;

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

QudaModel linear_model(std::size_t p, double eta) {
  QudaModel m;
  m.mu.assign(p, 0.0);
  m.omega = SymMatrix(p);
  m.delta.assign(p, 0.0);
  m.delta[0] = 1.0;
  m.eta = eta;
  return m;
}

SyntheticTruth random_truth(std::size_t p, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  SyntheticTruth t;
  t.sigma1 = oracle::random_spd(p, gen);
  t.sigma2 = oracle::random_spd(p, gen);
  t.mu1.resize(p);
  t.mu2.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    t.mu1[j] = nd(gen);
    t.mu2[j] = nd(gen);
  }
  const auto o1 = mat_inverse_spd(t.sigma1), o2 = mat_inverse_spd(t.sigma2);
  t.omega_true = SymMatrix::symmetrized(o2.matrix() - o1.matrix());
  Vector dmu(p);
  for (std::size_t j = 0; j < p; ++j) dmu[j] = t.mu1[j] - t.mu2[j];
  t.delta_true = mat_vec(o1.matrix() + o2.matrix(), dmu);
  return t;
}

fs::path temp_file(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "quda_test_model";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("classify examples") {
  const auto m = linear_model(3, 0.0);
  CHECK(classify(m, Vector{2, 5, -1}) == 1);
  CHECK(classify(linear_model(3, -1.0), Vector{0, 0, 0}) == 2);
  CHECK(classify(linear_model(3, 1.0), Vector{0, 0, 0}) == 1);
  CHECK(classify(linear_model(3, 0.0), Vector{0, 0, 0}) == 2);
  CHECK(code_of([&] { classify(m, Vector{1, 2}); }) == Errc::ShapeMismatch);
}

TEST_CASE("oracle examples") {
  SyntheticTruth t;
  t.sigma1 = t.sigma2 = SymMatrix::symmetrized(Matrix::identity(2));
  t.mu1 = {2, 0};
  t.mu2 = {0, 0};
  t.omega_true = SymMatrix(2);
  t.delta_true = {2, 0};
  CHECK(oracle_classify(t, Vector{2, 0}) == 1);
  CHECK(oracle_classify(t, Vector{1, 0}) == 2);
  CHECK(oracle_classify(t, Vector{-1, 3}) == 2);
  CHECK(classify(model_from_truth(t), Vector{1, 0}) == 2);
  t.sigma1 = SymMatrix::symmetrized(Matrix(2, 2));
  CHECK(code_of([&] { OracleRule{t}; }) == Errc::NotPositiveDefinite);
}

TEST_CASE("rule built from the truth agrees with the Bayes rule") {
  std::mt19937_64 gen(37);
  for (std::size_t p : {2, 5, 10}) {
    auto t = random_truth(p, gen);
    if (p == 5) {
      t.pi1 = 0.3;
      t.pi2 = 0.7;
    }
    const OracleRule rule(t);
    const QudaModel m = model_from_truth(t);
    Rng rng(91, {p});
    const auto test = draw_labeled(t, 500, 500, rng);
    std::size_t disagree = 0;
    for (std::size_t i = 0; i < test.n(); ++i) {
      auto z = test.x.row(i);
      disagree += classify(m, z) != rule.classify(z);
      CHECK(discriminant(m, z) == doctest::Approx(2.0 * rule.log_ratio(z)).epsilon(1e-9).scale(1.0));
    }
    CHECK(disagree == 0);
  }
}

TEST_CASE("degenerate fit on identical class distributions") {
  std::mt19937_64 gen(41);
  std::normal_distribution<double> nd;
  LabeledDataset d{Matrix(70, 4), std::vector<int>(70, 1)};
  for (std::size_t i = 0; i < 70; ++i) {
    d.labels[i] = i < 30 ? 1 : 2;
    for (std::size_t j = 0; j < 4; ++j) d.x(i, j) = nd(gen);
  }
  const auto m = fit(d, 1e6, 1e6);
  CHECK(max_abs(m.omega.matrix().data()) == 0.0);
  CHECK(m.delta == Vector(4, 0.0));
  CHECK(m.diagnostics.insample_error == doctest::Approx(30.0 / 70.0));
  CHECK(m.diagnostics.n1 == 30);
  CHECK(m.diagnostics.n2 == 40);
}

TEST_CASE("fit labels the failing stage") {
  LabeledDataset d{Matrix(3, 2), {1, 1, 2}};
  try {
    fit(d, 0.1, 0.1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ClassTooSmall);
    CHECK(std::string(e.what()).find("moments") != std::string::npos);
  }
}

TEST_CASE("predictions are location invariant") {
  const auto data = make_dataset({2, 10, 60, 60, 5});
  const auto test = make_test_set({2, 10, 60, 60, 5}, data.truth, 300);
  const Vector c{5.0, -3.0, 0.5, 8.0, -1.0, 2.0, 0.0, 4.0, -6.0, 1.5};
  auto shift = [&](LabeledDataset d) {
    for (std::size_t i = 0; i < d.n(); ++i)
      for (std::size_t j = 0; j < d.p(); ++j) d.x(i, j) += c[j];
    return d;
  };
  const auto a = fit(data.train, 0.05, 0.05);
  const auto b = fit(shift(data.train), 0.05, 0.05);
  const auto shifted_test = shift(test);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < test.n(); ++i)
    differ += classify(a, test.x.row(i)) != classify(b, shifted_test.x.row(i));
  CHECK(differ == 0);
}

TEST_CASE("joint positive scaling of the rule does not change decisions") {
  const auto data = make_dataset({2, 8, 50, 50, 3});
  const auto m = fit(data.train, 0.05, 0.05);
  const auto test = make_test_set({2, 8, 50, 50, 3}, data.truth, 200);
  for (double s : {0.125, 3.0, 1024.0}) {
    auto scaled = m;
    scaled.omega = SymMatrix::symmetrized(s * m.omega.matrix());
    for (double& v : scaled.delta) v *= s;
    scaled.eta *= s;
    for (std::size_t i = 0; i < test.n(); ++i) CHECK(classify(scaled, test.x.row(i)) == classify(m, test.x.row(i)));
  }
}

TEST_CASE("model files round-trip bit-exactly") {
  const auto data = make_dataset({2, 12, 40, 40, 9});
  auto m = fit(data.train, 0.03, 0.02);
  m.eta = 0.1 + 1e-17;
  m.delta[3] = -0.0;
  const auto path = temp_file("round_trip.json");
  save_model(m, path);
  const auto r = load_model(path);
  CHECK(r.mu == m.mu);
  CHECK(r.omega == m.omega);
  CHECK(r.delta == m.delta);
  CHECK(std::signbit(r.delta[3]));
  CHECK(r.eta == m.eta);
  CHECK(r.lambda == m.lambda);
  CHECK(r.lambda_delta == m.lambda_delta);
  CHECK(r.diagnostics.rho == m.diagnostics.rho);
  CHECK(r.diagnostics.admm_iterations == m.diagnostics.admm_iterations);
  CHECK(r.diagnostics.insample_error == m.diagnostics.insample_error);
  CHECK(r.diagnostics.n1 == m.diagnostics.n1);
  CHECK(r.diagnostics.admm_converged == m.diagnostics.admm_converged);
}

TEST_CASE("wrong schema version is rejected") {
  const auto data = make_dataset({3, 5, 20, 20, 1});
  const auto m = fit(data.train, 0.1, 0.1);
  auto doc = model_to_json(m);
  doc["schema_version"] = kModelSchemaVersion + 1;
  const auto path = temp_file("future.json");
  std::ofstream(path) << doc.dump();
  CHECK(code_of([&] { load_model(path); }) == Errc::SchemaVersionMismatch);
}

TEST_CASE("truncated and damaged files are rejected") {
  const auto data = make_dataset({3, 5, 20, 20, 1});
  const auto path = temp_file("whole.json");
  save_model(fit(data.train, 0.1, 0.1), path);
  std::string text;
  {
    std::ifstream in(path);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto cut = temp_file("cut.json");
  std::ofstream(cut) << text.substr(0, text.size() / 2);
  CHECK(code_of([&] { load_model(cut); }) == Errc::CorruptPayload);

  auto doc = nlohmann::json::parse(text);
  doc["arrays"]["delta"]["data"] = "AAAA";
  const auto bad = temp_file("short_array.json");
  std::ofstream(bad) << doc.dump();
  CHECK(code_of([&] { load_model(bad); }) == Errc::CorruptPayload);

  CHECK(code_of([] { load_model("/nonexistent/dir/model.json"); }) == Errc::IoError);
}

TEST_CASE("base64 round trip and rejection") {
  std::vector<unsigned char> bytes(256);
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<unsigned char>(i);
  for (std::size_t n : {0, 1, 2, 3, 4, 255, 256}) {
    std::span<const unsigned char> s(bytes.data(), n);
    CHECK(base64_decode(base64_encode(s)) == std::vector<unsigned char>(s.begin(), s.end()));
  }
  CHECK(base64_encode(std::vector<unsigned char>{'M', 'a', 'n'}) == "TWFu");
  CHECK(code_of([] { base64_decode("TW!u"); }) == Errc::CorruptPayload);
  CHECK(code_of([] { base64_decode("TWF"); }) == Errc::CorruptPayload);
}

TEST_CASE("truth files round-trip") {
  const auto data = make_dataset({5, 20, 30, 30, 4});
  const auto path = temp_file("truth.json");
  save_truth(data.truth, path);
  const auto t = load_truth(path);
  CHECK(t.mu1 == data.truth.mu1);
  CHECK(t.sigma2 == data.truth.sigma2);
  CHECK(t.omega_true == data.truth.omega_true);
  CHECK(t.delta_true == data.truth.delta_true);
}
