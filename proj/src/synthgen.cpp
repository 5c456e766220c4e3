#include "quda/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "quda/error.hpp"
#include "quda/kernels.hpp"

namespace quda {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed),
                                   static_cast<std::uint32_t>(seed >> 32)};
  for (std::uint64_t s : stream) {
    words.push_back(static_cast<std::uint32_t>(s));
    words.push_back(static_cast<std::uint32_t>(s >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

// Stream tags under a dataset seed.
constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kTestStream = 2;
constexpr std::uint64_t kModel5Stream = 5;

}  // namespace

Rng::Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream)
    : engine_(seeded_engine(seed, stream)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform_open_low()));
  const double t = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(t);
  return r * std::cos(t);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(Errc::InvalidArgument, "Rng::below(0)");
  const std::uint64_t limit = -n % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= limit) return x % n;
  }
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return seeded_engine(master, path)();
}

void SyntheticSpec::validate() const {
  if (model_id < 1 || model_id > 5) {
    throw Error(Errc::InvalidSpec, "model_id must be 1..5, got " + std::to_string(model_id));
  }
  if (p < 2) throw Error(Errc::InvalidSpec, "p must be at least 2");
  if (model_id == 1 && p < 50) {
    throw Error(Errc::InvalidSpec, "model 1 needs p >= 50 (fixed indices 10, 30, 50), got " +
                                       std::to_string(p));
  }
  if (n1 < 2 || n2 < 2) throw Error(Errc::InvalidSpec, "n1 and n2 must be at least 2");
}

SymMatrix random_sparse_symmetric(std::size_t p, std::size_t positions, Rng& rng) {
  const std::uint64_t slots = static_cast<std::uint64_t>(p) * (p + 1) / 2;
  positions = std::min<std::uint64_t>(positions, slots);
  std::set<std::uint64_t> chosen;
  while (chosen.size() < positions) chosen.insert(rng.below(slots));
  SymMatrix s(p);
  for (std::uint64_t slot : chosen) {
    // slot enumerates the upper triangle row by row.
    std::size_t i = 0;
    std::uint64_t rest = slot;
    while (rest >= p - i) {
      rest -= p - i;
      ++i;
    }
    const std::size_t j = i + static_cast<std::size_t>(rest);
    double v = 0.0;
    while (v == 0.0) v = 2.0 * rng.uniform() - 1.0;
    s.set(i, j, v);
  }
  return s;
}

std::optional<SymMatrix> scale_for_condition(const SymMatrix& s, double cond) {
  const SymEigen e = sym_eigen(s);
  const double hi = e.values.front();
  const double lo = e.values.back();
  // (1 + c hi) / (1 + c lo) = cond  =>  c = (cond - 1) / (hi - cond lo).
  const double denom = hi - cond * lo;
  if (!(hi > 0.0) || !(denom > 0.0)) return std::nullopt;
  const double c = (cond - 1.0) / denom;
  if (!(1.0 + c * lo > 0.0)) return std::nullopt;
  Matrix scaled = s.matrix();
  scaled *= c;
  return SymMatrix::symmetrized(scaled);
}

SymMatrix model5_difference(std::size_t p, std::size_t n1, std::uint64_t seed, int max_attempts,
                            const SparseDraw& draw) {
  const auto positions = static_cast<std::size_t>(std::lround(0.7 * static_cast<double>(n1)));
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    SymMatrix s;
    if (draw) {
      s = draw(static_cast<std::size_t>(attempt));
    } else {
      Rng rng(seed, {kModel5Stream, static_cast<std::uint64_t>(attempt)});
      s = random_sparse_symmetric(p, positions, rng);
    }
    if (auto scaled = scale_for_condition(s, 10.0)) return *scaled;
  }
  throw Error(Errc::NotPositiveDefinite, "model 5: no admissible sparse draw in " +
                                             std::to_string(max_attempts) + " attempts");
}

namespace {

SymMatrix ar1_precision(std::size_t p) {
  SymMatrix m(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) m.set(i, j, std::pow(0.5, static_cast<double>(j - i)));
  return m;
}

SymMatrix band_matrix(std::size_t p, double diag, double off) {
  SymMatrix m(p);
  for (std::size_t i = 0; i < p; ++i) {
    m.set(i, i, diag);
    if (i + 1 < p) m.set(i, i + 1, off);
  }
  return m;
}

SymMatrix model1_difference(std::size_t p) {
  SymMatrix d(p);
  // 1-based (10, 30, 50) in the published layout.
  d.set(9, 9, -0.3758);
  d.set(9, 29, 0.0616);
  d.set(9, 49, 0.2037);
  d.set(29, 29, -0.5482);
  d.set(29, 49, 0.0286);
  d.set(49, 49, -0.4614);
  return d;
}

}  // namespace

SyntheticTruth build_truth(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t p = spec.p;
  SymMatrix prec1;
  SymMatrix diff;
  switch (spec.model_id) {
    case 1:
      prec1 = band_matrix(p, 1.0, 0.3);
      diff = model1_difference(p);
      break;
    case 2:
      prec1 = ar1_precision(p);
      diff = SymMatrix::symmetrized(Matrix::identity(p));
      break;
    case 3:
      prec1 = ar1_precision(p);
      diff = SymMatrix(p);
      break;
    case 4:
      prec1 = ar1_precision(p);
      diff = band_matrix(p, 1.0, 0.5);
      break;
    case 5:
      prec1 = SymMatrix::symmetrized(Matrix::identity(p));
      diff = model5_difference(p, spec.n1, spec.seed);
      break;
  }
  const SymMatrix prec2 = SymMatrix::symmetrized(prec1.matrix() + diff.matrix());

  SyntheticTruth t;
  try {
    t.sigma1 = mat_inverse_spd(prec1);
    t.sigma2 = mat_inverse_spd(prec2);
  } catch (const Error& e) {
    rethrow_in_stage(e, "model " + std::to_string(spec.model_id));
  }
  Vector beta(p, 0.0);
  beta[0] = 0.6;
  beta[1] = 0.8;
  t.mu1 = mat_vec(t.sigma1.matrix(), beta);
  t.mu2.assign(p, 0.0);
  t.omega_true = diff;
  t.delta_true = mat_vec(prec1.matrix() + prec2.matrix(), t.mu1);
  return t;
}

GaussianSampler::GaussianSampler(Vector mu, const SymMatrix& sigma) : mu_(std::move(mu)) {
  if (sigma.dim() != mu_.size()) {
    throw Error(Errc::ShapeMismatch, "sampler: mean has " + std::to_string(mu_.size()) +
                                         " entries, covariance is " + std::to_string(sigma.dim()));
  }
  const SymEigen e = sym_eigen(sigma);
  const double scale = std::max(1.0, std::abs(e.values.front()));
  if (e.values.back() < -Tolerances::psd_slack * scale) {
    throw Error(Errc::NotPositiveDefinite, "sampler: covariance has eigenvalue " +
                                               std::to_string(e.values.back()));
  }
  const std::size_t p = mu_.size();
  factor_ = Matrix(p, p);
  for (std::size_t k = 0; k < p; ++k) {
    const double root = std::sqrt(std::max(e.values[k], 0.0));
    for (std::size_t i = 0; i < p; ++i) factor_(i, k) = e.vectors(i, k) * root;
  }
}

Matrix GaussianSampler::draw(std::size_t n, Rng& rng) const {
  const std::size_t p = dim();
  Matrix g(n, p);
  for (double& v : g.data()) v = rng.normal();
  Matrix out = kernels::multiply_nt(g, factor_);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < p; ++j) r[j] += mu_[j];
  }
  return out;
}

Matrix sample_mvn(const Vector& mu, const SymMatrix& sigma, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return GaussianSampler(mu, sigma).draw(n, rng);
}

LabeledDataset draw_labeled(const SyntheticTruth& truth, std::size_t n1, std::size_t n2, Rng& rng) {
  const Matrix x1 = GaussianSampler(truth.mu1, truth.sigma1).draw(n1, rng);
  const Matrix x2 = GaussianSampler(truth.mu2, truth.sigma2).draw(n2, rng);
  const std::size_t p = truth.dim();
  LabeledDataset d{Matrix(n1 + n2, p), std::vector<int>(n1 + n2, 1)};
  std::copy(x1.data().begin(), x1.data().end(), d.x.data().begin());
  std::copy(x2.data().begin(), x2.data().end(), d.x.data().begin() + static_cast<std::ptrdiff_t>(n1 * p));
  std::fill(d.labels.begin() + static_cast<std::ptrdiff_t>(n1), d.labels.end(), 2);
  return d;
}

SyntheticData make_dataset(const SyntheticSpec& spec) {
  SyntheticData out;
  out.truth = build_truth(spec);
  Rng rng(spec.seed, {kTrainStream});
  out.train = draw_labeled(out.truth, spec.n1, spec.n2, rng);
  return out;
}

LabeledDataset make_test_set(const SyntheticSpec& spec, const SyntheticTruth& truth,
                             std::size_t per_class) {
  Rng rng(spec.seed, {kTestStream});
  return draw_labeled(truth, per_class, per_class, rng);
}

}  // namespace quda
