#include "quda/moments.hpp"

#include <algorithm>
#include <string>

#include "quda/error.hpp"
#include "quda/kernels.hpp"

namespace quda {

void LabeledDataset::validate() const {
  if (x.rows() != labels.size()) {
    throw Error(Errc::ShapeMismatch, std::to_string(x.rows()) + " rows but " +
                                         std::to_string(labels.size()) + " labels");
  }
  if (!all_finite(x.data())) throw Error(Errc::NonFinite, "dataset contains NaN or Inf");
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] != 1 && labels[i] != 2) {
      throw Error(Errc::InvalidLabel, "row " + std::to_string(i) + " has label " +
                                          std::to_string(labels[i]) + " (expected 1 or 2)");
    }
}

LabeledDataset LabeledDataset::subset(const std::vector<std::size_t>& rows) const {
  LabeledDataset out{Matrix(rows.size(), p()), std::vector<int>(rows.size())};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto src = x.row(rows[r]);
    std::copy(src.begin(), src.end(), out.x.row(r).begin());
    out.labels[r] = labels[rows[r]];
  }
  return out;
}

namespace {

void class_moments(const LabeledDataset& data, int label, Vector& mu, SymMatrix& sigma,
                   std::size_t& count) {
  const std::size_t p = data.p();
  count = 0;
  mu.assign(p, 0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.labels[i] != label) continue;
    ++count;
    auto r = data.x.row(i);
    for (std::size_t j = 0; j < p; ++j) mu[j] += r[j];
  }
  if (count == 0) throw Error(Errc::MissingClass, "no observations with label " + std::to_string(label));
  if (count < 2) {
    throw Error(Errc::ClassTooSmall, "class " + std::to_string(label) + " has " +
                                         std::to_string(count) + " observation(s), need at least 2");
  }
  for (double& m : mu) m /= static_cast<double>(count);

  Matrix centered(count, p);
  std::size_t r = 0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.labels[i] != label) continue;
    auto src = data.x.row(i);
    auto dst = centered.row(r++);
    for (std::size_t j = 0; j < p; ++j) dst[j] = src[j] - mu[j];
  }
  Matrix cross = kernels::multiply_tn(centered, centered);
  cross *= 1.0 / static_cast<double>(count);
  // Upper triangle mirrored so the result is exactly symmetric.
  sigma = SymMatrix(p);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a; b < p; ++b) sigma.set(a, b, cross(a, b));
}

}  // namespace

ClassMoments estimate_moments(const LabeledDataset& data) {
  data.validate();
  if (data.p() == 0) throw Error(Errc::ShapeMismatch, "dataset has no feature columns");
  ClassMoments m;
  class_moments(data, 1, m.mu1, m.sigma1, m.n1);
  class_moments(data, 2, m.mu2, m.sigma2, m.n2);
  return m;
}

}  // namespace quda
