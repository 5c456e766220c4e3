#include "quda/intercept.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "quda/error.hpp"

namespace quda {

double discriminant_raw(std::span<const double> mu, const SymMatrix& omega,
                        std::span<const double> delta, std::span<const double> z) {
  const std::size_t p = mu.size();
  if (z.size() != p || delta.size() != p || omega.dim() != p) {
    throw Error(Errc::ShapeMismatch, "discriminant: expected " + std::to_string(p) +
                                         " features, got " + std::to_string(z.size()));
  }
  std::vector<double> c(p);
  for (std::size_t j = 0; j < p; ++j) c[j] = z[j] - mu[j];
  double quad = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    if (c[i] == 0.0) continue;
    auto row = omega.matrix().row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < p; ++j) s += row[j] * c[j];
    quad += c[i] * s;
  }
  return quad + dot(delta, c);
}

EtaSearch search_eta(std::span<const ScoredSample> samples) {
  const std::size_t n = samples.size();
  if (n == 0) throw Error(Errc::EmptyInput, "search_eta: no samples");

  std::vector<ScoredSample> sorted(samples.begin(), samples.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const ScoredSample& a, const ScoredSample& b) {
    return a.score < b.score || (a.score == b.score && a.label01 < b.label01);
  });

  // errors(k) = ones among the first k + zeros among the rest.
  std::size_t zeros = 0;
  for (const auto& s : sorted) zeros += s.label01 == 0 ? 1 : 0;

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  std::size_t best_errors = std::numeric_limits<std::size_t>::max();
  double best_width = -1.0;
  std::size_t ones_below = 0;
  std::size_t zeros_below = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) {
      (sorted[k - 1].label01 == 1 ? ones_below : zeros_below) += 1;
    }
    double width;
    if (k == 0 || k == n) {
      width = inf;
    } else {
      width = sorted[k].score - sorted[k - 1].score;
      if (!(width > 0.0)) continue;
    }
    const std::size_t errors = ones_below + (zeros - zeros_below);
    if (errors < best_errors || (errors == best_errors && width > best_width)) {
      best_errors = errors;
      best_width = width;
      best_k = k;
    }
  }

  EtaSearch out;
  out.k_star = best_k;
  out.errors = best_errors;
  out.insample_error = static_cast<double>(best_errors) / static_cast<double>(n);
  if (best_k == 0) {
    out.eta = -sorted.front().score + 1.0;
  } else if (best_k == n) {
    out.eta = -sorted.back().score - 1.0;
  } else {
    out.eta = -0.5 * (sorted[best_k - 1].score + sorted[best_k].score);
  }
  return out;
}

}  // namespace quda
