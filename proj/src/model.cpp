#include "quda/model.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "quda/error.hpp"
#include "quda/intercept.hpp"

namespace quda {

void QudaModel::validate() const {
  const std::size_t p = mu.size();
  if (p == 0 || omega.dim() != p || delta.size() != p) {
    throw Error(Errc::ShapeMismatch, "model components disagree in dimension");
  }
  if (!all_finite(mu) || !all_finite(delta) || !all_finite(omega.matrix().data()) ||
      !std::isfinite(eta)) {
    throw Error(Errc::NonFinite, "model contains NaN or Inf");
  }
}

double discriminant(const QudaModel& model, std::span<const double> z) {
  return discriminant_raw(model.mu, model.omega, model.delta, z) + model.eta;
}

int classify(const QudaModel& model, std::span<const double> z) {
  return discriminant(model, z) > 0.0 ? 1 : 2;
}

QudaModel assemble_model(const ClassMoments& m, const OmegaSolution& omega,
                         const DeltaSolution& delta, const LabeledDataset& train) {
  QudaModel model;
  const std::size_t p = m.p();
  model.mu.resize(p);
  for (std::size_t j = 0; j < p; ++j) model.mu[j] = 0.5 * (m.mu1[j] + m.mu2[j]);
  model.omega = omega.omega;
  model.delta = delta.delta;
  model.lambda = omega.lambda;
  model.lambda_delta = delta.lambda_delta;

  std::vector<ScoredSample> scored(train.n());
  for (std::size_t i = 0; i < train.n(); ++i) {
    scored[i].score = discriminant_raw(model.mu, model.omega, model.delta, train.x.row(i));
    scored[i].label01 = train.labels[i] == 1 ? 1 : 0;
  }
  const EtaSearch eta = search_eta(scored);
  model.eta = eta.eta;

  auto& d = model.diagnostics;
  d.rho = omega.rho;
  d.admm_iterations = omega.iterations;
  d.admm_primal_residual = omega.primal_residual;
  d.admm_dual_residual = omega.dual_residual;
  d.admm_converged = omega.converged;
  d.cd_sweeps = delta.iterations;
  d.cd_kkt_residual = delta.kkt_residual;
  d.cd_converged = delta.converged;
  d.insample_error = eta.insample_error;
  d.n1 = m.n1;
  d.n2 = m.n2;
  return model;
}

QudaModel fit(const LabeledDataset& data, double lambda, double lambda_delta, const AdmmConfig& cfg) {
  ClassMoments m;
  try {
    m = estimate_moments(data);
  } catch (const Error& e) {
    rethrow_in_stage(e, "moments");
  }
  OmegaSolution omega;
  try {
    omega = solve_omega(m, lambda, cfg);
  } catch (const Error& e) {
    rethrow_in_stage(e, "omega");
  }
  DeltaSolution delta;
  try {
    delta = solve_delta(m, compute_gamma_hat(m, omega.omega), lambda_delta);
  } catch (const Error& e) {
    rethrow_in_stage(e, "delta");
  }
  try {
    return assemble_model(m, omega, delta, data);
  } catch (const Error& e) {
    rethrow_in_stage(e, "intercept");
  }
}

OracleRule::OracleRule(const SyntheticTruth& truth)
    : mu1_(truth.mu1),
      mu2_(truth.mu2),
      prec1_(mat_inverse_spd(truth.sigma1)),
      prec2_(mat_inverse_spd(truth.sigma2)) {
  if (!(truth.pi1 > 0.0) || !(truth.pi2 > 0.0)) {
    throw Error(Errc::InvalidArgument, "class priors must be positive");
  }
  offset_ = std::log(truth.pi1) - std::log(truth.pi2) -
            0.5 * (log_det_spd(truth.sigma1) - log_det_spd(truth.sigma2));
}

double OracleRule::log_ratio(std::span<const double> z) const {
  auto quad = [&](const Vector& mu, const SymMatrix& prec) {
    if (z.size() != mu.size()) {
      throw Error(Errc::ShapeMismatch, "oracle: expected " + std::to_string(mu.size()) +
                                           " features, got " + std::to_string(z.size()));
    }
    Vector c(mu.size());
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = z[j] - mu[j];
    return dot(c, mat_vec(prec.matrix(), c));
  };
  return offset_ - 0.5 * quad(mu1_, prec1_) + 0.5 * quad(mu2_, prec2_);
}

int oracle_classify(const SyntheticTruth& truth, std::span<const double> z) {
  return OracleRule(truth).classify(z);
}

QudaModel model_from_truth(const SyntheticTruth& truth) {
  const std::size_t p = truth.dim();
  QudaModel model;
  model.mu.resize(p);
  Vector dmu(p);
  for (std::size_t j = 0; j < p; ++j) {
    model.mu[j] = 0.5 * (truth.mu1[j] + truth.mu2[j]);
    dmu[j] = truth.mu1[j] - truth.mu2[j];
  }
  model.omega = truth.omega_true;
  model.delta = truth.delta_true;
  model.eta = 2.0 * std::log(truth.pi1 / truth.pi2) +
              0.25 * dot(dmu, mat_vec(truth.omega_true.matrix(), dmu)) +
              log_det_spd(truth.sigma2) - log_det_spd(truth.sigma1);
  return model;
}

}  // namespace quda
