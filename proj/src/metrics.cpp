#include "quda/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "quda/error.hpp"

namespace quda {

double misclassification_rate(const QudaModel& model, const LabeledDataset& test) {
  if (test.n() == 0) throw Error(Errc::EmptyInput, "misclassification_rate: empty test set");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < test.n(); ++i)
    wrong += classify(model, test.x.row(i)) != test.labels[i] ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(test.n());
}

double misclassification_rate(const OracleRule& oracle, const LabeledDataset& test) {
  if (test.n() == 0) throw Error(Errc::EmptyInput, "misclassification_rate: empty test set");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < test.n(); ++i)
    wrong += oracle.classify(test.x.row(i)) != test.labels[i] ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(test.n());
}

IndexPairs upper_support(const SymMatrix& m, double threshold) {
  IndexPairs out;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i; j < m.dim(); ++j)
      if (std::abs(m(i, j)) > threshold) out.emplace_back(i, j);
  return out;
}

std::vector<std::size_t> vector_support(const Vector& v, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < v.size(); ++j)
    if (std::abs(v[j]) > threshold) out.push_back(j);
  return out;
}

SupportCounts support_metrics(const IndexPairs& omega_hat_support,
                              const std::vector<std::size_t>& delta_hat_support,
                              const SyntheticTruth& truth) {
  const std::size_t p = truth.dim();
  std::set<std::pair<std::size_t, std::size_t>> est;
  for (auto [i, j] : omega_hat_support) {
    if (i >= p || j >= p) {
      throw Error(Errc::ShapeMismatch, "interaction index out of range for p = " + std::to_string(p));
    }
    est.emplace(std::min(i, j), std::max(i, j));
  }
  std::set<std::size_t> est_main;
  for (std::size_t j : delta_hat_support) {
    if (j >= p) throw Error(Errc::ShapeMismatch, "main-effect index out of range for p = " + std::to_string(p));
    est_main.insert(j);
  }
  const IndexPairs true_inter = upper_support(truth.omega_true, Tolerances::truth_support);
  const std::vector<std::size_t> true_main = vector_support(truth.delta_true, Tolerances::truth_support);

  SupportCounts c;
  std::size_t hits = 0;
  for (const auto& e : true_inter) hits += est.count(e);
  c.fn_inter = true_inter.size() - hits;
  c.fp_inter = est.size() - hits;
  std::size_t main_hits = 0;
  for (std::size_t j : true_main) main_hits += est_main.count(j);
  c.fn_main = true_main.size() - main_hits;
  c.fp_main = est_main.size() - main_hits;
  return c;
}

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

BenchmarkSummary summarize(int model_id, std::size_t p, std::vector<ReplicationRecord> records) {
  BenchmarkSummary s;
  s.model_id = model_id;
  s.p = p;
  s.reps = records.size();
  auto column = [&](auto get) {
    std::vector<double> v;
    for (const auto& r : records) v.push_back(static_cast<double>(get(r)));
    return mean_se(v);
  };
  s.mr = column([](const ReplicationRecord& r) { return r.mr; });
  s.oracle_mr = column([](const ReplicationRecord& r) { return r.oracle_mr; });
  s.fp_main = column([](const ReplicationRecord& r) { return r.counts.fp_main; });
  s.fp_inter = column([](const ReplicationRecord& r) { return r.counts.fp_inter; });
  s.fn_main = column([](const ReplicationRecord& r) { return r.counts.fn_main; });
  s.fn_inter = column([](const ReplicationRecord& r) { return r.counts.fn_inter; });
  s.records = std::move(records);
  return s;
}

SyntheticSpec replication_spec(const SyntheticSpec& spec, std::size_t rep) {
  SyntheticSpec s = spec;
  s.seed = derive_seed(spec.seed, {0x5245u, static_cast<std::uint64_t>(rep)});
  return s;
}

ReplicationRecord run_replication(const SyntheticSpec& spec, std::size_t rep, std::size_t test_size,
                                  const CvConfig& cv, const AdmmConfig& admm) {
  const SyntheticSpec rs = replication_spec(spec, rep);
  const SyntheticData data = make_dataset(rs);
  CvConfig rcv = cv;
  rcv.seed = derive_seed(rs.seed, {0xC5u});
  const CvResult tuned = cv_select(data.train, rcv, admm);
  const QudaModel model = fit(data.train, tuned.lambda_star, tuned.lambda_delta_star, admm);
  const LabeledDataset test = make_test_set(rs, data.truth, test_size);

  ReplicationRecord r;
  r.rep = rep;
  r.seed = rs.seed;
  r.lambda = tuned.lambda_star;
  r.lambda_delta = tuned.lambda_delta_star;
  r.mr = misclassification_rate(model, test);
  r.oracle_mr = misclassification_rate(OracleRule(data.truth), test);
  const IndexPairs inter = upper_support(model.omega);
  const std::vector<std::size_t> main = vector_support(model.delta);
  r.counts = support_metrics(inter, main, data.truth);
  r.omega_support = inter.size();
  r.delta_support = main.size();
  r.admm_converged = model.diagnostics.admm_converged;
  return r;
}

BenchmarkSummary run_benchmark(const SyntheticSpec& spec, std::size_t reps, std::size_t test_size,
                               const CvConfig& cv, const AdmmConfig& admm) {
  spec.validate();
  if (reps < 2) throw Error(Errc::InvalidArgument, "benchmark needs at least 2 replications for a standard error");
  if (test_size == 0) throw Error(Errc::InvalidArgument, "test_size must be positive");
  std::vector<ReplicationRecord> records(reps);
  std::vector<std::exception_ptr> failures(reps);
  const auto n = static_cast<std::ptrdiff_t>(reps);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto rep = static_cast<std::size_t>(k);
    try {
      records[rep] = run_replication(spec, rep, test_size, cv, admm);
    } catch (...) {
      failures[rep] = std::current_exception();
    }
  }
  for (std::size_t rep = 0; rep < reps; ++rep) {
    if (!failures[rep]) continue;
    try {
      std::rethrow_exception(failures[rep]);
    } catch (const Error& e) {
      rethrow_in_stage(e, "replication " + std::to_string(rep));
    }
  }
  return summarize(spec.model_id, spec.p, std::move(records));
}

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cell(const MeanSe& s, double scale) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f (%.2f)", s.mean * scale, s.se * scale);
  return buf;
}

constexpr const char* kLogHeader =
    "model,p,rep,seed,lambda,lambda_delta,mr,oracle_mr,fp_main,fp_inter,fn_main,fn_inter,"
    "omega_support,delta_support,admm_converged";

template <typename T>
T parse_field(const std::string& s, std::size_t line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(Errc::ParseError, "replication log line " + std::to_string(line) + ": bad field '" + s + "'");
  }
  return v;
}

}  // namespace

void write_replication_csv(const std::vector<BenchmarkSummary>& runs, std::ostream& out) {
  out << "# interactions counted over unique entries (upper triangle incl. diagonal)\n";
  out << kLogHeader << '\n';
  for (const auto& run : runs)
    for (const auto& r : run.records) {
      out << run.model_id << ',' << run.p << ',' << r.rep << ',' << r.seed << ',' << g17(r.lambda) << ','
          << g17(r.lambda_delta) << ',' << g17(r.mr) << ',' << g17(r.oracle_mr) << ','
          << r.counts.fp_main << ',' << r.counts.fp_inter << ',' << r.counts.fn_main << ','
          << r.counts.fn_inter << ',' << r.omega_support << ',' << r.delta_support << ','
          << (r.admm_converged ? 1 : 0) << '\n';
    }
}

std::vector<BenchmarkSummary> read_replication_csv(std::istream& in) {
  std::map<std::pair<int, std::size_t>, std::vector<ReplicationRecord>> groups;
  std::vector<std::pair<int, std::size_t>> order;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kLogHeader) throw Error(Errc::ParseError, "replication log: unexpected header");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 15) {
      throw Error(Errc::ParseError, "replication log line " + std::to_string(lineno) + ": expected 15 fields");
    }
    const int model = parse_field<int>(f[0], lineno);
    const auto p = parse_field<std::size_t>(f[1], lineno);
    ReplicationRecord r;
    r.rep = parse_field<std::size_t>(f[2], lineno);
    r.seed = parse_field<std::uint64_t>(f[3], lineno);
    r.lambda = parse_field<double>(f[4], lineno);
    r.lambda_delta = parse_field<double>(f[5], lineno);
    r.mr = parse_field<double>(f[6], lineno);
    r.oracle_mr = parse_field<double>(f[7], lineno);
    r.counts.fp_main = parse_field<std::size_t>(f[8], lineno);
    r.counts.fp_inter = parse_field<std::size_t>(f[9], lineno);
    r.counts.fn_main = parse_field<std::size_t>(f[10], lineno);
    r.counts.fn_inter = parse_field<std::size_t>(f[11], lineno);
    r.omega_support = parse_field<std::size_t>(f[12], lineno);
    r.delta_support = parse_field<std::size_t>(f[13], lineno);
    r.admm_converged = parse_field<int>(f[14], lineno) != 0;
    const auto key = std::make_pair(model, p);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(r);
  }
  std::vector<BenchmarkSummary> out;
  for (const auto& key : order) out.push_back(summarize(key.first, key.second, groups[key]));
  return out;
}

std::string format_table(const std::vector<BenchmarkSummary>& runs) {
  std::ostringstream out;
  out << "| Model | p | Method | MR (%) | FP.main | FP.inter | FN.main | FN.inter |\n";
  out << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : runs) {
    out << "| " << r.model_id << " | " << r.p << " | QUDA | " << cell(r.mr, 100.0) << " | "
        << cell(r.fp_main, 1.0) << " | " << cell(r.fp_inter, 1.0) << " | " << cell(r.fn_main, 1.0)
        << " | " << cell(r.fn_inter, 1.0) << " |\n";
    out << "| " << r.model_id << " | " << r.p << " | Oracle | " << cell(r.oracle_mr, 100.0)
        << " | -- | -- | -- | -- |\n";
  }
  return out.str();
}

}  // namespace quda
