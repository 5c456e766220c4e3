#pragma once

// Evaluation metrics and the replication harness behind the benchmark tables.
//
// Interaction counts run over unique entries of Omega (upper triangle with
// the diagonal); main-effect counts over coordinates of delta. The true
// supports are the entries of omega_true / delta_true above 1e-10 in
// magnitude.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "quda/model.hpp"
#include "quda/synthgen.hpp"
#include "quda/tuning.hpp"

namespace quda {

using IndexPairs = std::vector<std::pair<std::size_t, std::size_t>>;

double misclassification_rate(const QudaModel& model, const LabeledDataset& test);
double misclassification_rate(const OracleRule& oracle, const LabeledDataset& test);

/// Unique (i <= j) pairs with |m(i, j)| > threshold.
IndexPairs upper_support(const SymMatrix& m, double threshold = 0.0);
std::vector<std::size_t> vector_support(const Vector& v, double threshold = 0.0);

struct SupportCounts {
  std::size_t fp_main = 0, fn_main = 0, fp_inter = 0, fn_inter = 0;
  friend bool operator==(const SupportCounts&, const SupportCounts&) = default;
};

/// Pairs may come in either orientation; they are folded onto i <= j.
SupportCounts support_metrics(const IndexPairs& omega_hat_support,
                              const std::vector<std::size_t>& delta_hat_support,
                              const SyntheticTruth& truth);

struct ReplicationRecord {
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  double lambda_delta = 0.0;
  double mr = 0.0;
  double oracle_mr = 0.0;
  SupportCounts counts;
  std::size_t omega_support = 0;  ///< unique entries
  std::size_t delta_support = 0;
  bool admm_converged = true;
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  ///< sample sd / sqrt(reps)
};

struct BenchmarkSummary {
  int model_id = 0;
  std::size_t p = 0;
  std::size_t reps = 0;
  MeanSe mr, oracle_mr, fp_main, fp_inter, fn_main, fn_inter;
  std::vector<ReplicationRecord> records;
};

MeanSe mean_se(const std::vector<double>& values);
BenchmarkSummary summarize(int model_id, std::size_t p, std::vector<ReplicationRecord> records);

/// Per replication: make_dataset -> cv_select -> fit -> evaluate on a fresh
/// test draw of `test_size` rows per class. Replications run in parallel;
/// seeds derive from (spec.seed, rep) so results are schedule-independent.
BenchmarkSummary run_benchmark(const SyntheticSpec& spec, std::size_t reps, std::size_t test_size,
                               const CvConfig& cv, const AdmmConfig& admm = {});

/// One replication, exposed for cross-checks against the CLI.
ReplicationRecord run_replication(const SyntheticSpec& spec, std::size_t rep, std::size_t test_size,
                                  const CvConfig& cv, const AdmmConfig& admm);
SyntheticSpec replication_spec(const SyntheticSpec& spec, std::size_t rep);

void write_replication_csv(const std::vector<BenchmarkSummary>& runs, std::ostream& out);
/// Parses the log written above back into (model_id, p, record) triples.
std::vector<BenchmarkSummary> read_replication_csv(std::istream& in);

/// "| Model | p | Method | MR (%) | FP.main | FP.inter | FN.main | FN.inter |" rows.
std::string format_table(const std::vector<BenchmarkSummary>& runs);

}  // namespace quda
