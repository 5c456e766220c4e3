#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "quda/csv.hpp"
#include "quda/error.hpp"
#include "quda/kernels.hpp"
#include "quda/metrics.hpp"
#include "quda/model_io.hpp"
#include "quda/synthgen.hpp"
#include "quda/tuning.hpp"

namespace quda::cli {

namespace fs = std::filesystem;

namespace {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::NoConvergence:
    case Errc::NotPositiveDefinite:
    case Errc::NonPositiveRho:
    case Errc::ZeroDiagonal:
      return kNumericalFailure;
    case Errc::InvalidSpec:
    case Errc::InvalidArgument:
    case Errc::NegativeThreshold:
      return kUsage;
    default:
      return kDataError;
  }
}

struct SolverFlags {
  std::optional<double> rho;
  int max_iter = 500;
  double tol_abs = 1e-5;
  double tol_rel = 1e-4;

  void add(CLI::App* cmd) {
    cmd->add_option("--rho", rho, "ADMM penalty parameter (default: spectral heuristic)");
    cmd->add_option("--max-iter", max_iter, "ADMM iteration limit")->capture_default_str();
    cmd->add_option("--tol-abs", tol_abs, "ADMM absolute tolerance")->capture_default_str();
    cmd->add_option("--tol-rel", tol_rel, "ADMM relative tolerance")->capture_default_str();
  }
  AdmmConfig config() const {
    AdmmConfig c;
    c.rho = rho;
    c.max_iter = max_iter;
    c.tol_abs = tol_abs;
    c.tol_rel = tol_rel;
    c.validate();
    return c;
  }
};

struct CvFlags {
  int folds = 5;
  int grid_points = 8;
  double decades = 2.0;
  std::vector<double> lambda_grid, lambda_delta_grid;

  void add(CLI::App* cmd) {
    cmd->add_option("--folds", folds, "cross-validation folds")->capture_default_str();
    cmd->add_option("--grid-points", grid_points, "points per default grid")->capture_default_str();
    cmd->add_option("--grid-decades", decades, "decades spanned by default grids")->capture_default_str();
    cmd->add_option("--lambda-grid", lambda_grid, "explicit descending lambda grid")->delimiter(',');
    cmd->add_option("--lambda-delta-grid", lambda_delta_grid, "explicit descending lambda_delta grid")
        ->delimiter(',');
  }
  CvConfig config(std::uint64_t seed) const {
    CvConfig c;
    c.folds = folds;
    c.grid_points = grid_points;
    c.grid_decades = decades;
    c.lambda_grid = lambda_grid;
    c.lambda_delta_grid = lambda_delta_grid;
    c.seed = seed;
    c.validate();
    return c;
  }
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  return f;
}

std::vector<int> parse_models(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw Error(Errc::InvalidSpec, "bad model list '" + text + "'");
    }
  };
  if (dots != std::string::npos) {
    const int lo = to_int(text.substr(0, dots));
    const int hi = to_int(text.substr(dots + 2));
    for (int m = lo; m <= hi; ++m) out.push_back(m);
  } else {
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(to_int(tok));
  }
  if (out.empty()) throw Error(Errc::InvalidSpec, "empty model list");
  for (int m : out)
    if (m < 1 || m > 5) throw Error(Errc::InvalidSpec, "model ids must be in 1..5, got " + std::to_string(m));
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse quadratic discriminant analysis: fit, predict, tune, simulate, benchmark"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw a synthetic train/test split and its truth");
  SyntheticSpec sim_spec;
  std::size_t sim_test = 1000;
  fs::path sim_dir = ".";
  sim->add_option("--model", sim_spec.model_id, "benchmark model 1..5")->required();
  sim->add_option("--p", sim_spec.p, "dimension")->capture_default_str();
  sim->add_option("--n1", sim_spec.n1, "class 1 training rows")->capture_default_str();
  sim->add_option("--n2", sim_spec.n2, "class 2 training rows")->capture_default_str();
  sim->add_option("--seed", sim_spec.seed, "master seed")->capture_default_str();
  sim->add_option("--test-size", sim_test, "test rows per class")->capture_default_str();
  sim->add_option("--out-dir", sim_dir, "output directory")->capture_default_str();

  // fit
  auto* fitc = app.add_subcommand("fit", "fit a model from a labeled CSV");
  fs::path fit_data, fit_out = "model.json", fit_cv_table;
  std::string fit_label = "label";
  std::optional<double> fit_lambda, fit_lambda_delta;
  bool fit_cv = false;
  std::uint64_t fit_seed = 1;
  SolverFlags fit_solver;
  CvFlags fit_cvflags;
  fitc->add_option("--data", fit_data, "training CSV (header row required)")->required();
  fitc->add_option("--label", fit_label, "label column name (values 1/2)")->capture_default_str();
  fitc->add_option("--lambda", fit_lambda, "penalty for Omega");
  fitc->add_option("--lambda-delta", fit_lambda_delta, "penalty for delta");
  fitc->add_flag("--cv", fit_cv, "choose both penalties by cross-validation");
  fitc->add_option("--seed", fit_seed, "fold assignment seed")->capture_default_str();
  fitc->add_option("--out", fit_out, "model file")->capture_default_str();
  fitc->add_option("--cv-table", fit_cv_table, "write the CV surface as CSV");
  fit_solver.add(fitc);
  fit_cvflags.add(fitc);

  // predict
  auto* pred = app.add_subcommand("predict", "classify rows of a CSV with a saved model");
  fs::path pred_model, pred_data, pred_out;
  std::string pred_label = "label";
  bool pred_scores = false;
  pred->add_option("--model", pred_model, "model file")->required();
  pred->add_option("--data", pred_data, "feature CSV; a label column, if present, is ignored for features")
      ->required();
  pred->add_option("--label", pred_label, "label column name")->capture_default_str();
  pred->add_option("--out", pred_out, "predictions CSV (default: stdout)");
  pred->add_flag("--scores", pred_scores, "add the discriminant value column");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "replicated synthetic benchmark with CV tuning");
  std::string bench_models = "2";
  SyntheticSpec bench_spec;
  std::size_t bench_reps = 20, bench_test = 1000;
  fs::path bench_log = "benchmark_log.csv", bench_md;
  SolverFlags bench_solver;
  CvFlags bench_cv;
  bench->add_option("--models", bench_models, "model ids, e.g. 2, 1,3 or 1..5")->capture_default_str();
  bench->add_option("--p", bench_spec.p, "dimension")->capture_default_str();
  bench->add_option("--n1", bench_spec.n1, "class 1 training rows")->capture_default_str();
  bench->add_option("--n2", bench_spec.n2, "class 2 training rows")->capture_default_str();
  bench->add_option("--reps", bench_reps, "replications (>= 2)")->capture_default_str();
  bench->add_option("--test-size", bench_test, "test rows per class")->capture_default_str();
  bench->add_option("--seed", bench_spec.seed, "master seed")->capture_default_str();
  bench->add_option("--log", bench_log, "per-replication CSV log")->capture_default_str();
  bench->add_option("--markdown", bench_md, "also write the table to this file");
  bench_solver.add(bench);
  bench_cv.add(bench);

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (threads > 0) kernels::set_threads(threads);

  try {
    if (sim->parsed()) {
      sim_spec.validate();
      if (sim_test == 0) throw Error(Errc::InvalidSpec, "--test-size must be positive");
      const SyntheticData data = make_dataset(sim_spec);
      const LabeledDataset test = make_test_set(sim_spec, data.truth, sim_test);
      fs::create_directories(sim_dir);
      const fs::path train_path = sim_dir / "train.csv";
      const fs::path test_path = sim_dir / "test.csv";
      const fs::path truth_path = sim_dir / "truth.json";
      {
        auto f = open_out(train_path);
        write_dataset_csv(data.train, f);
      }
      {
        auto f = open_out(test_path);
        write_dataset_csv(test, f);
      }
      save_truth(data.truth, truth_path,
                 {{"model", sim_spec.model_id}, {"p", sim_spec.p}, {"n1", sim_spec.n1},
                  {"n2", sim_spec.n2}, {"seed", sim_spec.seed}, {"test_per_class", sim_test}});
      out << "wrote " << train_path.string() << " (" << data.train.n() << " rows)\n";
      out << "wrote " << test_path.string() << " (" << test.n() << " rows)\n";
      out << "wrote " << truth_path.string() << "\n";
      return kOk;
    }

    if (fitc->parsed()) {
      if (!fit_cv && (!fit_lambda || !fit_lambda_delta)) {
        err << "error: fit needs --lambda and --lambda-delta, or --cv\n";
        return kUsage;
      }
      const AdmmConfig admm = fit_solver.config();
      const LabeledDataset data = to_dataset(read_csv(fit_data, fit_label, true));
      double lambda = fit_lambda.value_or(0.0);
      double lambda_delta = fit_lambda_delta.value_or(0.0);
      std::optional<CvResult> cv;
      if (fit_cv) {
        cv = cv_select(data, fit_cvflags.config(fit_seed), admm);
        lambda = cv->lambda_star;
        lambda_delta = cv->lambda_delta_star;
        if (!fit_cv_table.empty()) {
          auto f = open_out(fit_cv_table);
          write_cv_table_csv(*cv, f);
        }
      }
      const QudaModel model = fit(data, lambda, lambda_delta, admm);
      save_model(model, fit_out);
      const auto& d = model.diagnostics;
      out << "rows            " << data.n() << " (class 1: " << d.n1 << ", class 2: " << d.n2 << ")\n";
      out << "features        " << data.p() << "\n";
      if (cv) {
        out << "cv              " << fit_cvflags.folds << " folds, " << cv->lambda_grid.size() << " x "
            << cv->lambda_delta_grid.size() << " grid, mean MR "
            << format_number(cv->table[cv->best_cell].mean_mr) << "\n";
      }
      out << "lambda          " << format_number(lambda) << "\n";
      out << "lambda_delta    " << format_number(lambda_delta) << "\n";
      out << "rho             " << format_number(d.rho) << "\n";
      out << "admm            " << d.admm_iterations << " iterations, primal "
          << format_number(d.admm_primal_residual) << ", dual " << format_number(d.admm_dual_residual)
          << (d.admm_converged ? ", converged" : ", NOT CONVERGED") << "\n";
      out << "lasso           " << d.cd_sweeps << " sweeps, kkt " << format_number(d.cd_kkt_residual)
          << (d.cd_converged ? "" : ", NOT CONVERGED") << "\n";
      out << "omega support   " << upper_support(model.omega).size() << " unique entries\n";
      out << "delta support   " << vector_support(model.delta).size() << " coordinates\n";
      out << "eta             " << format_number(model.eta) << "\n";
      out << "in-sample error " << format_number(d.insample_error) << "\n";
      out << "model           " << fit_out.string() << "\n";
      if (!d.admm_converged) err << "warning: ADMM hit --max-iter before meeting its tolerances\n";
      return kOk;
    }

    if (pred->parsed()) {
      const QudaModel model = load_model(pred_model);
      const CsvTable table = read_csv(pred_data, pred_label, false);
      if (table.x.cols() != model.dim()) {
        throw Error(Errc::ShapeMismatch, "DimensionMismatch: model expects p = " + std::to_string(model.dim()) +
                                             " features, " + pred_data.string() + " has " +
                                             std::to_string(table.x.cols()));
      }
      std::ofstream file;
      std::ostream* sink = &out;
      if (!pred_out.empty()) {
        file = open_out(pred_out);
        sink = &file;
      }
      *sink << "prediction" << (pred_scores ? ",score" : "") << "\n";
      std::size_t wrong = 0;
      for (std::size_t i = 0; i < table.x.rows(); ++i) {
        const double score = discriminant(model, table.x.row(i));
        const int cls = score > 0.0 ? 1 : 2;
        *sink << cls;
        if (pred_scores) *sink << ',' << format_number(score);
        *sink << "\n";
        if (table.labels) wrong += cls != (*table.labels)[i] ? 1 : 0;
      }
      if (table.labels && table.x.rows() > 0) {
        err << "error rate " << format_number(static_cast<double>(wrong) / static_cast<double>(table.x.rows()))
            << " (" << wrong << " of " << table.x.rows() << ")\n";
      }
      return kOk;
    }

    if (bench->parsed()) {
      if (bench_reps < 2) {
        err << "error: --reps must be at least 2 (a standard error needs two replications)\n";
        return kUsage;
      }
      const AdmmConfig admm = bench_solver.config();
      const CvConfig cv = bench_cv.config(bench_spec.seed);
      std::vector<BenchmarkSummary> runs;
      for (int model : parse_models(bench_models)) {
        SyntheticSpec spec = bench_spec;
        spec.model_id = model;
        runs.push_back(run_benchmark(spec, bench_reps, bench_test, cv, admm));
      }
      {
        auto f = open_out(bench_log);
        write_replication_csv(runs, f);
      }
      const std::string table = format_table(runs);
      out << table;
      if (!bench_md.empty()) {
        auto f = open_out(bench_md);
        f << table;
      }
      err << "replication log: " << bench_log.string() << "\n";
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

}  // namespace quda::cli
