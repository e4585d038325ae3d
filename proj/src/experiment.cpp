#include "booom/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "booom/config.hpp"
#include "booom/engine.hpp"
#include "booom/errors.hpp"
#include "booom/external.hpp"
#include "booom/matrix_io.hpp"
#include "booom/metrics.hpp"
#include "booom/objectives.hpp"
#include "booom/report.hpp"
#include "booom/synthgen.hpp"

namespace booom {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;

// Shared failure-to-exit-code policy: configuration problems are exit 2,
// anything wrong with input data (files, shapes, labels, reflections) is
// exit 3, and everything else is a runtime failure, exit 1.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const FeasibilityError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ReflectionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

double elapsed_seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::optional<BenchmarkKind> benchmark_kind(const std::string& name) {
  if (name == "ackley") return BenchmarkKind::ackley;
  if (name == "griewank") return BenchmarkKind::griewank;
  if (name == "rosenbrock") return BenchmarkKind::rosenbrock;
  if (name == "rastrigin") return BenchmarkKind::rastrigin;
  return std::nullopt;
}

void apply_env_workers(BooomConfig& engine) {
  const char* env = std::getenv("BOOOM_WORKERS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long workers = std::strtol(env, &end, 10);
  if (*end != '\0' || workers < 1) {
    throw ConfigError("BOOOM_WORKERS must be a positive integer, got '" + std::string(env) +
                      "'");
  }
  engine.workers = static_cast<int>(workers);
}

// Search parameters from the config file, defaults from BooomConfig; the
// BOOOM_WORKERS environment variable wins over the config's worker count.
BooomConfig engine_config(const ConfigMap& cfg) {
  BooomConfig engine;
  engine.s_initial = cfg.get_double("s_initial", engine.s_initial);
  engine.rho = cfg.get_double("rho", engine.rho);
  engine.phi = cfg.get_double("phi", engine.phi);
  engine.tau1 = cfg.get_double("tau1", engine.tau1);
  engine.tau2 = cfg.get_double("tau2", engine.tau2);
  engine.max_iter = static_cast<int>(cfg.get_int("max_iter", engine.max_iter));
  engine.max_runs = static_cast<int>(cfg.get_int("max_runs", engine.max_runs));
  engine.seed = cfg.get_seed("seed", engine.seed);
  engine.workers = static_cast<int>(cfg.get_int("workers", engine.workers));
  engine.budget_seconds = cfg.get_double("budget_seconds", engine.budget_seconds);
  engine.cold_restarts = cfg.get_bool("cold_restarts", engine.cold_restarts);
  apply_env_workers(engine);
  try {
    engine.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return engine;
}

void check_dims(int p, int d) {
  if (p < 1) {
    throw ConfigError("p must be >= 1 (got p=" + std::to_string(p) + ")");
  }
  if (d < 1 || d > p) {
    throw ConfigError("d must satisfy 1 <= d <= p (got d=" + std::to_string(d) +
                      ", p=" + std::to_string(p) + ")");
  }
}

// Every matrix in the file, one after another, each in matrix text format.
std::vector<Eigen::MatrixXd> read_stacked_matrices(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file: " + path);
  std::vector<Eigen::MatrixXd> matrices;
  while (true) {
    in >> std::ws;
    if (in.eof()) break;
    matrices.push_back(read_matrix_text(in));
  }
  if (matrices.empty()) throw InputError("no matrices in file: " + path);
  return matrices;
}

// Companion writer: the matrices back to back, each in matrix text format,
// exactly what read_stacked_matrices parses.
void write_stacked_matrices(const std::string& path, const std::vector<Eigen::MatrixXd>& ms) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write matrix file: " + path);
  for (const Eigen::MatrixXd& m : ms) write_matrix_text(out, m);
}

std::vector<int> read_labels(const std::string& path, Eigen::Index expected_rows) {
  const Eigen::MatrixXd raw = read_matrix_file(path);
  if (raw.cols() != 1) {
    throw InputError("labels file must hold one column, got " + std::to_string(raw.cols()) +
                     ": " + path);
  }
  if (raw.rows() != expected_rows) {
    throw InputError("labels file has " + std::to_string(raw.rows()) + " rows but the data has " +
                     std::to_string(expected_rows) + ": " + path);
  }
  std::vector<int> labels(static_cast<size_t>(raw.rows()));
  for (Eigen::Index r = 0; r < raw.rows(); ++r) {
    if (raw(r, 0) == 0.0) {
      labels[static_cast<size_t>(r)] = 0;
    } else if (raw(r, 0) == 1.0) {
      labels[static_cast<size_t>(r)] = 1;
    } else {
      throw InputError("labels must be 0 or 1, got " + format_double(raw(r, 0)) + ": " + path);
    }
  }
  return labels;
}

std::vector<std::string> split_command(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> words;
  std::string word;
  while (in >> word) words.push_back(word);
  return words;
}

/* ---------------------------------------------------------------------- */
/* Problem construction from a config                                      */
/* ---------------------------------------------------------------------- */

// The objective plus whatever ground truth the construction step knows —
// generated instances keep their planted structure so the summary can carry
// verification metrics.
struct Problem {
  std::unique_ptr<Objective> objective;
  int p = 0;
  int d = 0;
  bool benchmark = false;                        // known global minimum 0 at I
  std::optional<Eigen::MatrixXd> hamiltonian;    // rritz operator
  std::optional<LowRankSparseInstance> lowrank;  // generated lrsparse
  std::optional<IcaInstance> ica;                // generated ica
  std::optional<VarimaxInstance> varimax;        // generated varimax
  std::optional<OjdInstance> ojd;                // generated ojd
  std::optional<Eigen::MatrixXd> sspca_x;        // sspca data (either source)
  std::optional<std::vector<int>> sspca_y;
  ExternalObjective* external = nullptr;  // owned by `objective`
};

// True when generator output is requested; false for data files. Both are
// driven by the `data` key; generators additionally consume `gen_seed`.
bool wants_generated(const ConfigMap& cfg) {
  const std::string source = cfg.get_string("data", "generated");
  if (source == "generated") return true;
  if (source == "files") return false;
  throw ConfigError("data must be 'generated' or 'files', got '" + source + "'");
}

Problem build_problem(const ConfigMap& cfg, const BooomConfig& engine) {
  Problem prob;
  const std::string name = cfg.get_string("objective");
  prob.p = static_cast<int>(cfg.get_int("p"));

  if (const auto kind = benchmark_kind(name)) {
    prob.d = static_cast<int>(cfg.get_int("d", prob.p));
    check_dims(prob.p, prob.d);
    if (prob.d != prob.p) {
      throw ConfigError("benchmark objectives live on square frames: d must equal p (got d=" +
                        std::to_string(prob.d) + ", p=" + std::to_string(prob.p) + ")");
    }
    prob.objective = std::make_unique<ModifiedBenchmark>(*kind, prob.p);
    prob.benchmark = true;
    return prob;
  }

  if (name == "external") {
    prob.d = static_cast<int>(cfg.get_int("d"));
    check_dims(prob.p, prob.d);
    ExternalObjectiveSpec spec;
    spec.command = split_command(cfg.get_string("command"));
    spec.timeout_seconds = cfg.get_double("timeout", spec.timeout_seconds);
    spec.max_restarts = static_cast<int>(cfg.get_int("max_restarts", spec.max_restarts));
    auto external =
        std::make_unique<ExternalObjective>(std::move(spec), prob.p, prob.d, engine.workers);
    prob.external = external.get();
    prob.objective = std::move(external);
    return prob;
  }

  const bool generated = wants_generated(cfg);
  std::mt19937_64 rng(cfg.get_seed("gen_seed", 0));

  if (name == "hetquad") {
    std::vector<Eigen::MatrixXd> ms;
    if (generated) {
      prob.d = static_cast<int>(cfg.get_int("d"));
      check_dims(prob.p, prob.d);
      PsdPattern pattern = PsdPattern::random;
      const std::string pattern_name = cfg.get_string("psd_pattern", "random");
      try {
        pattern = psd_pattern_from_string(pattern_name);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      ms = gen_psd_set(pattern, prob.p, prob.d, rng);
    } else {
      ms = read_stacked_matrices(cfg.get_string("matrices_file"));
      prob.d = static_cast<int>(cfg.get_int("d", static_cast<long>(ms.size())));
      if (prob.d != static_cast<int>(ms.size())) {
        throw ConfigError("d must match the number of matrices in matrices_file (got d=" +
                          std::to_string(prob.d) + ", matrices=" + std::to_string(ms.size()) +
                          ")");
      }
      check_dims(prob.p, prob.d);
      for (const Eigen::MatrixXd& m : ms) {
        if (m.rows() != prob.p || m.cols() != prob.p) {
          throw InputError("hetquad matrices must all be " + std::to_string(prob.p) + "x" +
                           std::to_string(prob.p));
        }
      }
    }
    prob.objective = std::make_unique<HeteroQuadratic>(std::move(ms));
    return prob;
  }

  if (name == "rritz") {
    prob.d = static_cast<int>(cfg.get_int("d"));
    check_dims(prob.p, prob.d);
    Eigen::MatrixXd h;
    if (generated) {
      std::optional<Eigen::VectorXd> spectrum;
      if (cfg.contains("spectrum")) {
        const std::vector<double> values = cfg.get_double_list("spectrum");
        if (static_cast<int>(values.size()) != prob.p) {
          throw ConfigError("spectrum must list exactly p=" + std::to_string(prob.p) +
                            " values, got " + std::to_string(values.size()));
        }
        spectrum = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                     static_cast<Eigen::Index>(values.size()));
      }
      h = gen_reduced_hamiltonian(prob.p, rng, spectrum);
    } else {
      h = read_matrix_file(cfg.get_string("matrix_file"));
      if (h.rows() != prob.p || h.cols() != prob.p) {
        throw InputError("matrix_file must hold a " + std::to_string(prob.p) + "x" +
                         std::to_string(prob.p) + " operator");
      }
    }
    prob.hamiltonian = h;
    prob.objective = std::make_unique<RayleighRitz>(std::move(h), prob.d);
    return prob;
  }

  if (name == "lrsparse") {
    prob.d = static_cast<int>(cfg.get_int("d"));
    check_dims(prob.p, prob.d);
    std::optional<double> lambda;
    if (cfg.contains("lambda")) lambda = cfg.get_double("lambda");
    Eigen::MatrixXd x;
    if (generated) {
      const int n = static_cast<int>(cfg.get_int("n", 50));
      LowRankSparseInstance inst = gen_lowrank_sparse(n, prob.p, prob.d, rng);
      x = inst.x;
      prob.lowrank = std::move(inst);
    } else {
      x = read_matrix_file(cfg.get_string("x_file"));
      if (x.cols() != prob.p) {
        throw InputError("x_file has " + std::to_string(x.cols()) +
                         " columns but the config says p=" + std::to_string(prob.p));
      }
    }
    prob.objective = std::make_unique<LrSparse>(std::move(x), prob.d, lambda);
    return prob;
  }

  if (name == "ica") {
    prob.d = static_cast<int>(cfg.get_int("d", prob.p));
    check_dims(prob.p, prob.d);
    if (prob.d != prob.p) {
      throw ConfigError("ica estimates a square unmixing frame: d must equal p (got d=" +
                        std::to_string(prob.d) + ", p=" + std::to_string(prob.p) + ")");
    }
    Eigen::MatrixXd xw;
    if (generated) {
      const int n = static_cast<int>(cfg.get_int("n", 2000));
      IcaInstance inst = gen_ica(prob.p, n, rng);
      xw = inst.xw;
      prob.ica = std::move(inst);
    } else {
      xw = read_matrix_file(cfg.get_string("xw_file"));
      if (xw.rows() != prob.p) {
        throw InputError("xw_file has " + std::to_string(xw.rows()) +
                         " rows but the config says p=" + std::to_string(prob.p));
      }
    }
    prob.objective = std::make_unique<IcaLogcosh>(std::move(xw));
    return prob;
  }

  if (name == "varimax") {
    prob.d = static_cast<int>(cfg.get_int("d", prob.p));
    check_dims(prob.p, prob.d);
    if (prob.d != prob.p) {
      throw ConfigError("varimax rotations are square: d must equal p (got d=" +
                        std::to_string(prob.d) + ", p=" + std::to_string(prob.p) + ")");
    }
    Eigen::MatrixXd a;
    if (generated) {
      const int n = static_cast<int>(cfg.get_int("n", 200));
      VarimaxInstance inst = gen_varimax(n, prob.p, rng);
      a = inst.a;
      prob.varimax = std::move(inst);
    } else {
      a = read_matrix_file(cfg.get_string("a_file"));
      if (a.cols() != prob.p) {
        throw InputError("a_file has " + std::to_string(a.cols()) +
                         " columns but the config says p=" + std::to_string(prob.p));
      }
    }
    prob.objective = std::make_unique<VarimaxNeg>(std::move(a));
    return prob;
  }

  if (name == "ojd") {
    prob.d = static_cast<int>(cfg.get_int("d", prob.p));
    check_dims(prob.p, prob.d);
    if (prob.d != prob.p) {
      throw ConfigError("ojd searches a square joint diagonalizer: d must equal p (got d=" +
                        std::to_string(prob.d) + ", p=" + std::to_string(prob.p) + ")");
    }
    std::vector<Eigen::MatrixXd> cs;
    if (generated) {
      const int m = static_cast<int>(cfg.get_int("m", 5));
      const double sigma = cfg.get_double("sigma", 0.0);
      OjdInstance inst = gen_ojd(prob.p, m, sigma, rng);
      cs = inst.cs;
      prob.ojd = std::move(inst);
    } else {
      cs = read_stacked_matrices(cfg.get_string("matrices_file"));
      for (const Eigen::MatrixXd& c : cs) {
        if (c.rows() != prob.p || c.cols() != prob.p) {
          throw InputError("ojd matrices must all be " + std::to_string(prob.p) + "x" +
                           std::to_string(prob.p));
        }
      }
    }
    prob.objective = std::make_unique<OjdOffdiag>(std::move(cs));
    return prob;
  }

  if (name == "sspca") {
    prob.d = static_cast<int>(cfg.get_int("d"));
    check_dims(prob.p, prob.d);
    const double lambda1 = cfg.get_double("lambda1", 0.0);
    const double lambda2 = cfg.get_double("lambda2", 0.0);
    Eigen::MatrixXd x;
    std::vector<int> y;
    if (generated) {
      const int n = static_cast<int>(cfg.get_int("n", 100));
      const int d_signal = static_cast<int>(cfg.get_int("d_signal", prob.d));
      TwoClassInstance inst = gen_two_class(n, prob.p, d_signal, rng);
      x = std::move(inst.x);
      y = std::move(inst.y);
    } else {
      x = read_matrix_file(cfg.get_string("x_file"));
      if (x.cols() != prob.p) {
        throw InputError("x_file has " + std::to_string(x.cols()) +
                         " columns but the config says p=" + std::to_string(prob.p));
      }
      y = read_labels(cfg.get_string("labels_file"), x.rows());
    }
    prob.sspca_x = x;
    prob.sspca_y = y;
    prob.objective = std::make_unique<SupervisedSpca>(std::move(x), std::move(y), lambda1,
                                                      lambda2, prob.d);
    return prob;
  }

  throw ConfigError(
      "unknown objective '" + name +
      "' (use ackley|griewank|rosenbrock|rastrigin|hetquad|lrsparse|ica|varimax|ojd|rritz|"
      "sspca|external)");
}

/* ---------------------------------------------------------------------- */
/* Verification metrics for the summary                                    */
/* ---------------------------------------------------------------------- */

std::vector<MetricReport> solve_metrics(const Problem& prob, const BooomResult& result) {
  std::vector<MetricReport> metrics;
  const Eigen::MatrixXd& q = result.q_best.matrix();
  if (prob.benchmark) {
    // The benchmarks are constructed to vanish at the identity frame.
    metrics.push_back(MetricReport{"objective_gap", result.f_best, 0.0, std::nullopt});
  }
  if (prob.hamiltonian) {
    const EigGroundTruth truth = eig_ground_truth(*prob.hamiltonian, prob.d);
    metrics.push_back(
        MetricReport{"objective_gap", result.f_best - truth.value, truth.value, std::nullopt});
    metrics.push_back(MetricReport{"kkt_residual", kkt_residual(*prob.hamiltonian, result.q_best),
                                   std::nullopt, std::nullopt});
  }
  if (prob.lowrank) {
    const Eigen::MatrixXd projected = prob.lowrank->x * q * q.transpose();
    const Eigen::MatrixXd identity_cols = Eigen::MatrixXd::Identity(prob.p, prob.d);
    const Eigen::MatrixXd baseline_projected =
        prob.lowrank->x * identity_cols * identity_cols.transpose();
    metrics.push_back(MetricReport{"mae_lowrank",
                                   mean_absolute_error(projected, prob.lowrank->l),
                                   mean_absolute_error(baseline_projected, prob.lowrank->l),
                                   std::nullopt});
  }
  if (prob.ica) {
    const Eigen::MatrixXd w_hat = q.transpose() * prob.ica->whitener;
    metrics.push_back(MetricReport{"amari_distance", amari_distance(w_hat, prob.ica->a),
                                   std::nullopt, std::nullopt});
  }
  if (prob.ojd) {
    const double deviation = signed_permutation_deviation(q.transpose() * prob.ojd->w_true);
    metrics.push_back(
        MetricReport{"signed_permutation_deviation", deviation, std::nullopt, std::nullopt});
  }
  if (prob.varimax) {
    const double reference =
        prob.objective->evaluate(StiefelPoint(prob.varimax->r_true));
    metrics.push_back(
        MetricReport{"objective_gap", result.f_best - reference, reference, std::nullopt});
  }
  return metrics;
}

}  // namespace

/* ---------------------------------------------------------------------- */
/* Pareto helpers                                                          */
/* ---------------------------------------------------------------------- */

double active_row_fraction(const Eigen::MatrixXd& q, double threshold) {
  if (q.rows() == 0) throw std::invalid_argument("active_row_fraction: empty matrix");
  int active = 0;
  for (Eigen::Index r = 0; r < q.rows(); ++r) {
    if (q.row(r).norm() > threshold) ++active;
  }
  return static_cast<double>(active) / static_cast<double>(q.rows());
}

double nearest_mean_misclassification(const Eigen::MatrixXd& z, const std::vector<int>& y) {
  if (z.rows() == 0) throw std::invalid_argument("nearest_mean_misclassification: empty data");
  if (static_cast<size_t>(z.rows()) != y.size()) {
    throw std::invalid_argument(
        "nearest_mean_misclassification: one label per projected row required");
  }
  Eigen::RowVectorXd mean0 = Eigen::RowVectorXd::Zero(z.cols());
  Eigen::RowVectorXd mean1 = Eigen::RowVectorXd::Zero(z.cols());
  long count0 = 0;
  long count1 = 0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const int label = y[static_cast<size_t>(r)];
    if (label == 0) {
      mean0 += z.row(r);
      ++count0;
    } else if (label == 1) {
      mean1 += z.row(r);
      ++count1;
    } else {
      throw std::invalid_argument("nearest_mean_misclassification: labels must be 0 or 1");
    }
  }
  if (count0 == 0 || count1 == 0) {
    throw std::invalid_argument("nearest_mean_misclassification: both classes must be nonempty");
  }
  mean0 /= static_cast<double>(count0);
  mean1 /= static_cast<double>(count1);
  long wrong = 0;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double to0 = (z.row(r) - mean0).squaredNorm();
    const double to1 = (z.row(r) - mean1).squaredNorm();
    const int assigned = to1 < to0 ? 1 : 0;  // ties go to class 0
    if (assigned != y[static_cast<size_t>(r)]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(z.rows());
}

/* ---------------------------------------------------------------------- */
/* solve                                                                   */
/* ---------------------------------------------------------------------- */

int cli_solve(const std::string& config_path) {
  return guarded([&] {
    const ConfigMap cfg = ConfigMap::parse_file(config_path);
    const BooomConfig engine = engine_config(cfg);
    const Problem prob = build_problem(cfg, engine);

    std::optional<StiefelPoint> init;
    if (cfg.contains("init_file")) {
      init = StiefelPoint(read_matrix_file(cfg.get_string("init_file")));
    }
    const std::string out_dir = cfg.get_string("out", ".");
    const std::string report_format = cfg.get_string("report_format", "jsonl");
    if (report_format != "jsonl" && report_format != "csv") {
      throw ConfigError("report_format must be 'jsonl' or 'csv', got '" + report_format + "'");
    }
    cfg.reject_unknown();

    fs::create_directories(out_dir);
    const auto started = Clock::now();
    const BooomResult result = optimize(*prob.objective, engine, init);
    const double wall = elapsed_seconds(started);

    write_matrix_file(out_dir + "/q_best.txt", result.q_best.matrix());
    const std::string trace_path =
        out_dir + (report_format == "jsonl" ? "/trace.jsonl" : "/trace.csv");
    if (report_format == "jsonl") {
      write_trace_file(trace_path, result.trace.records);
    } else {
      write_trace_csv_file(trace_path, result.trace.records);
    }

    RunSummary summary;
    summary.objective = prob.objective->name();
    summary.p = prob.p;
    summary.d = prob.d;
    summary.seed = engine.seed;
    summary.f_best = result.f_best;
    summary.runs_completed = result.runs_completed;
    summary.evaluations = result.total_evaluations;
    summary.wall_seconds = wall;
    summary.stop_reason = to_string(result.stop_reason);
    summary.metrics = solve_metrics(prob, result);
    summary.warnings = result.trace.warnings;
    if (prob.external != nullptr) {
      for (const std::string& incident : prob.external->incidents()) {
        summary.warnings.push_back(incident);
      }
    }
    write_summary_file(out_dir + "/summary.json", summary);

    std::cout << "f_best " << format_double(result.f_best) << " after "
              << result.total_evaluations << " evaluations (" << summary.stop_reason << ")\n"
              << "wrote " << out_dir << "/q_best.txt, " << trace_path << ", " << out_dir
              << "/summary.json\n";
    return kExitOk;
  });
}

/* ---------------------------------------------------------------------- */
/* gen                                                                     */
/* ---------------------------------------------------------------------- */

int cli_gen(const GenArgs& args) {
  return guarded([&] {
    if (args.p < 1) {
      throw ConfigError("p must be >= 1 (got p=" + std::to_string(args.p) + ")");
    }
    const bool known_kind =
        args.kind == "psd" || args.kind == "lowrank" || args.kind == "ica" ||
        args.kind == "varimax" || args.kind == "ojd" || args.kind == "rritz" ||
        args.kind == "twoclass" || args.kind == "rotation";
    if (!known_kind) {
      throw ConfigError("unknown kind '" + args.kind +
                        "' (use psd|lowrank|ica|varimax|ojd|rritz|twoclass|rotation)");
    }

    // Which optional flags the requested kind understands; anything else is
    // rejected rather than silently ignored, mirroring the config parser's
    // unknown-key policy.
    const bool has_n = args.n != -1;
    const bool has_d = args.d != -1;
    const bool has_count = args.count != -1;
    const bool has_pattern = !args.pattern.empty();
    const bool has_m = args.m != -1;
    const bool has_sigma = args.sigma != -1.0;
    const bool has_d_signal = args.d_signal != -1;
    const struct {
      const char* flag;
      bool given;
      bool applies;
      int value;  // 0 for non-integer flags (not range checked here)
    } options[] = {
        {"--n", has_n,
         args.kind == "lowrank" || args.kind == "ica" || args.kind == "varimax" ||
             args.kind == "twoclass",
         args.n},
        {"--d", has_d, args.kind == "lowrank", args.d},
        {"--count", has_count, args.kind == "psd", args.count},
        {"--pattern", has_pattern, args.kind == "psd", 1},
        {"--m", has_m, args.kind == "ojd", args.m},
        {"--sigma", has_sigma, args.kind == "ojd", 1},
        {"--d_signal", has_d_signal, args.kind == "twoclass", args.d_signal},
    };
    for (const auto& option : options) {
      if (option.given && !option.applies) {
        throw ConfigError(std::string(option.flag) + " does not apply to kind=" + args.kind);
      }
      if (option.given && option.value < 1) {
        throw ConfigError(std::string(option.flag) + " must be >= 1 (got " +
                          std::to_string(option.value) + ")");
      }
    }
    if (has_sigma && !(args.sigma >= 0.0 && std::isfinite(args.sigma))) {
      throw ConfigError("sigma must be finite and >= 0");
    }
    if (args.kind == "lowrank" && !has_d) {
      throw ConfigError("lowrank requires --d (the planted rank)");
    }
    if (has_d && args.d > args.p) {
      throw ConfigError("d must satisfy 1 <= d <= p (got d=" + std::to_string(args.d) +
                        ", p=" + std::to_string(args.p) + ")");
    }
    if (has_d_signal && args.d_signal > args.p) {
      throw ConfigError("d_signal must satisfy 1 <= d_signal <= p (got d_signal=" +
                        std::to_string(args.d_signal) + ", p=" + std::to_string(args.p) + ")");
    }
    PsdPattern pattern = PsdPattern::random;
    if (has_pattern) {
      try {
        pattern = psd_pattern_from_string(args.pattern);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }

    std::mt19937_64 rng(args.seed);
    nlohmann::json parameters;
    parameters["p"] = args.p;
    // Manifest role -> file name, in the order the files are written.
    std::vector<std::pair<std::string, std::string>> files;
    const auto write = [&](const std::string& role, const std::string& name,
                           const Eigen::MatrixXd& matrix) {
      write_matrix_file(args.out + "/" + name, matrix);
      files.emplace_back(role, name);
    };

    fs::create_directories(args.out);
    if (args.kind == "psd") {
      const int count = has_count ? args.count : 1;
      write_stacked_matrices(args.out + "/matrices.txt", gen_psd_set(pattern, args.p, count, rng));
      files.emplace_back("matrices", "matrices.txt");
      parameters["pattern"] = to_string(pattern);
      parameters["count"] = count;
    } else if (args.kind == "lowrank") {
      const int n = has_n ? args.n : 50;
      const LowRankSparseInstance inst = gen_lowrank_sparse(n, args.p, args.d, rng);
      write("x", "x.txt", inst.x);
      write("l", "l.txt", inst.l);
      write("s", "s.txt", inst.s);
      parameters["n"] = n;
      parameters["d"] = args.d;
    } else if (args.kind == "ica") {
      const int n = has_n ? args.n : 2000;
      const IcaInstance inst = gen_ica(args.p, n, rng);
      write("x", "x.txt", inst.x);
      write("a", "a.txt", inst.a);
      write("sources", "sources.txt", inst.sources);
      write("xw", "xw.txt", inst.xw);
      write("whitener", "whitener.txt", inst.whitener);
      parameters["n"] = n;
    } else if (args.kind == "varimax") {
      const int n = has_n ? args.n : 200;
      const VarimaxInstance inst = gen_varimax(n, args.p, rng);
      write("a", "a.txt", inst.a);
      write("b0", "b0.txt", inst.b0);
      write("r_true", "r_true.txt", inst.r_true);
      parameters["n"] = n;
    } else if (args.kind == "ojd") {
      const int m = has_m ? args.m : 5;
      const double sigma = has_sigma ? args.sigma : 0.0;
      const OjdInstance inst = gen_ojd(args.p, m, sigma, rng);
      write_stacked_matrices(args.out + "/matrices.txt", inst.cs);
      files.emplace_back("matrices", "matrices.txt");
      write("w_true", "w_true.txt", inst.w_true);
      Eigen::MatrixXd eigenvalues(m, args.p);
      for (int k = 0; k < m; ++k) {
        eigenvalues.row(k) = inst.ds[static_cast<size_t>(k)].transpose();
      }
      write("eigenvalues", "eigenvalues.txt", eigenvalues);
      parameters["m"] = m;
      parameters["sigma"] = sigma;
    } else if (args.kind == "rritz") {
      write("h", "h.txt", gen_reduced_hamiltonian(args.p, rng));
    } else if (args.kind == "twoclass") {
      const int n = has_n ? args.n : 100;
      const int d_signal = has_d_signal ? args.d_signal : args.p;
      const TwoClassInstance inst = gen_two_class(n, args.p, d_signal, rng);
      write("x", "x.txt", inst.x);
      Eigen::MatrixXd labels(n, 1);
      for (int i = 0; i < n; ++i) labels(i, 0) = inst.y[static_cast<size_t>(i)];
      write("labels", "labels.txt", labels);
      parameters["n"] = n;
      parameters["d_signal"] = d_signal;
    } else {  // rotation
      write("rotation", "rotation.txt", random_rotation(args.p, rng).matrix());
    }

    nlohmann::json manifest;
    manifest["kind"] = args.kind;
    manifest["parameters"] = parameters;
    manifest["seed"] = args.seed;
    nlohmann::json listing = nlohmann::json::object();
    for (const auto& [role, name] : files) listing[role] = name;
    manifest["files"] = listing;
    const std::string manifest_path = args.out + "/manifest.json";
    std::ofstream manifest_out(manifest_path);
    if (!manifest_out) throw InputError("cannot write " + manifest_path);
    manifest_out << manifest.dump(2) << "\n";

    std::cout << "wrote ";
    for (const auto& [role, name] : files) std::cout << args.out << "/" << name << ", ";
    std::cout << manifest_path << "\n";
    return kExitOk;
  });
}

/* ---------------------------------------------------------------------- */
/* bench                                                                   */
/* ---------------------------------------------------------------------- */

int cli_bench(const BenchArgs& args) {
  return guarded([&] {
    const auto kind = benchmark_kind(args.suite);
    if (!kind) {
      throw ConfigError("unknown suite '" + args.suite +
                        "' (use ackley|griewank|rosenbrock|rastrigin)");
    }
    if (args.p < 1) throw ConfigError("p must be >= 1");
    if (args.replicates < 1) throw ConfigError("replicates must be >= 1");
    if (args.budget_seconds < 0.0) throw ConfigError("budget must be >= 0");
    if (args.jobs < 1) throw ConfigError("jobs must be >= 1");

    const ModifiedBenchmark objective(*kind, args.p);
    std::vector<BenchRow> rows(static_cast<size_t>(args.replicates));

    const auto run_replicate = [&](int replicate) {
      BooomConfig engine;
      engine.seed = derive_seed(args.seed, static_cast<std::uint64_t>(replicate));
      engine.budget_seconds = args.budget_seconds;
      apply_env_workers(engine);
      const auto started = Clock::now();
      const BooomResult result = optimize(objective, engine);
      rows[static_cast<size_t>(replicate)] =
          BenchRow{replicate, result.f_best, result.total_evaluations, elapsed_seconds(started)};
    };

    if (args.jobs == 1) {
      for (int replicate = 0; replicate < args.replicates; ++replicate) run_replicate(replicate);
    } else {
      const int jobs = std::min(args.jobs, args.replicates);
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> failures(static_cast<size_t>(jobs));
      for (int worker = 0; worker < jobs; ++worker) {
        pool.emplace_back([&, worker] {
          try {
            for (int replicate = worker; replicate < args.replicates; replicate += jobs) {
              run_replicate(replicate);
            }
          } catch (...) {
            failures[static_cast<size_t>(worker)] = std::current_exception();
          }
        });
      }
      for (std::thread& thread : pool) thread.join();
      for (const std::exception_ptr& failure : failures) {
        if (failure) std::rethrow_exception(failure);
      }
    }

    write_bench_file(args.out, rows);
    const BenchAggregate aggregate = aggregate_bench(rows);
    std::cout << args.suite << " p=" << args.p << ": min " << format_double(aggregate.min)
              << ", mean " << format_double(aggregate.mean) << " over " << args.replicates
              << " replicates\n"
              << "wrote " << args.out << "\n";
    return kExitOk;
  });
}

/* ---------------------------------------------------------------------- */
/* decompose                                                               */
/* ---------------------------------------------------------------------- */

int cli_decompose(const std::string& matrix_path) {
  return guarded([&] {
    const Eigen::MatrixXd u = read_matrix_file(matrix_path);
    AngleVector angles;
    try {
      angles = givens_decompose(u);
    } catch (const ReflectionError& e) {
      std::cerr << "reflection: " << e.what() << "\n";
      return kExitInput;
    } catch (const FeasibilityError& e) {
      std::cerr << "not orthogonal: " << e.what() << "\n";
      return kExitInput;
    }
    const StiefelPoint identity(Eigen::MatrixXd::Identity(u.rows(), u.cols()));
    const StiefelPoint rebuilt = givens_compose(angles, identity);
    const double error = (u - rebuilt.matrix()).norm();
    for (const double angle : angles) std::cout << format_double(angle) << "\n";
    std::cout << "reconstruction_error " << format_double(error) << "\n";
    return error <= 1e-8 ? kExitOk : kExitRuntime;
  });
}

/* ---------------------------------------------------------------------- */
/* pareto                                                                  */
/* ---------------------------------------------------------------------- */

int cli_pareto(const std::string& config_path) {
  return guarded([&] {
    const ConfigMap cfg = ConfigMap::parse_file(config_path);
    if (cfg.contains("lambda1") || cfg.contains("lambda2")) {
      throw ConfigError("pareto sweeps use lambda1_grid/lambda2_grid, not lambda1/lambda2");
    }
    const BooomConfig engine = engine_config(cfg);
    const Problem prob = build_problem(cfg, engine);
    if (!prob.sspca_x || !prob.sspca_y) {
      throw ConfigError("pareto requires objective = sspca");
    }
    const std::vector<double> grid1 = cfg.get_double_list("lambda1_grid");
    const std::vector<double> grid2 = cfg.get_double_list("lambda2_grid");
    const std::string out_dir = cfg.get_string("out", ".");
    cfg.reject_unknown();
    fs::create_directories(out_dir);

    std::vector<ParetoRow> rows;
    Eigen::MatrixXd chosen_q;
    double chosen_mis = std::numeric_limits<double>::infinity();
    double chosen_sparsity = std::numeric_limits<double>::infinity();
    for (const double lambda1 : grid1) {
      for (const double lambda2 : grid2) {
        const SupervisedSpca objective(*prob.sspca_x, *prob.sspca_y, lambda1, lambda2, prob.d);
        const BooomResult result = optimize(objective, engine);
        const Eigen::MatrixXd& q = result.q_best.matrix();
        ParetoRow row;
        row.lambda1 = lambda1;
        row.lambda2 = lambda2;
        row.sparsity = active_row_fraction(q);
        row.misclassification = nearest_mean_misclassification(*prob.sspca_x * q, *prob.sspca_y);
        row.objective = result.f_best;
        rows.push_back(row);
        // The importance ranking is reported for the most accurate grid
        // point, breaking accuracy ties toward the sparser frame.
        if (row.misclassification < chosen_mis ||
            (row.misclassification == chosen_mis && row.sparsity < chosen_sparsity)) {
          chosen_mis = row.misclassification;
          chosen_sparsity = row.sparsity;
          chosen_q = q;
        }
      }
    }
    mark_pareto(rows);
    write_pareto_file(out_dir + "/pareto.csv", rows);
    write_importance_file(out_dir + "/importance.csv", importance_ranking(chosen_q));
    std::cout << rows.size() << " grid points\n"
              << "wrote " << out_dir << "/pareto.csv, " << out_dir << "/importance.csv\n";
    return kExitOk;
  });
}

}  // namespace booom
