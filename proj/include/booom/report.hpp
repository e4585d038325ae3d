#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "booom/engine.hpp"
#include "booom/metrics.hpp"

namespace booom {

/* ---------------------------------------------------------------------- */
/* Iteration trace (JSONL)                                                 */
/* ---------------------------------------------------------------------- */

// One line per iteration with exactly the keys
//   {run, iter, step, f, accepted, i, j, theta, reortho}
// in that order; i, j, and theta are null unless the iteration accepted a
// move. Decimals carry 17 significant digits, so a parsed file reproduces
// the written doubles bit for bit.
void write_trace_jsonl(std::ostream& out, const std::vector<TraceRecord>& records);
void write_trace_file(const std::string& path, const std::vector<TraceRecord>& records);

// Parse a trace back. Unaccepted records come back with a zero move; the
// in-memory drift diagnostics (ortho_error) are not part of the file schema
// and read back as zero. Throws InputError on malformed lines.
std::vector<TraceRecord> read_trace_file(const std::string& path);

// The same records as CSV (header run,iter,step,f,accepted,i,j,theta,reortho;
// move cells empty on unaccepted records) — the alternative report format
// for consumers that want columns instead of JSON lines.
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& records);
void write_trace_csv_file(const std::string& path, const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_trace_csv_file(const std::string& path);

/* ---------------------------------------------------------------------- */
/* Run summary (JSON)                                                      */
/* ---------------------------------------------------------------------- */

struct RunSummary {
  std::string objective;
  int p = 0;
  int d = 0;
  std::uint64_t seed = 0;
  double f_best = 0.0;
  int runs_completed = 0;
  long evaluations = 0;
  double wall_seconds = 0.0;
  std::string stop_reason;
  std::vector<MetricReport> metrics;
  std::vector<std::string> warnings;
};

void write_summary_file(const std::string& path, const RunSummary& summary);
RunSummary read_summary_file(const std::string& path);

/* ---------------------------------------------------------------------- */
/* Benchmark table (CSV)                                                   */
/* ---------------------------------------------------------------------- */

struct BenchRow {
  int replicate = 0;
  double f_best = 0.0;
  long evaluations = 0;
  double seconds = 0.0;
};

struct BenchAggregate {
  double min = 0.0;
  double mean = 0.0;
  double stderr_of_best = 0.0;
  double median = 0.0;
  double iqr = 0.0;
  double mean_time = 0.0;
  double time_stderr = 0.0;
};

// Linear-interpolation quantile of the sorted values ("type 7"): the rule
// used for the median and IQR columns. q in [0, 1]; values must be nonempty.
double quantile_type7(std::vector<double> values, double q);

// Aggregate statistics over the replicate rows (standard errors use the n-1
// denominator and are zero for a single replicate).
BenchAggregate aggregate_bench(const std::vector<BenchRow>& rows);

// One CSV with the fixed header
//   replicate,f_best,evaluations,seconds,min,mean,stderr,median,iqr,mean_time,time_stderr
// one row per replicate (aggregate cells empty), and a final row with
// replicate=aggregate carrying only the aggregate columns.
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);
void write_bench_file(const std::string& path, const std::vector<BenchRow>& rows);

struct BenchTable {
  std::vector<BenchRow> rows;
  BenchAggregate aggregate;
};

BenchTable read_bench_file(const std::string& path);

/* ---------------------------------------------------------------------- */
/* Pareto sweep (CSV)                                                      */
/* ---------------------------------------------------------------------- */

struct ParetoRow {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double sparsity = 0.0;          // fraction of rows of Q with norm > 1e-6
  double misclassification = 0.0; // nearest-class-mean error rate in X*Q space
  double objective = 0.0;
  bool pareto = false;
};

// Flag the rows not dominated on the (sparsity, misclassification) plane:
// a row is dominated when another row is <= on both axes and < on one.
void mark_pareto(std::vector<ParetoRow>& rows);

void write_pareto_csv(std::ostream& out, const std::vector<ParetoRow>& rows);
void write_pareto_file(const std::string& path, const std::vector<ParetoRow>& rows);
std::vector<ParetoRow> read_pareto_file(const std::string& path);

/* ---------------------------------------------------------------------- */
/* Variable importance (CSV)                                               */
/* ---------------------------------------------------------------------- */

struct ImportanceRow {
  int variable = 0;  // 1-based row index into Q
  double score = 0.0;  // row norm of Q
};

// Rows of Q ranked by Euclidean row norm, descending; ties keep the smaller
// variable index first.
std::vector<ImportanceRow> importance_ranking(const Eigen::MatrixXd& q);

void write_importance_csv(std::ostream& out, const std::vector<ImportanceRow>& rows);
void write_importance_file(const std::string& path, const std::vector<ImportanceRow>& rows);

}  // namespace booom
