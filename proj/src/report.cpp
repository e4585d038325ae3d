#include "booom/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "booom/errors.hpp"
#include "booom/matrix_io.hpp"

namespace booom {

namespace {

using nlohmann::json;

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "' for reading");
  return in;
}

double parse_cell(const std::string& cell, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end == cell.c_str() || *end != '\0') {
    throw InputError(where + ": cannot parse '" + cell + "' as a number");
  }
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Standard error of the mean with the n-1 denominator; zero for n = 1.
double stderr_of(const std::vector<double>& v) {
  const size_t n = v.size();
  if (n < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

}  // namespace

/* ---------------------------------------------------------------------- */
/* Iteration trace (JSONL)                                                 */
/* ---------------------------------------------------------------------- */

void write_trace_jsonl(std::ostream& out, const std::vector<TraceRecord>& records) {
  for (const TraceRecord& rec : records) {
    out << "{\"run\":" << rec.run << ",\"iter\":" << rec.iter
        << ",\"step\":" << format_double(rec.step) << ",\"f\":" << format_double(rec.f)
        << ",\"accepted\":" << (rec.accepted ? "true" : "false");
    if (rec.accepted) {
      out << ",\"i\":" << rec.move.i << ",\"j\":" << rec.move.j
          << ",\"theta\":" << format_double(rec.move.theta);
    } else {
      out << ",\"i\":null,\"j\":null,\"theta\":null";
    }
    out << ",\"reortho\":" << (rec.reorthonormalized ? "true" : "false") << "}\n";
  }
}

void write_trace_file(const std::string& path, const std::vector<TraceRecord>& records) {
  std::ofstream out = open_for_write(path);
  write_trace_jsonl(out, records);
  if (!out) throw InputError("failed writing trace to '" + path + "'");
}

std::vector<TraceRecord> read_trace_file(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::vector<TraceRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json parsed;
    try {
      parsed = json::parse(line);
    } catch (const json::exception& e) {
      throw InputError(path + " line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      TraceRecord rec;
      rec.run = parsed.at("run").get<int>();
      rec.iter = parsed.at("iter").get<int>();
      rec.step = parsed.at("step").get<double>();
      rec.f = parsed.at("f").get<double>();
      rec.accepted = parsed.at("accepted").get<bool>();
      if (rec.accepted) {
        rec.move.i = parsed.at("i").get<int>();
        rec.move.j = parsed.at("j").get<int>();
        rec.move.theta = parsed.at("theta").get<double>();
      } else if (!parsed.at("i").is_null() || !parsed.at("j").is_null() ||
                 !parsed.at("theta").is_null()) {
        throw InputError("unaccepted record carries a move");
      }
      rec.reorthonormalized = parsed.at("reortho").get<bool>();
      records.push_back(rec);
    } catch (const json::exception& e) {
      throw InputError(path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& records) {
  out << "run,iter,step,f,accepted,i,j,theta,reortho\n";
  for (const TraceRecord& rec : records) {
    out << rec.run << ',' << rec.iter << ',' << format_double(rec.step) << ','
        << format_double(rec.f) << ',' << (rec.accepted ? "true" : "false") << ',';
    if (rec.accepted) {
      out << rec.move.i << ',' << rec.move.j << ',' << format_double(rec.move.theta);
    } else {
      out << ",,";
    }
    out << ',' << (rec.reorthonormalized ? "true" : "false") << "\n";
  }
}

void write_trace_csv_file(const std::string& path, const std::vector<TraceRecord>& records) {
  std::ofstream out = open_for_write(path);
  write_trace_csv(out, records);
  if (!out) throw InputError("failed writing trace to '" + path + "'");
}

std::vector<TraceRecord> read_trace_csv_file(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file");
  if (line != "run,iter,step,f,accepted,i,j,theta,reortho") {
    throw InputError(path + ": unexpected header '" + line + "'");
  }
  std::vector<TraceRecord> records;
  int line_no = 1;
  const auto parse_flag = [](const std::string& cell, const std::string& where) {
    if (cell == "true") return true;
    if (cell == "false") return false;
    throw InputError(where + ": flag must be true or false, got '" + cell + "'");
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    const std::string where = path + " line " + std::to_string(line_no);
    if (cells.size() != 9) throw InputError(where + ": expected 9 cells");
    TraceRecord rec;
    rec.run = static_cast<int>(parse_cell(cells[0], where));
    rec.iter = static_cast<int>(parse_cell(cells[1], where));
    rec.step = parse_cell(cells[2], where);
    rec.f = parse_cell(cells[3], where);
    rec.accepted = parse_flag(cells[4], where);
    if (rec.accepted) {
      rec.move.i = static_cast<int>(parse_cell(cells[5], where));
      rec.move.j = static_cast<int>(parse_cell(cells[6], where));
      rec.move.theta = parse_cell(cells[7], where);
    } else if (!cells[5].empty() || !cells[6].empty() || !cells[7].empty()) {
      throw InputError(where + ": unaccepted record carries a move");
    }
    rec.reorthonormalized = parse_flag(cells[8], where);
    records.push_back(rec);
  }
  return records;
}

/* ---------------------------------------------------------------------- */
/* Run summary (JSON)                                                      */
/* ---------------------------------------------------------------------- */

void write_summary_file(const std::string& path, const RunSummary& summary) {
  json doc;
  doc["objective"] = summary.objective;
  doc["p"] = summary.p;
  doc["d"] = summary.d;
  doc["seed"] = summary.seed;
  doc["f_best"] = summary.f_best;
  doc["runs_completed"] = summary.runs_completed;
  doc["evaluations"] = summary.evaluations;
  doc["wall_seconds"] = summary.wall_seconds;
  doc["stop_reason"] = summary.stop_reason;
  json metrics = json::array();
  for (const MetricReport& metric : summary.metrics) {
    json entry;
    entry["name"] = metric.name;
    entry["value"] = metric.value;
    if (metric.baseline.has_value()) entry["baseline"] = *metric.baseline;
    if (metric.tolerance.has_value()) entry["tolerance"] = *metric.tolerance;
    metrics.push_back(entry);
  }
  doc["metrics"] = metrics;
  doc["warnings"] = summary.warnings;

  std::ofstream out = open_for_write(path);
  out << doc.dump(2) << "\n";
  if (!out) throw InputError("failed writing summary to '" + path + "'");
}

RunSummary read_summary_file(const std::string& path) {
  std::ifstream in = open_for_read(path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  try {
    RunSummary summary;
    summary.objective = doc.at("objective").get<std::string>();
    summary.p = doc.at("p").get<int>();
    summary.d = doc.at("d").get<int>();
    summary.seed = doc.at("seed").get<std::uint64_t>();
    summary.f_best = doc.at("f_best").get<double>();
    summary.runs_completed = doc.at("runs_completed").get<int>();
    summary.evaluations = doc.at("evaluations").get<long>();
    summary.wall_seconds = doc.at("wall_seconds").get<double>();
    summary.stop_reason = doc.at("stop_reason").get<std::string>();
    for (const json& entry : doc.at("metrics")) {
      MetricReport metric;
      metric.name = entry.at("name").get<std::string>();
      metric.value = entry.at("value").get<double>();
      if (entry.contains("baseline")) metric.baseline = entry.at("baseline").get<double>();
      if (entry.contains("tolerance")) metric.tolerance = entry.at("tolerance").get<double>();
      summary.metrics.push_back(metric);
    }
    for (const json& warning : doc.at("warnings")) {
      summary.warnings.push_back(warning.get<std::string>());
    }
    return summary;
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

/* ---------------------------------------------------------------------- */
/* Benchmark table (CSV)                                                   */
/* ---------------------------------------------------------------------- */

double quantile_type7(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile_type7: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile_type7: q must be in [0,1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - std::floor(h)) * (values[hi] - values[lo]);
}

BenchAggregate aggregate_bench(const std::vector<BenchRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("aggregate_bench: no rows");
  std::vector<double> bests, times;
  bests.reserve(rows.size());
  times.reserve(rows.size());
  for (const BenchRow& row : rows) {
    bests.push_back(row.f_best);
    times.push_back(row.seconds);
  }
  BenchAggregate agg;
  agg.min = *std::min_element(bests.begin(), bests.end());
  agg.mean = mean_of(bests);
  agg.stderr_of_best = stderr_of(bests);
  agg.median = quantile_type7(bests, 0.5);
  agg.iqr = quantile_type7(bests, 0.75) - quantile_type7(bests, 0.25);
  agg.mean_time = mean_of(times);
  agg.time_stderr = stderr_of(times);
  return agg;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "replicate,f_best,evaluations,seconds,min,mean,stderr,median,iqr,mean_time,time_stderr\n";
  for (const BenchRow& row : rows) {
    out << row.replicate << ',' << format_double(row.f_best) << ',' << row.evaluations << ','
        << format_double(row.seconds) << ",,,,,,,\n";
  }
  const BenchAggregate agg = aggregate_bench(rows);
  out << "aggregate,,,," << format_double(agg.min) << ',' << format_double(agg.mean) << ','
      << format_double(agg.stderr_of_best) << ',' << format_double(agg.median) << ','
      << format_double(agg.iqr) << ',' << format_double(agg.mean_time) << ','
      << format_double(agg.time_stderr) << "\n";
}

void write_bench_file(const std::string& path, const std::vector<BenchRow>& rows) {
  std::ofstream out = open_for_write(path);
  write_bench_csv(out, rows);
  if (!out) throw InputError("failed writing benchmark table to '" + path + "'");
}

BenchTable read_bench_file(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file");
  if (line != "replicate,f_best,evaluations,seconds,min,mean,stderr,median,iqr,mean_time,time_stderr") {
    throw InputError(path + ": unexpected header '" + line + "'");
  }
  BenchTable table;
  bool saw_aggregate = false;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    const std::string where = path + " line " + std::to_string(line_no);
    if (cells.size() != 11) throw InputError(where + ": expected 11 cells");
    if (cells[0] == "aggregate") {
      if (saw_aggregate) throw InputError(where + ": repeated aggregate row");
      saw_aggregate = true;
      table.aggregate.min = parse_cell(cells[4], where);
      table.aggregate.mean = parse_cell(cells[5], where);
      table.aggregate.stderr_of_best = parse_cell(cells[6], where);
      table.aggregate.median = parse_cell(cells[7], where);
      table.aggregate.iqr = parse_cell(cells[8], where);
      table.aggregate.mean_time = parse_cell(cells[9], where);
      table.aggregate.time_stderr = parse_cell(cells[10], where);
    } else {
      if (saw_aggregate) throw InputError(where + ": data row after the aggregate row");
      BenchRow row;
      row.replicate = static_cast<int>(parse_cell(cells[0], where));
      row.f_best = parse_cell(cells[1], where);
      row.evaluations = static_cast<long>(parse_cell(cells[2], where));
      row.seconds = parse_cell(cells[3], where);
      table.rows.push_back(row);
    }
  }
  if (!saw_aggregate) throw InputError(path + ": missing aggregate row");
  return table;
}

/* ---------------------------------------------------------------------- */
/* Pareto sweep (CSV)                                                      */
/* ---------------------------------------------------------------------- */

void mark_pareto(std::vector<ParetoRow>& rows) {
  for (ParetoRow& candidate : rows) {
    bool dominated = false;
    for (const ParetoRow& other : rows) {
      const bool no_worse = other.sparsity <= candidate.sparsity &&
                            other.misclassification <= candidate.misclassification;
      const bool better = other.sparsity < candidate.sparsity ||
                          other.misclassification < candidate.misclassification;
      if (no_worse && better) {
        dominated = true;
        break;
      }
    }
    candidate.pareto = !dominated;
  }
}

void write_pareto_csv(std::ostream& out, const std::vector<ParetoRow>& rows) {
  out << "lambda1,lambda2,sparsity,misclassification,objective,pareto\n";
  for (const ParetoRow& row : rows) {
    out << format_double(row.lambda1) << ',' << format_double(row.lambda2) << ','
        << format_double(row.sparsity) << ',' << format_double(row.misclassification) << ','
        << format_double(row.objective) << ',' << (row.pareto ? "true" : "false") << "\n";
  }
}

void write_pareto_file(const std::string& path, const std::vector<ParetoRow>& rows) {
  std::ofstream out = open_for_write(path);
  write_pareto_csv(out, rows);
  if (!out) throw InputError("failed writing pareto table to '" + path + "'");
}

std::vector<ParetoRow> read_pareto_file(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file");
  if (line != "lambda1,lambda2,sparsity,misclassification,objective,pareto") {
    throw InputError(path + ": unexpected header '" + line + "'");
  }
  std::vector<ParetoRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    const std::string where = path + " line " + std::to_string(line_no);
    if (cells.size() != 6) throw InputError(where + ": expected 6 cells");
    ParetoRow row;
    row.lambda1 = parse_cell(cells[0], where);
    row.lambda2 = parse_cell(cells[1], where);
    row.sparsity = parse_cell(cells[2], where);
    row.misclassification = parse_cell(cells[3], where);
    row.objective = parse_cell(cells[4], where);
    if (cells[5] == "true") {
      row.pareto = true;
    } else if (cells[5] == "false") {
      row.pareto = false;
    } else {
      throw InputError(where + ": pareto flag must be true or false");
    }
    rows.push_back(row);
  }
  return rows;
}

/* ---------------------------------------------------------------------- */
/* Variable importance (CSV)                                               */
/* ---------------------------------------------------------------------- */

std::vector<ImportanceRow> importance_ranking(const Eigen::MatrixXd& q) {
  if (q.size() == 0) throw std::invalid_argument("importance_ranking: empty matrix");
  std::vector<ImportanceRow> rows;
  rows.reserve(static_cast<size_t>(q.rows()));
  for (int i = 0; i < q.rows(); ++i) {
    rows.push_back(ImportanceRow{i + 1, q.row(i).norm()});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ImportanceRow& a, const ImportanceRow& b) {
    return a.score > b.score;
  });
  return rows;
}

void write_importance_csv(std::ostream& out, const std::vector<ImportanceRow>& rows) {
  out << "variable,score\n";
  for (const ImportanceRow& row : rows) {
    out << row.variable << ',' << format_double(row.score) << "\n";
  }
}

void write_importance_file(const std::string& path, const std::vector<ImportanceRow>& rows) {
  std::ofstream out = open_for_write(path);
  write_importance_csv(out, rows);
  if (!out) throw InputError("failed writing importance table to '" + path + "'");
}

}  // namespace booom
