#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace booom {

// Arguments of the gen subcommand: draw one synthetic problem instance,
// write every matrix of the instance in matrix text format, and record kind,
// parameters, and seed in a JSON manifest next to them. Sentinel values
// (-1, empty string) mean "not given"; kind-dependent defaults apply.
struct GenArgs {
  std::string kind;          // psd | lowrank | ica | varimax | ojd | rritz | twoclass | rotation
  int p = 0;                 // ambient dimension (every kind)
  int n = -1;                // samples: lowrank 50, ica 2000, varimax 200, twoclass 100
  int d = -1;                // planted rank (lowrank only, required there)
  int count = -1;            // matrices to draw (psd only, default 1)
  std::string pattern;       // psd family (psd only, default random)
  int m = -1;                // matrix count (ojd only, default 5)
  double sigma = -1.0;       // symmetric noise level (ojd only, default 0)
  int d_signal = -1;         // separated coordinates (twoclass only, default p)
  std::uint64_t seed = 0;    // generator seed
  std::string out = ".";     // output directory
};

// Arguments of the bench subcommand: replicated benchmark optimizations from
// seeded random starts, summarized into one CSV table.
struct BenchArgs {
  std::string suite;            // ackley | griewank | rosenbrock | rastrigin
  int p = 2;
  int replicates = 1;
  double budget_seconds = 0.0;  // per replicate; 0 disables the budget
  std::uint64_t seed = 0;       // replicate r starts from derive_seed(seed, r)
  std::string out = "bench.csv";
  int jobs = 1;                 // replicate-level parallelism
};

// Fraction of rows of q whose euclidean norm exceeds the threshold — the
// row-support measure reported as "sparsity" in the pareto table.
double active_row_fraction(const Eigen::MatrixXd& q, double threshold = 1e-6);

// Error rate of the nearest-class-mean rule: class means are computed from
// the projected rows z (one sample per row) under the binary labels y, then
// each sample is assigned to the closer mean (ties go to class 0). Throws
// std::invalid_argument on shape mismatch, empty input, or labels outside
// {0, 1}; returns 1.0-worst-case style fractions in [0, 1] otherwise.
double nearest_mean_misclassification(const Eigen::MatrixXd& z, const std::vector<int>& y);

// Subcommand drivers. Each catches its own failures and returns the process
// exit code: 0 success, 1 runtime failure, 2 configuration error, 3
// input-validation error (bad matrices, reflections, malformed data files).
int cli_solve(const std::string& config_path);
int cli_gen(const GenArgs& args);
int cli_bench(const BenchArgs& args);
int cli_decompose(const std::string& matrix_path);
int cli_pareto(const std::string& config_path);

}  // namespace booom
