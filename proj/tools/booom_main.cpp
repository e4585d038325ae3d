// Batch front end: solve one configured problem, generate synthetic problem
// instances, benchmark the modified test functions, decompose a rotation into
// plane angles, or sweep a sparse-PCA regularization grid. Exit codes: 0
// success, 1 runtime failure, 2 configuration error, 3 input-validation
// error.
#include <CLI11.hpp>

#include <string>

#include "booom/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Derivative-free optimization over orthonormal frames"};
  app.require_subcommand(1);

  std::string solve_config;
  CLI::App* solve = app.add_subcommand(
      "solve", "Run one optimization described by a key=value config file");
  solve->add_option("config", solve_config, "config file path")->required();

  booom::GenArgs gen_args;
  CLI::App* gen = app.add_subcommand(
      "gen", "Write a synthetic problem instance plus a JSON manifest");
  gen->add_option("--kind", gen_args.kind,
                  "psd | lowrank | ica | varimax | ojd | rritz | twoclass | rotation")
      ->required();
  gen->add_option("--p", gen_args.p, "ambient dimension")->required();
  gen->add_option("--n", gen_args.n,
                  "samples (lowrank 50, ica 2000, varimax 200, twoclass 100)");
  gen->add_option("--d", gen_args.d, "planted rank (lowrank, required)");
  gen->add_option("--count", gen_args.count, "matrices to draw (psd, default 1)");
  gen->add_option("--pattern", gen_args.pattern,
                  "random | toeplitz | block_diag (psd, default random)");
  gen->add_option("--m", gen_args.m, "matrix count (ojd, default 5)");
  gen->add_option("--sigma", gen_args.sigma, "symmetric noise level (ojd, default 0)")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--d_signal", gen_args.d_signal,
                  "separated coordinates (twoclass, default p)");
  gen->add_option("--seed", gen_args.seed, "generator seed (default 0)");
  gen->add_option("--out", gen_args.out, "output directory (default .)");

  booom::BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand(
      "bench", "Replicated benchmark optimizations, summarized as CSV");
  bench->add_option("--suite", bench_args.suite,
                    "ackley | griewank | rosenbrock | rastrigin")
      ->required();
  bench->add_option("--p", bench_args.p, "frame size (St(p, p))")->required();
  bench->add_option("--replicates", bench_args.replicates, "independent runs (default 1)");
  bench->add_option("--budget", bench_args.budget_seconds,
                    "wall-clock seconds per replicate, 0 = unlimited (default 0)");
  bench->add_option("--seed", bench_args.seed,
                    "master seed; replicate r derives its own stream (default 0)");
  bench->add_option("--out", bench_args.out, "output CSV path (default bench.csv)");
  bench->add_option("--jobs", bench_args.jobs, "replicates run concurrently (default 1)");

  std::string decompose_path;
  CLI::App* decompose = app.add_subcommand(
      "decompose", "Print the plane-rotation angles of a rotation matrix");
  decompose->add_option("matrix", decompose_path, "matrix text file")->required();

  std::string pareto_config;
  CLI::App* pareto = app.add_subcommand(
      "pareto", "Sweep an sspca regularization grid and mark the Pareto front");
  pareto->add_option("config", pareto_config, "config file path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // CLI11 reports --help as a zero-code "error"; real parse problems are
    // malformed invocations, i.e. configuration errors.
    return code == 0 ? 0 : 2;
  }

  if (solve->parsed()) return booom::cli_solve(solve_config);
  if (gen->parsed()) return booom::cli_gen(gen_args);
  if (bench->parsed()) return booom::cli_bench(bench_args);
  if (decompose->parsed()) return booom::cli_decompose(decompose_path);
  return booom::cli_pareto(pareto_config);
}
