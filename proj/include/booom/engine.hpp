#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "booom/objective.hpp"
#include "booom/stiefel.hpp"

namespace booom {

/* ---------------------------------------------------------------------- */
/* Configuration and result records                                        */
/* ---------------------------------------------------------------------- */

// Why a single run stopped iterating.
enum class TerminalReason { step_floor, iter_cap, budget };

// Why the multi-run search stopped.
enum class StopReason { tau2_converged, max_runs, budget };

const char* to_string(TerminalReason r);
const char* to_string(StopReason r);

struct BooomConfig {
  double s_initial = std::numbers::pi;  // starting step size (radians)
  double rho = 2.0;                     // step divisor, > 1
  double phi = 1e-6;                    // step floor; a run stops at s <= phi
  double tau1 = 1e-8;                   // flat-sweep threshold driving reduction
  double tau2 = 1e-8;                   // between-run convergence threshold
  int max_iter = 10000;                 // iteration cap per run
  int max_runs = 10;                    // run cap
  std::uint64_t seed = 0;               // drives the initial point (and cold restarts)
  int workers = 1;                      // candidate-evaluation threads, >= 1
  double budget_seconds = 0.0;          // wall-clock budget; 0 = unlimited
  bool cold_restarts = false;           // restart runs 2.. from fresh random points
                                        // instead of warm-starting at the previous
                                        // incumbent

  void validate() const;  // throws std::invalid_argument
};

// Result of polling all 2 * C(p,2) signed plane rotations at one step size.
struct SweepOutcome {
  GivensMove best_move;
  double best_value = 0.0;
  int best_k = 0;  // 1-based candidate index; ties resolve to the smallest
  long evaluations = 0;
};

// One iteration of one run. `move` is meaningful only when accepted is true.
// `ortho_error` is the feasibility drift measured before any repair that the
// iteration performed; `reorthonormalized` marks a repair.
struct TraceRecord {
  int run = 0;
  int iter = 0;
  double step = 0.0;  // step size after this iteration's update
  double f = 0.0;     // incumbent value at the end of the iteration
  bool accepted = false;
  GivensMove move;
  bool reorthonormalized = false;
  double ortho_error = 0.0;
};

struct RunTrace {
  std::vector<TraceRecord> records;
  std::vector<TerminalReason> terminal_reasons;  // one per completed run
  std::vector<std::string> warnings;             // failed candidates, repairs
};

struct BooomResult {
  StiefelPoint q_best;
  double f_best = 0.0;
  int runs_completed = 0;
  long total_evaluations = 0;
  RunTrace trace;
  StopReason stop_reason = StopReason::max_runs;
};

// Outcome of a single run (one descent from one starting point).
struct RunOutcome {
  StiefelPoint q;
  double f = 0.0;
  TerminalReason reason = TerminalReason::step_floor;
  long evaluations = 0;
};

/* ---------------------------------------------------------------------- */
/* Search                                                                  */
/* ---------------------------------------------------------------------- */

// Poll the 2 * C(p,2) candidates R_{i,j}(+-s) * q: candidate k (1-based)
// rotates plane pair_index(ceil(k/2)) by -s when k is odd and +s when k is
// even. Non-finite objective values become +inf (and a warning when a trace
// is supplied); if every candidate fails, NumericalError. Evaluation fans
// out over `workers` threads; the reduction is a serial smallest-k argmin,
// so the outcome is identical for any worker count.
SweepOutcome sweep(const Objective& f, const StiefelPoint& q, double s,
                   int workers = 1, RunTrace* trace = nullptr);

// One run: repeat sweeps from q0, accepting strict improvements, dividing
// the step by rho whenever an iteration after the first moves the incumbent
// value by less than tau1 (an unsuccessful sweep moves it by zero, so it
// always reduces), until the step reaches phi, the iteration cap, or the
// deadline. Feasibility is measured every iteration and repaired (with a
// logged event) past 1e-9 drift. run_index labels trace records; f0 is the
// objective value at q0 (pass NaN to have it evaluated here).
RunOutcome run(const Objective& f, const StiefelPoint& q0, const BooomConfig& cfg,
               RunTrace& trace, int run_index = 1,
               double f0 = std::numeric_limits<double>::quiet_NaN(),
               std::optional<std::chrono::steady_clock::time_point> deadline = {});

// Multi-run search: run 1 starts from `init` (or a seeded random point);
// later runs warm-start from the previous incumbent with the step size reset
// (or from fresh random points with cold_restarts). Stops early when two
// consecutive run values agree to within tau2 or the budget expires.
BooomResult optimize(const Objective& f, const BooomConfig& cfg,
                     const std::optional<StiefelPoint>& init = {});

/* ---------------------------------------------------------------------- */
/* Box-constrained variant                                                 */
/* ---------------------------------------------------------------------- */

// The same pattern search on a coordinate box: poll x +- s e_m (clipped to
// the box), accept strict improvements, divide the step by rho after an
// unsuccessful poll. Reduction events feed the convergence-rate oracle.
struct BoxRmpsConfig {
  double s_initial = std::numbers::pi;
  double rho = 2.0;
  double phi = 1e-6;
  int max_iter = 100000;

  void validate() const;
};

// k-th step-size reduction: the poll at `x` with step s_initial / rho^k
// found no improving candidate.
struct ReductionEvent {
  int k = 0;
  double g_value = 0.0;
  Eigen::VectorXd x;
};

struct BoxRmpsResult {
  Eigen::VectorXd x_best;
  double g_best = 0.0;
  std::vector<ReductionEvent> events;
  long evaluations = 0;
};

BoxRmpsResult box_rmps(const std::function<double(const Eigen::VectorXd&)>& g,
                       const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                       const Eigen::VectorXd& start, const BoxRmpsConfig& cfg = {});

}  // namespace booom
