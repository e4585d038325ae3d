#include "booom/engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace booom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Feasibility gate on inputs and incumbents.
constexpr double kFeasibilityTol = 1e-8;

// Drift level past which the engine reorthonormalizes the incumbent.
constexpr double kRepairThreshold = 1e-9;

using Clock = std::chrono::steady_clock;
using Deadline = std::optional<Clock::time_point>;

bool expired(const Deadline& deadline) {
  return deadline && Clock::now() >= *deadline;
}

}  // namespace

const char* to_string(TerminalReason r) {
  switch (r) {
    case TerminalReason::step_floor: return "step_floor";
    case TerminalReason::iter_cap: return "iter_cap";
    case TerminalReason::budget: return "budget";
  }
  return "unknown";
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::tau2_converged: return "tau2_converged";
    case StopReason::max_runs: return "max_runs";
    case StopReason::budget: return "budget";
  }
  return "unknown";
}

void BooomConfig::validate() const {
  if (!(std::isfinite(s_initial) && s_initial > 0.0)) {
    throw std::invalid_argument("config: s_initial must be positive and finite");
  }
  if (!(std::isfinite(rho) && rho > 1.0)) {
    throw std::invalid_argument("config: rho must be > 1");
  }
  if (!(std::isfinite(phi) && phi > 0.0 && phi < s_initial)) {
    throw std::invalid_argument("config: phi must satisfy 0 < phi < s_initial");
  }
  if (!(std::isfinite(tau1) && tau1 > 0.0)) {
    throw std::invalid_argument("config: tau1 must be positive");
  }
  if (!(std::isfinite(tau2) && tau2 > 0.0)) {
    throw std::invalid_argument("config: tau2 must be positive");
  }
  if (max_iter < 1) throw std::invalid_argument("config: max_iter must be >= 1");
  if (max_runs < 1) throw std::invalid_argument("config: max_runs must be >= 1");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (!(std::isfinite(budget_seconds) && budget_seconds >= 0.0)) {
    throw std::invalid_argument("config: budget_seconds must be >= 0");
  }
}

/* ---------------------------------------------------------------------- */
/* Sweep                                                                   */
/* ---------------------------------------------------------------------- */

SweepOutcome sweep(const Objective& f, const StiefelPoint& q, double s,
                   int workers, RunTrace* trace) {
  const int p = static_cast<int>(q.rows());
  if (p < 2) throw std::invalid_argument("sweep: need p >= 2 (no rotation planes)");
  if (!(std::isfinite(s) && s > 0.0)) {
    throw std::invalid_argument("sweep: step size must be positive and finite");
  }
  if (workers < 1) throw std::invalid_argument("sweep: workers must be >= 1");

  const int n_candidates = 2 * plane_count(p);
  std::vector<double> values(static_cast<size_t>(n_candidates));
  std::vector<unsigned char> failed(static_cast<size_t>(n_candidates), 0);

  auto eval_range = [&](int lo, int hi) {
    for (int idx = lo; idx < hi; ++idx) {
      const int k = idx + 1;
      const auto [i, j] = pair_index((k + 1) / 2, p);
      const double theta = (k % 2 == 1) ? -s : s;
      Eigen::MatrixXd cand = q.matrix();
      givens_apply_rows(cand, i - 1, j - 1, theta);
      const double v = f.evaluate(StiefelPoint(std::move(cand)));
      if (std::isfinite(v)) {
        values[static_cast<size_t>(idx)] = v;
      } else {
        values[static_cast<size_t>(idx)] = kInf;
        failed[static_cast<size_t>(idx)] = 1;
      }
    }
  };

  const int n_workers = std::min(workers, n_candidates);
  if (n_workers <= 1) {
    eval_range(0, n_candidates);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<size_t>(n_workers));
    pool.reserve(static_cast<size_t>(n_workers));
    const int chunk = (n_candidates + n_workers - 1) / n_workers;
    for (int w = 0; w < n_workers; ++w) {
      const int lo = w * chunk;
      const int hi = std::min(n_candidates, lo + chunk);
      pool.emplace_back([&, lo, hi, w] {
        try {
          eval_range(lo, hi);
        } catch (...) {
          errors[static_cast<size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  // Serial reduction; ties go to the smallest candidate index, which makes
  // the result independent of how the evaluations were scheduled.
  int best_idx = 0;
  for (int idx = 1; idx < n_candidates; ++idx) {
    if (values[static_cast<size_t>(idx)] < values[static_cast<size_t>(best_idx)]) {
      best_idx = idx;
    }
  }
  if (values[static_cast<size_t>(best_idx)] == kInf) {
    throw NumericalError("sweep: every candidate evaluation was non-finite");
  }
  if (trace) {
    for (int idx = 0; idx < n_candidates; ++idx) {
      if (failed[static_cast<size_t>(idx)]) {
        std::ostringstream os;
        os << "sweep: candidate " << (idx + 1) << " at step " << s
           << " returned a non-finite value; treated as +inf";
        trace->warnings.push_back(os.str());
      }
    }
  }

  const int best_k = best_idx + 1;
  const auto [bi, bj] = pair_index((best_k + 1) / 2, p);
  SweepOutcome out;
  out.best_move = GivensMove{bi, bj, (best_k % 2 == 1) ? -s : s};
  out.best_value = values[static_cast<size_t>(best_idx)];
  out.best_k = best_k;
  out.evaluations = n_candidates;
  return out;
}

/* ---------------------------------------------------------------------- */
/* Single run                                                              */
/* ---------------------------------------------------------------------- */

RunOutcome run(const Objective& f, const StiefelPoint& q0, const BooomConfig& cfg,
               RunTrace& trace, int run_index, double f0, Deadline deadline) {
  cfg.validate();
  if (q0.rows() < 2) throw std::invalid_argument("run: need p >= 2");
  if (orthonormality_error(q0) > kFeasibilityTol) {
    throw FeasibilityError("run: starting point is not orthonormal");
  }

  StiefelPoint q = q0;
  long evaluations = 0;
  if (!std::isfinite(f0)) {
    f0 = f.evaluate(q);
    ++evaluations;
    if (!std::isfinite(f0)) {
      throw NumericalError("run: objective is non-finite at the starting point");
    }
  }
  double fq = f0;

  double s = cfg.s_initial;
  int h = 1;
  bool out_of_time = false;
  while (h <= cfg.max_iter && s > cfg.phi) {
    // The budget is only consulted between sweeps; a sweep in flight always
    // finishes.
    if (expired(deadline)) {
      out_of_time = true;
      break;
    }
    const double f1 = fq;
    const SweepOutcome poll = sweep(f, q, s, cfg.workers, &trace);
    evaluations += poll.evaluations;
    const double f2 = poll.best_value;

    bool accepted = false;
    if (f2 < f1) {
      q = givens_apply(q, poll.best_move);
      fq = f2;
      accepted = true;
    }
    // The step shrinks whenever an iteration after the first moved the
    // incumbent value by less than tau1 -- which covers both a tiny accepted
    // improvement and an unsuccessful sweep (no acceptance, zero change).
    // Without the unsuccessful-sweep case the state would never change again
    // and the run would spin at a fixed step until the iteration cap.
    if (h > 1 && std::abs(f1 - fq) < cfg.tau1 && s > cfg.phi) {
      s /= cfg.rho;
    }

    const double drift = orthonormality_error(q);
    bool repaired = false;
    if (drift > kRepairThreshold) {
      q = reorthonormalize(q);
      fq = f.evaluate(q);  // refresh the cached value at the repaired point
      ++evaluations;
      if (!std::isfinite(fq)) {
        throw NumericalError("run: objective is non-finite at the repaired incumbent");
      }
      repaired = true;
      std::ostringstream os;
      os << "run " << run_index << " iter " << h
         << ": reorthonormalized incumbent (drift " << drift << ")";
      trace.warnings.push_back(os.str());
    }

    TraceRecord rec;
    rec.run = run_index;
    rec.iter = h;
    rec.step = s;
    rec.f = fq;
    rec.accepted = accepted;
    if (accepted) rec.move = poll.best_move;
    rec.reorthonormalized = repaired;
    rec.ortho_error = drift;
    trace.records.push_back(rec);
    ++h;
  }

  RunOutcome out{std::move(q), fq, TerminalReason::step_floor, evaluations};
  if (out_of_time) {
    out.reason = TerminalReason::budget;
  } else if (s <= cfg.phi) {
    out.reason = TerminalReason::step_floor;
  } else {
    out.reason = TerminalReason::iter_cap;
  }
  trace.terminal_reasons.push_back(out.reason);
  return out;
}

/* ---------------------------------------------------------------------- */
/* Multi-run search                                                        */
/* ---------------------------------------------------------------------- */

BooomResult optimize(const Objective& f, const BooomConfig& cfg,
                     const std::optional<StiefelPoint>& init) {
  cfg.validate();
  const int p = f.rows();
  const int d = f.cols();
  if (d < 1 || p < d) throw std::invalid_argument("optimize: objective declares invalid dims");
  if (p < 2) throw std::invalid_argument("optimize: need p >= 2");

  const auto t0 = Clock::now();
  Deadline deadline;
  if (cfg.budget_seconds > 0.0) {
    deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                        std::chrono::duration<double>(cfg.budget_seconds));
  }

  std::mt19937_64 rng(cfg.seed);
  StiefelPoint q = init ? *init : random_stiefel(p, d, rng);
  if (q.rows() != p || q.cols() != d) {
    throw std::invalid_argument("optimize: init has the wrong shape");
  }
  if (orthonormality_error(q) > kFeasibilityTol) {
    throw FeasibilityError("optimize: init is not orthonormal");
  }

  RunTrace trace;
  long total_evaluations = 1;
  double fq = f.evaluate(q);
  if (!std::isfinite(fq)) {
    throw NumericalError("optimize: objective is non-finite at the initial point");
  }

  StiefelPoint q_best = q;
  double f_best = fq;
  StopReason stop = StopReason::max_runs;
  int runs_completed = 0;
  double prev_run_value = 0.0;

  for (int r = 1; r <= cfg.max_runs; ++r) {
    if (r >= 2 && cfg.cold_restarts) {
      q = random_stiefel(p, d, rng);
      fq = f.evaluate(q);
      ++total_evaluations;
      if (!std::isfinite(fq)) {
        throw NumericalError("optimize: objective is non-finite at a restart point");
      }
    }
    RunOutcome out = run(f, q, cfg, trace, r, fq, deadline);
    total_evaluations += out.evaluations;
    runs_completed = r;
    q = std::move(out.q);
    fq = out.f;
    if (fq < f_best) {
      f_best = fq;
      q_best = q;
    }
    if (out.reason == TerminalReason::budget) {
      stop = StopReason::budget;
      break;
    }
    if (r >= 2 && std::abs(fq - prev_run_value) < cfg.tau2) {
      stop = StopReason::tau2_converged;
      break;
    }
    prev_run_value = fq;
    if (r < cfg.max_runs && expired(deadline)) {
      // Do not open a run the budget cannot pay for.
      stop = StopReason::budget;
      break;
    }
  }

  BooomResult result{std::move(q_best), f_best, runs_completed,
                     total_evaluations, std::move(trace), stop};
  return result;
}

/* ---------------------------------------------------------------------- */
/* Box-constrained variant                                                 */
/* ---------------------------------------------------------------------- */

void BoxRmpsConfig::validate() const {
  if (!(std::isfinite(s_initial) && s_initial > 0.0)) {
    throw std::invalid_argument("box_rmps: s_initial must be positive and finite");
  }
  if (!(std::isfinite(rho) && rho > 1.0)) {
    throw std::invalid_argument("box_rmps: rho must be > 1");
  }
  if (!(std::isfinite(phi) && phi > 0.0 && phi < s_initial)) {
    throw std::invalid_argument("box_rmps: phi must satisfy 0 < phi < s_initial");
  }
  if (max_iter < 1) throw std::invalid_argument("box_rmps: max_iter must be >= 1");
}

BoxRmpsResult box_rmps(const std::function<double(const Eigen::VectorXd&)>& g,
                       const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                       const Eigen::VectorXd& start, const BoxRmpsConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = start.size();
  if (n < 1) throw std::invalid_argument("box_rmps: empty start vector");
  if (lower.size() != n || upper.size() != n) {
    throw std::invalid_argument("box_rmps: box bounds must match the start dimension");
  }
  for (Eigen::Index m = 0; m < n; ++m) {
    if (!(lower(m) < upper(m))) {
      throw std::invalid_argument("box_rmps: need lower < upper in every coordinate");
    }
    if (start(m) < lower(m) || start(m) > upper(m)) {
      throw std::invalid_argument("box_rmps: start must lie inside the box");
    }
  }

  Eigen::VectorXd x = start;
  double gx = g(x);
  long evaluations = 1;
  if (!std::isfinite(gx)) {
    throw NumericalError("box_rmps: objective is non-finite at the start");
  }

  BoxRmpsResult result;
  double s = cfg.s_initial;
  int level = 0;  // number of reductions so far; current step is s_initial/rho^level
  int h = 1;
  while (h <= cfg.max_iter && s > cfg.phi) {
    double best = kInf;
    Eigen::VectorXd best_x;
    for (Eigen::Index m = 0; m < n; ++m) {
      for (int sign = -1; sign <= 1; sign += 2) {
        Eigen::VectorXd cand = x;
        cand(m) = std::clamp(cand(m) + sign * s, lower(m), upper(m));
        double v = g(cand);
        ++evaluations;
        if (!std::isfinite(v)) v = kInf;
        if (v < best) {
          best = v;
          best_x = std::move(cand);
        }
      }
    }
    if (best < gx) {
      x = std::move(best_x);
      gx = best;
    } else {
      // Unsuccessful poll: record the event at the current level, then
      // shrink the step.
      result.events.push_back(ReductionEvent{level, gx, x});
      s /= cfg.rho;
      ++level;
    }
    ++h;
  }

  result.x_best = std::move(x);
  result.g_best = gx;
  result.evaluations = evaluations;
  return result;
}

}  // namespace booom
