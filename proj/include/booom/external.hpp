#pragma once

#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "booom/objective.hpp"

namespace booom {

// How to reach a black-box objective served by a child process.
struct ExternalObjectiveSpec {
  std::vector<std::string> command;    // executable followed by its arguments
  std::string protocol = "line-text";  // the only supported exchange format
  double timeout_seconds = 60.0;       // per-evaluation reply deadline
  int max_restarts = 3;                // consecutive restarts tolerated per worker slot

  // Throws ConfigError on an empty command, unknown protocol, non-positive
  // timeout, or negative restart budget.
  void validate() const;
};

// Objective evaluated by child processes speaking a line-text protocol: each
// request is the candidate in matrix text format followed by a blank line,
// and the reply is a single line holding one decimal value.
//
// Failure policy: a reply that is missing (crash), late (timeout), or
// unparsable fails only that candidate — evaluate() returns NaN, which the
// search engine treats as +infinity — and the child is replaced. A
// well-formed but non-finite reply also fails the candidate but leaves the
// child running. Each worker slot tolerates up to max_restarts consecutive
// replacements (the counter resets on every successful reply); one more
// failure after that raises NumericalError. A child that cannot be spawned
// at construction raises ConfigError.
//
// Construction starts one child per worker slot, so that many evaluate()
// calls can run concurrently without sharing a pipe; extra callers block
// until a slot frees up. Destruction must not race evaluate().
class ExternalObjective : public Objective {
 public:
  ExternalObjective(ExternalObjectiveSpec spec, int p, int d, int workers = 1);
  ~ExternalObjective() override;

  ExternalObjective(const ExternalObjective&) = delete;
  ExternalObjective& operator=(const ExternalObjective&) = delete;

  double evaluate(const StiefelPoint& q) const override;
  std::string name() const override;
  int rows() const override;
  int cols() const override;

  // Protocol incidents recorded so far (crashes, timeouts, malformed or
  // non-finite replies), oldest first.
  std::vector<std::string> incidents() const;

 private:
  struct Slot;

  std::unique_ptr<Slot> checkout() const;
  void restore(std::unique_ptr<Slot> slot) const;
  void record(const std::string& incident) const;

  ExternalObjectiveSpec spec_;
  int p_;
  int d_;
  mutable std::mutex pool_mutex_;
  mutable std::condition_variable pool_cv_;
  mutable std::vector<std::unique_ptr<Slot>> idle_;
  mutable std::vector<std::string> incidents_;
};

}  // namespace booom
