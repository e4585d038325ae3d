#pragma once

#include <functional>
#include <string>
#include <utility>

#include "booom/stiefel.hpp"

namespace booom {

// Black-box objective over St(p, d), to be minimized. Implementations are
// immutable after construction and must tolerate concurrent evaluate()
// calls — the search engine fans candidate evaluations out across worker
// threads. Returning a non-finite value marks that candidate as failed;
// throwing is reserved for unrecoverable conditions.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual double evaluate(const StiefelPoint& q) const = 0;
  virtual std::string name() const = 0;

  // Required argument shape.
  virtual int rows() const = 0;
  virtual int cols() const = 0;

 protected:
  // Shared argument-shape guard for implementations.
  void check_shape(const StiefelPoint& q) const {
    if (q.rows() != rows() || q.cols() != cols()) {
      throw std::invalid_argument(name() + ": expected a " +
                                  std::to_string(rows()) + "x" +
                                  std::to_string(cols()) + " point");
    }
  }
};

// Adapter for ad-hoc objectives (tests, quick experiments).
class FunctionObjective : public Objective {
 public:
  FunctionObjective(int p, int d, std::string name,
                    std::function<double(const StiefelPoint&)> fn)
      : p_(p), d_(d), name_(std::move(name)), fn_(std::move(fn)) {}

  double evaluate(const StiefelPoint& q) const override { return fn_(q); }
  std::string name() const override { return name_; }
  int rows() const override { return p_; }
  int cols() const override { return d_; }

 private:
  int p_;
  int d_;
  std::string name_;
  std::function<double(const StiefelPoint&)> fn_;
};

}  // namespace booom
