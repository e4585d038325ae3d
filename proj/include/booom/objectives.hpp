#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "booom/objective.hpp"

namespace booom {

/* ---------------------------------------------------------------------- */
/* Benchmark functions on square orthonormal matrices                      */
/* ---------------------------------------------------------------------- */

enum class BenchmarkKind { ackley, griewank, rosenbrock, rastrigin };

const char* to_string(BenchmarkKind kind);

// Classic scalar test functions in their standard forms; every one of them
// returns 0 on an empty input vector and attains 0 at its usual minimizer
// (the origin; the all-ones vector for Rosenbrock).
double ackley_base(const Eigen::VectorXd& x);
double griewank_base(const Eigen::VectorXd& x);       // 1-based sqrt(i) weights
double rosenbrock_base(const Eigen::VectorXd& x);
double rastrigin_base(const Eigen::VectorXd& x);

// Split a square matrix into the inputs of the modified benchmarks: the
// diagonal, and the off-diagonal entries scanned in row-major order.
Eigen::VectorXd diag_part(const Eigen::MatrixXd& m);
Eigen::VectorXd offdiag_part(const Eigen::MatrixXd& m);

// Benchmark adapted to St(p,p): the base function applied to a transformed
// diagonal part plus the same base applied to a transformed off-diagonal
// part, with transforms chosen so the identity matrix is the global
// minimizer with value 0. Ackley/Griewank/Rastrigin use 10*(diag - 1) and
// 10*offdiag; Rosenbrock uses diag and offdiag + 1.
class ModifiedBenchmark : public Objective {
 public:
  ModifiedBenchmark(BenchmarkKind kind, int p);

  double evaluate(const StiefelPoint& q) const override;
  std::string name() const override { return to_string(kind_); }
  int rows() const override { return p_; }
  int cols() const override { return p_; }
  BenchmarkKind kind() const { return kind_; }

 private:
  BenchmarkKind kind_;
  int p_;
};

/* ---------------------------------------------------------------------- */
/* Problem objectives (uniform minimization convention)                    */
/* ---------------------------------------------------------------------- */

// -sum_i q_i^T M_i q_i over the columns q_i of Q (a negated maximization).
class HeteroQuadratic : public Objective {
 public:
  explicit HeteroQuadratic(std::vector<Eigen::MatrixXd> ms);

  double evaluate(const StiefelPoint& q) const override;
  std::string name() const override { return "hetquad"; }
  int rows() const override { return p_; }
  int cols() const override { return d_; }
  const std::vector<Eigen::MatrixXd>& matrices() const { return ms_; }

 private:
  std::vector<Eigen::MatrixXd> ms_;
  int p_;
  int d_;
};

// Nuclear norm of the projected data plus an l1 penalty on the residual:
// ||X Q Q^T||_* + lambda * ||X - X Q Q^T||_1. The singular values come from
// a full SVD of the projected matrix at every evaluation. When no lambda is
// supplied it defaults to 1/sqrt(max(n,p)).
class LrSparse : public Objective {
 public:
  LrSparse(Eigen::MatrixXd x, int d, std::optional<double> lambda = std::nullopt);

  double evaluate(const StiefelPoint& q) const override;
  std::string name() const override { return "lrsparse"; }
  int rows() const override { return p_; }
  int cols() const override { return d_; }
  double lambda() const { return lambda_; }

 private:
  Eigen::MatrixXd x_;
  int p_;
  int d_;
  double lambda_;
};

// -(1/n) sum_{i,t} log cosh((W Xw)(i,t)) on whitened data Xw (p x n); the
// unmixing matrix W is square. log cosh is computed overflow-safely.
class IcaLogcosh : public Objective {
 public:
  explicit IcaLogcosh(Eigen::MatrixXd xw);

  double evaluate(const StiefelPoint& q) const override;
  std::string name() const override { return "ica"; }
  int rows() const override { return p_; }
  int cols() const override { return p_; }

 private:
  Eigen::MatrixXd xw_;
  int p_;
};

// Negated varimax criterion of B = A R: -sum_j [ mean(B_j^4) - mean(B_j^2)^2 ].
class VarimaxNeg : public Objective {
 public:
  explicit VarimaxNeg(Eigen::MatrixXd a);

  double evaluate(const StiefelPoint& q) const override;
  std::string name() const override { return "varimax"; }
  int rows() const override { return p_; }
  int cols() const override { return p_; }

 private:
  Eigen::MatrixXd a_;
  int p_;
};

// Sum over k of the squared off-diagonal Frobenius mass of W^T C_k W.
class OjdOffdiag : public Objective {
 public:
  explicit OjdOffdiag(std::vector<Eigen::MatrixXd> cs);

  double evaluate(const StiefelPoint& q) const override;
  std::string name() const override { return "ojd"; }
  int rows() const override { return p_; }
  int cols() const override { return p_; }
  const std::vector<Eigen::MatrixXd>& matrices() const { return cs_; }

 private:
  std::vector<Eigen::MatrixXd> cs_;
  int p_;
};

// trace(Q^T H Q) for symmetric H; minimized by the eigenvectors of the d
// smallest eigenvalues.
class RayleighRitz : public Objective {
 public:
  RayleighRitz(Eigen::MatrixXd h, int d);

  double evaluate(const StiefelPoint& q) const override;
  std::string name() const override { return "rritz"; }
  int rows() const override { return p_; }
  int cols() const override { return d_; }
  const Eigen::MatrixXd& matrix() const { return h_; }

 private:
  Eigen::MatrixXd h_;
  int p_;
  int d_;
};

// ||X - X Q Q^T||_F^2 + lambda1 * sum_i ||Q_{i.}||_2
//                     + lambda2 * (within-class scatter of the XQ rows).
// Labels are binary; both classes must be nonempty whenever lambda2 > 0.
class SupervisedSpca : public Objective {
 public:
  SupervisedSpca(Eigen::MatrixXd x, std::vector<int> y, double lambda1,
                 double lambda2, int d);

  double evaluate(const StiefelPoint& q) const override;
  std::string name() const override { return "sspca"; }
  int rows() const override { return p_; }
  int cols() const override { return d_; }
  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }

 private:
  Eigen::MatrixXd x_;
  std::vector<int> y_;
  double lambda1_;
  double lambda2_;
  int p_;
  int d_;
};

}  // namespace booom
