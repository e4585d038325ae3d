#include "booom/objectives.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace booom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Overflow-safe log(cosh(z)): |z| + log1p(e^{-2|z|}) - log 2, exact for all
// finite z (cosh overflows past |z| ~ 710 if computed directly).
double log_cosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

void require_square_stack(const std::vector<Eigen::MatrixXd>& ms, const char* who) {
  if (ms.empty()) throw std::invalid_argument(std::string(who) + ": empty matrix list");
  const Eigen::Index p = ms.front().rows();
  for (const auto& m : ms) {
    if (m.rows() != p || m.cols() != p) {
      throw std::invalid_argument(std::string(who) +
                                  ": all matrices must be square with a common size");
    }
    if (!m.allFinite()) {
      throw std::invalid_argument(std::string(who) + ": matrix entries must be finite");
    }
  }
}

}  // namespace

/* ---------------------------------------------------------------------- */
/* Benchmark bases                                                         */
/* ---------------------------------------------------------------------- */

const char* to_string(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::ackley: return "ackley";
    case BenchmarkKind::griewank: return "griewank";
    case BenchmarkKind::rosenbrock: return "rosenbrock";
    case BenchmarkKind::rastrigin: return "rastrigin";
  }
  return "benchmark";
}

double ackley_base(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  if (n == 0) return 0.0;
  const double root_mean_sq = std::sqrt(x.squaredNorm() / static_cast<double>(n));
  const double mean_cos = (kTwoPi * x.array()).cos().mean();
  return -20.0 * std::exp(-0.2 * root_mean_sq) - std::exp(mean_cos) + 20.0 +
         std::numbers::e;
}

double griewank_base(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  if (n == 0) return 0.0;
  double prod = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    prod *= std::cos(x(i) / std::sqrt(static_cast<double>(i + 1)));
  }
  return x.squaredNorm() / 4000.0 - prod + 1.0;
}

double rosenbrock_base(const Eigen::VectorXd& x) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x(i + 1) - x(i) * x(i);
    const double b = 1.0 - x(i);
    sum += 100.0 * a * a + b * b;
  }
  return sum;
}

double rastrigin_base(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  double sum = 10.0 * static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sum += x(i) * x(i) - 10.0 * std::cos(kTwoPi * x(i));
  }
  return sum;
}

Eigen::VectorXd diag_part(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("diag_part: matrix must be square");
  return m.diagonal();
}

Eigen::VectorXd offdiag_part(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("offdiag_part: matrix must be square");
  }
  const Eigen::Index p = m.rows();
  Eigen::VectorXd out(p * (p - 1));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (i != j) out(k++) = m(i, j);
    }
  }
  return out;
}

ModifiedBenchmark::ModifiedBenchmark(BenchmarkKind kind, int p) : kind_(kind), p_(p) {
  if (p < 1) throw std::invalid_argument("ModifiedBenchmark: need p >= 1");
}

double ModifiedBenchmark::evaluate(const StiefelPoint& q) const {
  check_shape(q);
  const Eigen::VectorXd xd = diag_part(q.matrix());
  const Eigen::VectorXd xod = offdiag_part(q.matrix());
  const Eigen::VectorXd scaled_diag = 10.0 * (xd - Eigen::VectorXd::Ones(xd.size()));
  switch (kind_) {
    case BenchmarkKind::ackley:
      return ackley_base(scaled_diag) + ackley_base(10.0 * xod);
    case BenchmarkKind::griewank:
      return griewank_base(scaled_diag) + griewank_base(10.0 * xod);
    case BenchmarkKind::rastrigin:
      return rastrigin_base(scaled_diag) + rastrigin_base(10.0 * xod);
    case BenchmarkKind::rosenbrock:
      return rosenbrock_base(xd) +
             rosenbrock_base(xod + Eigen::VectorXd::Ones(xod.size()));
  }
  throw std::logic_error("ModifiedBenchmark: unknown kind");
}

/* ---------------------------------------------------------------------- */
/* Heterogeneous quadratic                                                 */
/* ---------------------------------------------------------------------- */

HeteroQuadratic::HeteroQuadratic(std::vector<Eigen::MatrixXd> ms) : ms_(std::move(ms)) {
  require_square_stack(ms_, "hetquad");
  p_ = static_cast<int>(ms_.front().rows());
  d_ = static_cast<int>(ms_.size());
  if (d_ > p_) throw std::invalid_argument("hetquad: more matrices than columns fit St(p,d)");
}

double HeteroQuadratic::evaluate(const StiefelPoint& q) const {
  check_shape(q);
  double sum = 0.0;
  for (int i = 0; i < d_; ++i) {
    const auto qi = q.matrix().col(i);
    sum += qi.dot(ms_[static_cast<size_t>(i)] * qi);
  }
  return -sum;
}

/* ---------------------------------------------------------------------- */
/* Low-rank + sparse decomposition                                        */
/* ---------------------------------------------------------------------- */

LrSparse::LrSparse(Eigen::MatrixXd x, int d, std::optional<double> lambda)
    : x_(std::move(x)) {
  if (x_.rows() < 1 || x_.cols() < 1) throw std::invalid_argument("lrsparse: empty data");
  if (!x_.allFinite()) throw std::invalid_argument("lrsparse: data must be finite");
  p_ = static_cast<int>(x_.cols());
  d_ = d;
  if (d < 1 || d > p_) throw std::invalid_argument("lrsparse: need 1 <= d <= p");
  const double n_or_p = static_cast<double>(std::max(x_.rows(), x_.cols()));
  lambda_ = lambda ? *lambda : 1.0 / std::sqrt(n_or_p);
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) {
    throw std::invalid_argument("lrsparse: lambda must be positive");
  }
}

double LrSparse::evaluate(const StiefelPoint& q) const {
  check_shape(q);
  const Eigen::MatrixXd projected = (x_ * q.matrix()) * q.matrix().transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(projected);
  const double nuclear = svd.singularValues().sum();
  const double l1 = (x_ - projected).cwiseAbs().sum();
  return nuclear + lambda_ * l1;
}

/* ---------------------------------------------------------------------- */
/* ICA negative log cosh                                                   */
/* ---------------------------------------------------------------------- */

IcaLogcosh::IcaLogcosh(Eigen::MatrixXd xw) : xw_(std::move(xw)) {
  if (xw_.cols() < 1) throw std::invalid_argument("ica: need at least one sample");
  if (xw_.rows() < 1) throw std::invalid_argument("ica: need at least one channel");
  if (!xw_.allFinite()) throw std::invalid_argument("ica: data must be finite");
  p_ = static_cast<int>(xw_.rows());
}

double IcaLogcosh::evaluate(const StiefelPoint& q) const {
  check_shape(q);
  const Eigen::MatrixXd z = q.matrix() * xw_;  // (i,t) = w_i . x_t, rows of W
  double sum = 0.0;
  for (Eigen::Index t = 0; t < z.cols(); ++t) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      sum += log_cosh(z(i, t));
    }
  }
  return -sum / static_cast<double>(z.cols());
}

/* ---------------------------------------------------------------------- */
/* Negated varimax                                                         */
/* ---------------------------------------------------------------------- */

VarimaxNeg::VarimaxNeg(Eigen::MatrixXd a) : a_(std::move(a)) {
  if (a_.rows() < 1 || a_.cols() < 1) throw std::invalid_argument("varimax: empty loadings");
  if (!a_.allFinite()) throw std::invalid_argument("varimax: loadings must be finite");
  p_ = static_cast<int>(a_.cols());
}

double VarimaxNeg::evaluate(const StiefelPoint& q) const {
  check_shape(q);
  const Eigen::MatrixXd b = a_ * q.matrix();
  const double n = static_cast<double>(b.rows());
  double v = 0.0;
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    const Eigen::ArrayXd sq = b.col(j).array().square();
    const double m4 = (sq * sq).sum() / n;
    const double m2 = sq.sum() / n;
    v += m4 - m2 * m2;
  }
  return -v;
}

/* ---------------------------------------------------------------------- */
/* Orthogonal joint diagonalization                                        */
/* ---------------------------------------------------------------------- */

OjdOffdiag::OjdOffdiag(std::vector<Eigen::MatrixXd> cs) : cs_(std::move(cs)) {
  require_square_stack(cs_, "ojd");
  p_ = static_cast<int>(cs_.front().rows());
}

double OjdOffdiag::evaluate(const StiefelPoint& q) const {
  check_shape(q);
  // Summing the off-diagonal squares directly (rather than subtracting the
  // diagonal mass from the total) keeps the value nonnegative by
  // construction even when the off-diagonal part is at roundoff level.
  double sum = 0.0;
  for (const auto& c : cs_) {
    const Eigen::MatrixXd t = q.matrix().transpose() * c * q.matrix();
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      for (Eigen::Index j = 0; j < t.cols(); ++j) {
        if (i != j) sum += t(i, j) * t(i, j);
      }
    }
  }
  return sum;
}

/* ---------------------------------------------------------------------- */
/* Rayleigh-Ritz trace                                                     */
/* ---------------------------------------------------------------------- */

RayleighRitz::RayleighRitz(Eigen::MatrixXd h, int d) : h_(std::move(h)), d_(d) {
  if (h_.rows() != h_.cols() || h_.rows() < 1) {
    throw std::invalid_argument("rritz: matrix must be square");
  }
  if (!h_.allFinite()) throw std::invalid_argument("rritz: matrix must be finite");
  if ((h_ - h_.transpose()).cwiseAbs().maxCoeff() > 1e-8) {
    throw std::invalid_argument("rritz: matrix must be symmetric within 1e-8");
  }
  p_ = static_cast<int>(h_.rows());
  if (d < 1 || d > p_) throw std::invalid_argument("rritz: need 1 <= d <= p");
}

double RayleighRitz::evaluate(const StiefelPoint& q) const {
  check_shape(q);
  return (q.matrix().transpose() * h_ * q.matrix()).trace();
}

/* ---------------------------------------------------------------------- */
/* Supervised sparse PCA                                                   */
/* ---------------------------------------------------------------------- */

SupervisedSpca::SupervisedSpca(Eigen::MatrixXd x, std::vector<int> y, double lambda1,
                               double lambda2, int d)
    : x_(std::move(x)), y_(std::move(y)), lambda1_(lambda1), lambda2_(lambda2), d_(d) {
  if (x_.rows() < 1 || x_.cols() < 1) throw std::invalid_argument("sspca: empty data");
  if (!x_.allFinite()) throw std::invalid_argument("sspca: data must be finite");
  if (static_cast<Eigen::Index>(y_.size()) != x_.rows()) {
    throw std::invalid_argument("sspca: one label per data row required");
  }
  if (!(lambda1_ >= 0.0) || !(lambda2_ >= 0.0)) {
    throw std::invalid_argument("sspca: penalties must be nonnegative");
  }
  int count[2] = {0, 0};
  for (int label : y_) {
    if (label != 0 && label != 1) {
      throw std::invalid_argument("sspca: labels must be 0 or 1");
    }
    ++count[label];
  }
  if (lambda2_ > 0.0 && (count[0] == 0 || count[1] == 0)) {
    throw std::invalid_argument("sspca: both classes must be nonempty when lambda2 > 0");
  }
  p_ = static_cast<int>(x_.cols());
  if (d < 1 || d > p_) throw std::invalid_argument("sspca: need 1 <= d <= p");
}

double SupervisedSpca::evaluate(const StiefelPoint& q) const {
  check_shape(q);
  const Eigen::MatrixXd scores = x_ * q.matrix();  // n x d
  const double recon = (x_ - scores * q.matrix().transpose()).squaredNorm();

  double row_norms = 0.0;
  for (int i = 0; i < p_; ++i) row_norms += q.matrix().row(i).norm();

  double fisher = 0.0;
  if (lambda2_ > 0.0) {
    Eigen::RowVectorXd mean0 = Eigen::RowVectorXd::Zero(d_);
    Eigen::RowVectorXd mean1 = Eigen::RowVectorXd::Zero(d_);
    int count[2] = {0, 0};
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
      if (y_[static_cast<size_t>(i)] == 0) {
        mean0 += scores.row(i);
        ++count[0];
      } else {
        mean1 += scores.row(i);
        ++count[1];
      }
    }
    mean0 /= static_cast<double>(count[0]);
    mean1 /= static_cast<double>(count[1]);
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
      const Eigen::RowVectorXd& mean = y_[static_cast<size_t>(i)] == 0 ? mean0 : mean1;
      fisher += (scores.row(i) - mean).squaredNorm();
    }
  }
  return recon + lambda1_ * row_norms + lambda2_ * fisher;
}

}  // namespace booom
