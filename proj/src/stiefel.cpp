#include "booom/stiefel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace booom {

namespace {

constexpr double kPi = std::numbers::pi;

// Gate for accepting a matrix as orthonormal input.
constexpr double kFeasibilityTol = 1e-8;

std::string dims_str(Eigen::Index r, Eigen::Index c) {
  std::ostringstream os;
  os << r << "x" << c;
  return os.str();
}

}  // namespace

/* ---------------------------------------------------------------------- */
/* StiefelPoint                                                            */
/* ---------------------------------------------------------------------- */

StiefelPoint::StiefelPoint(Eigen::MatrixXd entries) : m_(std::move(entries)) {
  if (m_.cols() < 1 || m_.rows() < m_.cols()) {
    throw std::invalid_argument("StiefelPoint: need p >= d >= 1, got " +
                                dims_str(m_.rows(), m_.cols()));
  }
  if (!m_.allFinite()) {
    throw std::invalid_argument("StiefelPoint: entries must be finite");
  }
}

/* ---------------------------------------------------------------------- */
/* Plane enumeration                                                       */
/* ---------------------------------------------------------------------- */

int plane_count(int p) {
  if (p < 1) throw std::invalid_argument("plane_count: p must be >= 1");
  return p * (p - 1) / 2;
}

std::pair<int, int> pair_index(int k, int p) {
  const int n = plane_count(p);
  if (k < 1 || k > n) {
    throw std::invalid_argument("pair_index: k out of range [1, C(p,2)]");
  }
  // Row i (1-based) owns p - i consecutive pairs; walk rows until k lands.
  int i = 1;
  int rem = k;
  while (rem > p - i) {
    rem -= p - i;
    ++i;
  }
  return {i, i + rem};
}

/* ---------------------------------------------------------------------- */
/* Primitive operations                                                    */
/* ---------------------------------------------------------------------- */

double wrap_angle(double t) {
  double w = t - 2.0 * kPi * std::floor((t + kPi) / (2.0 * kPi));
  // floor rounding can land exactly on -pi; the canonical interval is
  // half-open on the left.
  if (w <= -kPi) w = kPi;
  return w;
}

void givens_apply_rows(Eigen::MatrixXd& m, int i0, int j0, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Eigen::RowVectorXd ri = m.row(i0);
  const Eigen::RowVectorXd rj = m.row(j0);
  m.row(i0) = c * ri - s * rj;
  m.row(j0) = s * ri + c * rj;
}

StiefelPoint givens_apply(const StiefelPoint& q, const GivensMove& move) {
  const int p = static_cast<int>(q.rows());
  if (move.i < 1 || move.j <= move.i || move.j > p) {
    throw std::invalid_argument("givens_apply: need 1 <= i < j <= p");
  }
  if (!std::isfinite(move.theta)) {
    throw std::invalid_argument("givens_apply: angle must be finite");
  }
  Eigen::MatrixXd m = q.matrix();
  givens_apply_rows(m, move.i - 1, move.j - 1, move.theta);
  return StiefelPoint(std::move(m));
}

StiefelPoint random_stiefel(int p, int d, std::mt19937_64& rng) {
  if (d < 1 || p < d) {
    throw std::invalid_argument("random_stiefel: need p >= d >= 1");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(p, d);
  // Row-major fill order; part of the reproducibility contract for a seed.
  for (int r = 0; r < p; ++r) {
    for (int c = 0; c < d; ++c) g(r, c) = gauss(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(p, d);
  const Eigen::VectorXd rdiag = qr.matrixQR().diagonal().head(d);
  for (int c = 0; c < d; ++c) {
    if (rdiag(c) < 0.0) q.col(c) = -q.col(c);
  }
  return StiefelPoint(std::move(q));
}

double orthonormality_error(const StiefelPoint& q) {
  const Eigen::MatrixXd gram = q.matrix().transpose() * q.matrix();
  const Eigen::Index d = q.cols();
  return (gram - Eigen::MatrixXd::Identity(d, d)).norm();
}

StiefelPoint reorthonormalize(const StiefelPoint& q) {
  const Eigen::Index p = q.rows();
  const Eigen::Index d = q.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(q.matrix());
  const Eigen::VectorXd rdiag = qr.matrixQR().diagonal().head(d);
  const double scale = q.matrix().norm();
  for (Eigen::Index c = 0; c < d; ++c) {
    if (std::abs(rdiag(c)) <= 1e-12 * (scale > 0.0 ? scale : 1.0)) {
      throw NumericalError("reorthonormalize: input is numerically rank deficient");
    }
  }
  Eigen::MatrixXd out = qr.householderQ() * Eigen::MatrixXd::Identity(p, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    if (rdiag(c) < 0.0) out.col(c) = -out.col(c);
  }
  return StiefelPoint(std::move(out));
}

Eigen::MatrixXd nearest_orthonormal(const Eigen::MatrixXd& a) {
  if (a.cols() < 1 || a.rows() < a.cols()) {
    throw std::invalid_argument("nearest_orthonormal: need p >= d >= 1");
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("nearest_orthonormal: entries must be finite");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(sv.size() - 1) <= 1e-12 * sv(0)) {
    throw NumericalError("nearest_orthonormal: input is numerically rank deficient");
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

/* ---------------------------------------------------------------------- */
/* Angle-coordinate maps                                                   */
/* ---------------------------------------------------------------------- */

AngleVector givens_decompose(const Eigen::MatrixXd& u) {
  const int p = static_cast<int>(u.rows());
  if (p < 1 || u.cols() != u.rows()) {
    throw std::invalid_argument("givens_decompose: input must be square");
  }
  if (!u.allFinite()) {
    throw std::invalid_argument("givens_decompose: entries must be finite");
  }
  const Eigen::MatrixXd gram = u.transpose() * u;
  if ((gram - Eigen::MatrixXd::Identity(p, p)).norm() > kFeasibilityTol) {
    throw FeasibilityError("givens_decompose: input is not orthogonal");
  }
  if (u.determinant() < 0.0) {
    throw ReflectionError(
        "givens_decompose: determinant is -1; reflections have no plane-rotation factorization");
  }

  // Givens QR: zero the subdiagonal column by column. Eliminating entry
  // (j, i) with the (i, j)-plane rotation, in lexicographic order, leaves
  // the identity (an upper-triangular rotation with nonnegative diagonal),
  // so u equals the product of the transposed eliminations taken in the
  // same order — the composition convention of givens_compose.
  Eigen::MatrixXd t = u;
  AngleVector angles;
  angles.reserve(static_cast<size_t>(plane_count(p)));
  for (int i = 0; i < p - 1; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const double a = t(i, i);
      const double b = t(j, i);
      double elim = 0.0;
      if (b != 0.0 || a != 0.0) elim = std::atan2(-b, a);
      givens_apply_rows(t, i, j, elim);
      angles.push_back(wrap_angle(-elim));
    }
  }
  return angles;
}

StiefelPoint givens_compose(const AngleVector& angles, const StiefelPoint& q0) {
  const int p = static_cast<int>(q0.rows());
  const int n = plane_count(p);
  if (static_cast<int>(angles.size()) != n) {
    throw std::invalid_argument("givens_compose: need exactly C(p,2) angles");
  }
  for (double t : angles) {
    if (!std::isfinite(t)) {
      throw std::invalid_argument("givens_compose: angles must be finite");
    }
  }
  Eigen::MatrixXd m = q0.matrix();
  // Rightmost factor first: plane (p-1, p), ending with plane (1, 2).
  for (int k = n; k >= 1; --k) {
    const auto [i, j] = pair_index(k, p);
    givens_apply_rows(m, i - 1, j - 1, angles[static_cast<size_t>(k - 1)]);
  }
  return StiefelPoint(std::move(m));
}

}  // namespace booom
