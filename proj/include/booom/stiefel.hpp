#pragma once

#include <Eigen/Dense>

#include <random>
#include <utility>
#include <vector>

#include "booom/errors.hpp"

namespace booom {

/* ---------------------------------------------------------------------- */
/* Types                                                                   */
/* ---------------------------------------------------------------------- */

// A point on the Stiefel manifold St(p, d): a p-by-d matrix whose columns
// are orthonormal. Construction checks shape (p >= d >= 1) and finiteness;
// orthonormality itself is a caller contract, measured by
// orthonormality_error() and restored by reorthonormalize(). Keeping that
// check out of the constructor lets callers hold slightly drifted points
// while deciding whether to repair them.
class StiefelPoint {
 public:
  explicit StiefelPoint(Eigen::MatrixXd entries);

  Eigen::Index rows() const { return m_.rows(); }
  Eigen::Index cols() const { return m_.cols(); }
  const Eigen::MatrixXd& matrix() const { return m_; }

 private:
  Eigen::MatrixXd m_;
};

// One plane rotation: mix rows i and j (1-based, i < j) by angle theta.
struct GivensMove {
  int i = 0;
  int j = 0;
  double theta = 0.0;
};

// Angles for a full product of plane rotations, one per plane in pair_index
// order; length C(p, 2).
using AngleVector = std::vector<double>;

/* ---------------------------------------------------------------------- */
/* Plane enumeration                                                       */
/* ---------------------------------------------------------------------- */

// Number of rotation planes, C(p, 2).
int plane_count(int p);

// k-th plane (1-based k in [1, C(p,2)]) in lexicographic order:
// (1,2), (1,3), ..., (1,p), (2,3), ..., (p-1,p).
std::pair<int, int> pair_index(int k, int p);

/* ---------------------------------------------------------------------- */
/* Primitive operations                                                    */
/* ---------------------------------------------------------------------- */

// Wrap an angle to (-pi, pi].
double wrap_angle(double t);

// Apply the plane rotation R_{i,j}(theta) on the left: rows i and j of q are
// replaced by their cos/sin mix, every other row is copied bit-for-bit.
// Cost is O(d); the p-by-p rotation matrix is never formed.
StiefelPoint givens_apply(const StiefelPoint& q, const GivensMove& move);

// In-place variant on a raw matrix; i0 and j0 are 0-based row indices.
void givens_apply_rows(Eigen::MatrixXd& m, int i0, int j0, double theta);

// Draw uniformly from St(p, d): thin QR of a p-by-d standard Gaussian with
// column signs fixed so diag(R) > 0. Deterministic in the generator state.
StiefelPoint random_stiefel(int p, int d, std::mt19937_64& rng);

// Frobenius norm of Q^T Q - I_d.
double orthonormality_error(const StiefelPoint& q);

// Restore orthonormality by thin QR with the diag(R) > 0 sign fix. A point
// that is already orthonormal comes back essentially unchanged; drifted
// points move by O(drift). Rank-deficient input raises NumericalError.
StiefelPoint reorthonormalize(const StiefelPoint& q);

// Orthonormal factor of the polar decomposition, U V^T from the thin SVD:
// the orthonormal matrix closest to a in Frobenius norm. Requires full
// column rank.
Eigen::MatrixXd nearest_orthonormal(const Eigen::MatrixXd& a);

/* ---------------------------------------------------------------------- */
/* Angle-coordinate maps                                                   */
/* ---------------------------------------------------------------------- */

// Factor a square rotation u (orthogonal, det +1) into C(p, 2) plane
// rotations, one angle per plane in pair_index order with the (1,2)-plane
// factor leftmost in the product. Angles are reported in (-pi, pi].
// Orthogonal matrices with det -1 raise ReflectionError; matrices that are
// not orthogonal to within 1e-8 raise FeasibilityError.
AngleVector givens_decompose(const Eigen::MatrixXd& u);

// Evaluate the product of plane rotations on q0: the factor for plane
// pair_index(k) sits to the left of the factor for pair_index(k+1), so the
// (p-1, p)-plane rotation acts on q0 first and the (1, 2)-plane rotation
// acts last. Inverse of givens_decompose when q0 = I_p.
StiefelPoint givens_compose(const AngleVector& angles, const StiefelPoint& q0);

}  // namespace booom
