#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "booom/engine.hpp"
#include "booom/objective.hpp"

namespace booom {

/* ---------------------------------------------------------------------- */
/* Reporting                                                               */
/* ---------------------------------------------------------------------- */

// One named evaluation result, optionally paired with the reference value it
// is measured against and the tolerance applied to the comparison.
struct MetricReport {
  std::string name;
  double value = 0.0;
  std::optional<double> baseline;
  std::optional<double> tolerance;
};

/* ---------------------------------------------------------------------- */
/* Ground-truth oracles                                                    */
/* ---------------------------------------------------------------------- */

struct EigGroundTruth {
  double value;         // sum of the d algebraically smallest eigenvalues
  StiefelPoint q_star;  // the corresponding orthonormal eigenvectors
};

// Exact minimizer of the trace objective tr(Q^T H Q) over St(p, d) by
// symmetric eigendecomposition. H must be symmetric (1e-8 gate) and d in
// [1, p].
EigGroundTruth eig_ground_truth(const Eigen::MatrixXd& h, int d);

struct CircleMinimum {
  double best_value;
  double best_angle;  // in [0, 2*pi)
};

// Global-minimum oracle for objectives on St(2,1) or St(2,2): evaluates
// Q(theta) = R_12(theta) * Q0 on `resolution` equally spaced angles in
// [0, 2*pi), with Q0 the leading columns of the identity. On St(2,1) the
// negated column is evaluated as well (angle theta + pi), so odd resolutions
// still see antipodal pairs. Requires resolution >= 1000.
CircleMinimum circle_brute_force(const Objective& objective, int resolution);

/* ---------------------------------------------------------------------- */
/* Distances and residuals                                                 */
/* ---------------------------------------------------------------------- */

// Normalized Amari index of P = w_hat * a: zero exactly when P is a scaled
// permutation, at most 1, invariant to row rescaling of w_hat. Singular `a`
// raises NumericalError.
double amari_distance(const Eigen::MatrixXd& w_hat, const Eigen::MatrixXd& a);

// Mean of |l_hat - l| over all entries; shapes must match.
double mean_absolute_error(const Eigen::MatrixXd& l_hat, const Eigen::MatrixXd& l);

// First-order stationarity residual of the trace objective tr(Q^T H Q):
// Frobenius norm of the Riemannian gradient under the embedded metric,
// || G - Q sym(Q^T G) ||_F with G = 2 H Q and sym(M) = (M + M^T)/2.
double kkt_residual(const Eigen::MatrixXd& h, const StiefelPoint& q);

// True iff every reduction event satisfies the sublinear complexity bound
// g_k - g_star <= l_smooth * n_coords * s0^2 / (8 (rho^2 - 1) (k + 1))
// with a 1e-12 additive slack. The empty list passes.
bool rate_bound_check(const std::vector<ReductionEvent>& events, double g_star,
                      double l_smooth, int n_coords, double s0, double rho);

// How far a square matrix is from the nearest signed permutation: the worst
// column's max(| |dominant| - 1 |, largest off-dominant magnitude). Returns
// the 1.0 sentinel when the column-wise dominant rows do not form a
// bijection.
double signed_permutation_deviation(const Eigen::MatrixXd& m);

}  // namespace booom
