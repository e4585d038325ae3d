#include "booom/metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "booom/errors.hpp"

namespace booom {

namespace {

void require_symmetric(const Eigen::MatrixXd& h, const char* who) {
  if (h.rows() != h.cols() || h.rows() < 1) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
  }
  if (!h.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": matrix must be finite");
  }
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-8) {
    throw std::invalid_argument(std::string(who) + ": matrix must be symmetric");
  }
}

}  // namespace

/* ---------------------------------------------------------------------- */
/* Ground-truth oracles                                                    */
/* ---------------------------------------------------------------------- */

EigGroundTruth eig_ground_truth(const Eigen::MatrixXd& h, int d) {
  require_symmetric(h, "eig_ground_truth");
  const int p = static_cast<int>(h.rows());
  if (d < 1 || d > p) {
    throw std::invalid_argument("eig_ground_truth: d must satisfy 1 <= d <= p");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (h + h.transpose()));
  if (eig.info() != Eigen::Success) {
    throw NumericalError("eig_ground_truth: eigendecomposition failed");
  }
  // Eigenvalues come back ascending, so the leading block is the minimizer.
  return EigGroundTruth{eig.eigenvalues().head(d).sum(),
                        StiefelPoint(eig.eigenvectors().leftCols(d))};
}

CircleMinimum circle_brute_force(const Objective& objective, int resolution) {
  if (objective.rows() != 2) {
    throw std::invalid_argument("circle_brute_force: objective must live on St(2,1) or St(2,2)");
  }
  const int d = objective.cols();
  if (d != 1 && d != 2) {
    throw std::invalid_argument("circle_brute_force: objective must live on St(2,1) or St(2,2)");
  }
  if (resolution < 1000) {
    throw std::invalid_argument("circle_brute_force: resolution must be >= 1000");
  }

  constexpr double two_pi = 2.0 * std::numbers::pi;
  double best_value = std::numeric_limits<double>::infinity();
  double best_angle = 0.0;
  for (int t = 0; t < resolution; ++t) {
    const double theta = two_pi * t / resolution;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Eigen::MatrixXd q(2, d);
    q(0, 0) = c;
    q(1, 0) = s;
    if (d == 2) {
      q(0, 1) = -s;
      q(1, 1) = c;
    }
    const double value = objective.evaluate(StiefelPoint(q));
    if (value < best_value) {
      best_value = value;
      best_angle = theta;
    }
    if (d == 1) {
      // Antipodal branch; on odd grids these are not rotations already seen.
      const double flipped = objective.evaluate(StiefelPoint(-q));
      if (flipped < best_value) {
        best_value = flipped;
        best_angle = theta < std::numbers::pi ? theta + std::numbers::pi
                                              : theta - std::numbers::pi;
      }
    }
  }
  return CircleMinimum{best_value, best_angle};
}

/* ---------------------------------------------------------------------- */
/* Distances and residuals                                                 */
/* ---------------------------------------------------------------------- */

double amari_distance(const Eigen::MatrixXd& w_hat, const Eigen::MatrixXd& a) {
  const int p = static_cast<int>(a.rows());
  if (a.cols() != p || p < 1) {
    throw std::invalid_argument("amari_distance: mixing matrix must be square");
  }
  if (w_hat.rows() != p || w_hat.cols() != p) {
    throw std::invalid_argument("amari_distance: shapes must agree");
  }
  if (!w_hat.allFinite() || !a.allFinite()) {
    throw std::invalid_argument("amari_distance: inputs must be finite");
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) {
    throw NumericalError("amari_distance: mixing matrix is singular");
  }
  if (p == 1) return 0.0;  // a nonzero scalar is a scaled permutation

  const Eigen::MatrixXd abs_p = (w_hat * a).cwiseAbs();
  double rows = 0.0, cols = 0.0;
  for (int i = 0; i < p; ++i) {
    const double mx = abs_p.row(i).maxCoeff();
    if (mx <= 0.0) throw NumericalError("amari_distance: zero row in the product");
    rows += (abs_p.row(i).sum() / mx - 1.0) / (p - 1);
  }
  for (int j = 0; j < p; ++j) {
    const double mx = abs_p.col(j).maxCoeff();
    if (mx <= 0.0) throw NumericalError("amari_distance: zero column in the product");
    cols += (abs_p.col(j).sum() / mx - 1.0) / (p - 1);
  }
  return (rows + cols) / (2.0 * p);
}

double mean_absolute_error(const Eigen::MatrixXd& l_hat, const Eigen::MatrixXd& l) {
  if (l_hat.rows() != l.rows() || l_hat.cols() != l.cols()) {
    throw std::invalid_argument("mean_absolute_error: shapes must agree");
  }
  if (l.size() == 0) {
    throw std::invalid_argument("mean_absolute_error: matrices must be nonempty");
  }
  return (l_hat - l).cwiseAbs().sum() / static_cast<double>(l.size());
}

double kkt_residual(const Eigen::MatrixXd& h, const StiefelPoint& q) {
  require_symmetric(h, "kkt_residual");
  if (q.rows() != h.rows()) {
    throw std::invalid_argument("kkt_residual: point rows must match the matrix size");
  }
  const Eigen::MatrixXd g = 2.0 * (h * q.matrix());
  const Eigen::MatrixXd qtg = q.matrix().transpose() * g;
  const Eigen::MatrixXd sym = 0.5 * (qtg + qtg.transpose());
  return (g - q.matrix() * sym).norm();
}

bool rate_bound_check(const std::vector<ReductionEvent>& events, double g_star,
                      double l_smooth, int n_coords, double s0, double rho) {
  const double scale =
      l_smooth * static_cast<double>(n_coords) * s0 * s0 / (8.0 * (rho * rho - 1.0));
  for (const ReductionEvent& event : events) {
    const double bound = scale / (static_cast<double>(event.k) + 1.0);
    if (event.g_value - g_star > bound + 1e-12) return false;
  }
  return true;
}

double signed_permutation_deviation(const Eigen::MatrixXd& m) {
  const int p = static_cast<int>(m.rows());
  if (m.cols() != p || p < 1) {
    throw std::invalid_argument("signed_permutation_deviation: matrix must be square");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("signed_permutation_deviation: matrix must be finite");
  }
  std::vector<bool> row_taken(static_cast<size_t>(p), false);
  double worst = 0.0;
  for (int j = 0; j < p; ++j) {
    int dominant = 0;
    m.col(j).cwiseAbs().maxCoeff(&dominant);
    if (row_taken[static_cast<size_t>(dominant)]) return 1.0;
    row_taken[static_cast<size_t>(dominant)] = true;
    double column_dev = std::abs(std::abs(m(dominant, j)) - 1.0);
    for (int i = 0; i < p; ++i) {
      if (i != dominant) column_dev = std::max(column_dev, std::abs(m(i, j)));
    }
    worst = std::max(worst, column_dev);
  }
  return worst;
}

}  // namespace booom
