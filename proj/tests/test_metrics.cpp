#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "booom/metrics.hpp"
#include "booom/objectives.hpp"
#include "booom/synthgen.hpp"

using namespace booom;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd random_symmetric(int p, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd g(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) g(i, j) = gauss(rng);
  }
  return 0.5 * (g + g.transpose());
}

// Directional derivative of tr(Q^T H Q) along the polar-retraction curve
// through Q in direction v, by central differences.
double directional_derivative(const Eigen::MatrixXd& h, const Eigen::MatrixXd& q,
                              const Eigen::MatrixXd& v, double step) {
  const auto value = [&](double t) {
    const Eigen::MatrixXd retracted = nearest_orthonormal(q + t * v);
    return (retracted.transpose() * h * retracted).trace();
  };
  return (value(step) - value(-step)) / (2.0 * step);
}

}  // namespace

/* ---------------------------------------------------------------------- */
/* Eigen ground truth                                                      */
/* ---------------------------------------------------------------------- */

TEST_CASE("eig_ground_truth on a diagonal matrix picks the two smallest levels") {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3, 3);
  h.diagonal() << 3, 1, 2;
  const EigGroundTruth gt = eig_ground_truth(h, 2);
  CHECK(std::abs(gt.value - 3.0) <= 1e-12);
  // The minimizing subspace is span(e2, e3): its projector is diag(0,1,1).
  const Eigen::MatrixXd projector = gt.q_star.matrix() * gt.q_star.matrix().transpose();
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
  expected(1, 1) = 1.0;
  expected(2, 2) = 1.0;
  CHECK((projector - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("eig_ground_truth is self-consistent with the trace objective") {
  std::mt19937_64 rng(3);
  const int p = 7, d = 3;
  const Eigen::MatrixXd h = random_symmetric(p, rng);
  const EigGroundTruth gt = eig_ground_truth(h, d);
  const RayleighRitz f(h, d);
  CHECK(std::abs(f.evaluate(gt.q_star) - gt.value) <= 1e-10);
  // The exact minimizer is first-order stationary.
  CHECK(kkt_residual(h, gt.q_star) <= 1e-9);
}

TEST_CASE("eig_ground_truth with d = p recovers the trace") {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd h = random_symmetric(6, rng);
  CHECK(std::abs(eig_ground_truth(h, 6).value - h.trace()) <= 1e-10);
}

TEST_CASE("eig_ground_truth argument validation") {
  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(3, 3);
  asym(0, 2) = 1e-4;
  CHECK_THROWS_AS(eig_ground_truth(asym, 1), std::invalid_argument);
  CHECK_THROWS_AS(eig_ground_truth(Eigen::MatrixXd::Identity(3, 3), 0), std::invalid_argument);
  CHECK_THROWS_AS(eig_ground_truth(Eigen::MatrixXd::Identity(3, 3), 4), std::invalid_argument);
}

/* ---------------------------------------------------------------------- */
/* Circle brute force                                                      */
/* ---------------------------------------------------------------------- */

TEST_CASE("circle_brute_force on a constant objective returns the constant") {
  const FunctionObjective f(2, 1, "const", [](const StiefelPoint&) { return 4.25; });
  const CircleMinimum out = circle_brute_force(f, 1000);
  CHECK(out.best_value == 4.25);
  CHECK(out.best_angle >= 0.0);
  CHECK(out.best_angle < 2.0 * kPi);
}

TEST_CASE("circle_brute_force finds the top eigendirection of a quadratic") {
  Eigen::MatrixXd m(2, 2);
  m << 2, 0, 0, 1;
  const HeteroQuadratic f({m});
  const CircleMinimum out = circle_brute_force(f, 100000);
  CHECK(std::abs(out.best_value - (-2.0)) <= 1e-6);
}

TEST_CASE("circle_brute_force agrees with the eigen oracle on the trace objective") {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
  h.diagonal() << 0, 5;
  const RayleighRitz f(h, 1);
  const CircleMinimum out = circle_brute_force(f, 100000);
  CHECK(std::abs(out.best_value - 0.0) <= 1e-6);
}

TEST_CASE("circle_brute_force covers the antipodal branch on odd grids") {
  // Linear objective: not symmetric under q -> -q, minimized at
  // -(1, 0.5)/|(1, 0.5)| with value -sqrt(1.25).
  const FunctionObjective f(2, 1, "linear", [](const StiefelPoint& q) {
    return q.matrix()(0, 0) + 0.5 * q.matrix()(1, 0);
  });
  const CircleMinimum out = circle_brute_force(f, 1001);
  CHECK(std::abs(out.best_value - (-std::sqrt(1.25))) <= 1e-4);
}

TEST_CASE("circle_brute_force on St(2,2) sees the full rotation group") {
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd h = random_symmetric(2, rng);
  const RayleighRitz f(h, 2);  // constant on rotations: tr(Q^T H Q) = tr(H)
  const CircleMinimum out = circle_brute_force(f, 1000);
  CHECK(std::abs(out.best_value - h.trace()) <= 1e-12);
}

TEST_CASE("circle_brute_force refines monotonically with resolution") {
  Eigen::MatrixXd m(2, 2);
  m << 2, 0, 0, 1;
  const HeteroQuadratic f({m});
  // Along the circle f(theta) = -1 - cos^2(theta), so |f'| <= 1.
  const double coarse = circle_brute_force(f, 1000).best_value;
  const double fine = circle_brute_force(f, 2000).best_value;
  CHECK(std::abs(coarse - fine) <= 1.0 * 2.0 * kPi / 1000.0);
  CHECK(fine <= coarse + 1e-15);
}

TEST_CASE("circle_brute_force argument validation") {
  const FunctionObjective wrong_p(3, 1, "f", [](const StiefelPoint&) { return 0.0; });
  CHECK_THROWS_AS(circle_brute_force(wrong_p, 1000), std::invalid_argument);
  const FunctionObjective ok(2, 1, "f", [](const StiefelPoint&) { return 0.0; });
  CHECK_THROWS_AS(circle_brute_force(ok, 999), std::invalid_argument);
}

/* ---------------------------------------------------------------------- */
/* Amari distance                                                          */
/* ---------------------------------------------------------------------- */

TEST_CASE("amari_distance vanishes at the exact inverse and scaled permutations") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd a(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) a(i, j) = gauss(rng);
  }
  const Eigen::MatrixXd a_inv = a.inverse();
  CHECK(amari_distance(a_inv, a) <= 1e-12);

  // W = Pi * D * A^{-1} makes the product a scaled permutation.
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(4, 4);
  pi(0, 2) = 1;
  pi(1, 0) = 1;
  pi(2, 3) = 1;
  pi(3, 1) = 1;
  Eigen::VectorXd scales(4);
  scales << 2.0, -0.5, 3.0, -1.25;
  CHECK(amari_distance(pi * scales.asDiagonal() * a_inv, a) <= 1e-12);
}

TEST_CASE("amari_distance of the all-ones product is exactly one") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 3, 4;  // invertible
  const Eigen::MatrixXd w_hat = Eigen::MatrixXd::Ones(2, 2) * a.inverse();
  CHECK(std::abs(amari_distance(w_hat, a) - 1.0) <= 1e-12);
}

TEST_CASE("amari_distance stays in [0, 1] and ignores global scale and sign flips") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> scale(0.1, 5.0);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::MatrixXd w(3, 3), a(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        w(i, j) = gauss(rng);
        a(i, j) = gauss(rng);
      }
    }
    if (std::abs(a.determinant()) < 1e-3) continue;
    const double d = amari_distance(w, a);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
    // Rescaling every row by one common factor cancels in both the row and
    // the column terms; per-row sign flips vanish under the absolute values.
    CHECK(std::abs(amari_distance(scale(rng) * w, a) - d) <= 1e-12);
    Eigen::VectorXd signs(3);
    signs << 1.0, -1.0, -1.0;
    CHECK(std::abs(amari_distance(signs.asDiagonal() * w, a) - d) <= 1e-12);
  }
}

TEST_CASE("amari_distance is zero for every row-rescaled perfect unmixer") {
  // The unmixing ambiguity of the source-separation model: any diagonal
  // rescaling and signed permutation of the exact inverse still scores zero.
  std::mt19937_64 rng(41);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd a(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) a(i, j) = gauss(rng);
  }
  const Eigen::MatrixXd a_inv = a.inverse();
  std::uniform_real_distribution<double> scale(0.1, 5.0);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd s(4);
    s << scale(rng), -scale(rng), scale(rng), -scale(rng);
    CHECK(amari_distance(s.asDiagonal() * a_inv, a) <= 1e-11);
  }
}

TEST_CASE("amari_distance rejects singular mixing") {
  Eigen::MatrixXd singular = Eigen::MatrixXd::Ones(3, 3);
  CHECK_THROWS_AS(amari_distance(Eigen::MatrixXd::Identity(3, 3), singular), NumericalError);
  CHECK_THROWS_AS(amari_distance(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(3, 3)),
                  std::invalid_argument);
}

/* ---------------------------------------------------------------------- */
/* Mean absolute error                                                     */
/* ---------------------------------------------------------------------- */

TEST_CASE("mean_absolute_error basics and naive-loop agreement") {
  const Eigen::MatrixXd l = Eigen::MatrixXd::Random(3, 3);
  CHECK(mean_absolute_error(l, l) == 0.0);
  const Eigen::MatrixXd shifted = l + Eigen::MatrixXd::Ones(3, 3);
  CHECK(std::abs(mean_absolute_error(shifted, l) - 1.0) <= 1e-15);

  std::mt19937_64 rng(19);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd a(3, 3), b(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      a(i, j) = gauss(rng);
      b(i, j) = gauss(rng);
    }
  }
  double naive = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) naive += std::abs(a(i, j) - b(i, j));
  }
  naive /= 9.0;
  CHECK(std::abs(mean_absolute_error(a, b) - naive) <= 1e-15);
  CHECK_THROWS_AS(mean_absolute_error(a, Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
}

/* ---------------------------------------------------------------------- */
/* KKT residual                                                            */
/* ---------------------------------------------------------------------- */

TEST_CASE("kkt_residual vanishes on invariant subspaces and identity operators") {
  std::mt19937_64 rng(23);
  const Eigen::MatrixXd h = random_symmetric(5, rng);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  CHECK(kkt_residual(h, StiefelPoint(eig.eigenvectors().leftCols(2))) <= 1e-10);
  // Any subset of eigenvectors spans an invariant subspace, not only the
  // minimizing one.
  Eigen::MatrixXd mixed(5, 2);
  mixed.col(0) = eig.eigenvectors().col(4);
  mixed.col(1) = eig.eigenvectors().col(1);
  CHECK(kkt_residual(h, StiefelPoint(mixed)) <= 1e-10);

  for (int rep = 0; rep < 10; ++rep) {
    const StiefelPoint q = random_stiefel(5, 2, rng);
    CHECK(kkt_residual(Eigen::MatrixXd::Identity(5, 5), q) <= 1e-13);
  }
}

TEST_CASE("kkt_residual matches a finite-difference tangent-gradient reconstruction") {
  std::mt19937_64 rng(29);
  const int p = 5, d = 2;
  const Eigen::MatrixXd h = random_symmetric(p, rng);
  const StiefelPoint q = random_stiefel(p, d, rng);

  // Orthonormal tangent basis at Q: Q * (skew pair basis) and Qperp * E_ab.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(q.matrix());
  const Eigen::MatrixXd full = qr.householderQ();
  const Eigen::MatrixXd qperp = full.rightCols(p - d);

  std::vector<Eigen::MatrixXd> basis;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      Eigen::MatrixXd skew = Eigen::MatrixXd::Zero(d, d);
      skew(i, j) = 1.0 / std::sqrt(2.0);
      skew(j, i) = -1.0 / std::sqrt(2.0);
      basis.push_back(q.matrix() * skew);
    }
  }
  for (int a = 0; a < p - d; ++a) {
    for (int b = 0; b < d; ++b) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(p - d, d);
      e(a, b) = 1.0;
      basis.push_back(qperp * e);
    }
  }
  REQUIRE(static_cast<int>(basis.size()) == d * (d - 1) / 2 + (p - d) * d);

  double norm_sq = 0.0;
  for (const Eigen::MatrixXd& v : basis) {
    const double coeff = directional_derivative(h, q.matrix(), v, 1e-5);
    norm_sq += coeff * coeff;
  }
  CHECK(std::abs(std::sqrt(norm_sq) - kkt_residual(h, q)) <= 1e-5);
}

TEST_CASE("kkt_residual argument validation") {
  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(3, 3);
  asym(1, 0) = 0.5;
  std::mt19937_64 rng(31);
  const StiefelPoint q = random_stiefel(3, 1, rng);
  CHECK_THROWS_AS(kkt_residual(asym, q), std::invalid_argument);
  CHECK_THROWS_AS(kkt_residual(Eigen::MatrixXd::Identity(4, 4), q), std::invalid_argument);
}

/* ---------------------------------------------------------------------- */
/* Rate bound                                                              */
/* ---------------------------------------------------------------------- */

TEST_CASE("rate_bound_check basics") {
  CHECK(rate_bound_check({}, 0.0, 2.0, 10, kPi, 2.0));

  const double scale = 2.0 * 10 * kPi * kPi / (8.0 * 3.0);  // bound at k = 0
  ReductionEvent inside{0, scale * 0.99, Eigen::VectorXd::Zero(1)};
  CHECK(rate_bound_check({inside}, 0.0, 2.0, 10, kPi, 2.0));
  ReductionEvent outside{0, scale + 1.0, Eigen::VectorXd::Zero(1)};
  CHECK_FALSE(rate_bound_check({outside}, 0.0, 2.0, 10, kPi, 2.0));
}

TEST_CASE("rate_bound_check holds along an actual pattern-search trajectory") {
  const int n = 10;
  const Eigen::VectorXd lower = Eigen::VectorXd::Constant(n, -kPi);
  const Eigen::VectorXd upper = Eigen::VectorXd::Constant(n, kPi);
  const Eigen::VectorXd start = Eigen::VectorXd::Constant(n, kPi);
  const auto g = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  const BoxRmpsResult out = box_rmps(g, lower, upper, start, BoxRmpsConfig{});
  REQUIRE(!out.events.empty());
  CHECK(rate_bound_check(out.events, 0.0, 2.0, n, kPi, 2.0));
}

/* ---------------------------------------------------------------------- */
/* Signed permutation deviation                                            */
/* ---------------------------------------------------------------------- */

TEST_CASE("signed_permutation_deviation on exact and perturbed permutations") {
  CHECK(signed_permutation_deviation(Eigen::MatrixXd::Identity(4, 4)) == 0.0);

  Eigen::MatrixXd signed_perm = Eigen::MatrixXd::Zero(3, 3);
  signed_perm(0, 1) = -1.0;
  signed_perm(1, 2) = 1.0;
  signed_perm(2, 0) = -1.0;
  CHECK(signed_permutation_deviation(signed_perm) == 0.0);

  Eigen::MatrixXd wobbly = signed_perm;
  wobbly(0, 0) = 0.004;   // off-dominant leak
  wobbly(1, 2) = 0.9975;  // dominant magnitude drift of 0.0025
  const double dev = signed_permutation_deviation(wobbly);
  CHECK(dev >= 0.004 - 1e-15);
  CHECK(dev <= 0.005);
}

TEST_CASE("signed_permutation_deviation flags non-bijective dominance") {
  Eigen::MatrixXd clash = Eigen::MatrixXd::Zero(3, 3);
  clash(0, 0) = 1.0;
  clash(0, 1) = 0.9;  // both columns dominated by row 0
  clash(2, 2) = 1.0;
  CHECK(signed_permutation_deviation(clash) == 1.0);
  CHECK_THROWS_AS(signed_permutation_deviation(Eigen::MatrixXd::Zero(2, 3)),
                  std::invalid_argument);
}

TEST_CASE("signed_permutation_deviation is small exactly when amari distance is") {
  std::mt19937_64 rng(37);
  // A rotation close to a signed permutation scores small on both indices.
  Eigen::MatrixXd near_perm = Eigen::MatrixXd::Zero(3, 3);
  near_perm(0, 2) = 1.0;
  near_perm(1, 0) = -1.0;
  near_perm(2, 1) = 1.0;
  const GivensMove nudge{1, 2, 0.01};
  const Eigen::MatrixXd nudged = givens_apply(StiefelPoint(near_perm), nudge).matrix();
  CHECK(signed_permutation_deviation(nudged) <= 2e-2);
  CHECK(amari_distance(nudged, Eigen::MatrixXd::Identity(3, 3)) <= 2e-2);
}
