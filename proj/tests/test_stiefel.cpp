#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "booom/stiefel.hpp"

using namespace booom;

namespace {

constexpr double kPi = std::numbers::pi;

// Dense oracle for a plane rotation: the full p-by-p matrix, built entry by
// entry, for comparison against the O(d) row kernel.
Eigen::MatrixXd dense_rotation(int p, int i, int j, double theta) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(p, p);
  r(i - 1, i - 1) = std::cos(theta);
  r(i - 1, j - 1) = -std::sin(theta);
  r(j - 1, i - 1) = std::sin(theta);
  r(j - 1, j - 1) = std::cos(theta);
  return r;
}

Eigen::MatrixXd random_rotation_matrix(int p, std::mt19937_64& rng) {
  Eigen::MatrixXd u = random_stiefel(p, p, rng).matrix();
  if (u.determinant() < 0.0) u.col(p - 1) = -u.col(p - 1);
  return u;
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

/* ---------------------------------------------------------------------- */

TEST_CASE("plane_count matches C(p,2)") {
  CHECK(plane_count(1) == 0);
  CHECK(plane_count(2) == 1);
  CHECK(plane_count(4) == 6);
  CHECK(plane_count(20) == 190);
  CHECK_THROWS_AS(plane_count(0), std::invalid_argument);
}

TEST_CASE("pair_index frozen examples") {
  CHECK(pair_index(1, 4) == std::pair<int, int>(1, 2));
  CHECK(pair_index(2, 4) == std::pair<int, int>(1, 3));
  CHECK(pair_index(6, 4) == std::pair<int, int>(3, 4));
}

TEST_CASE("pair_index enumerates every plane exactly once, in order") {
  for (int p : {2, 3, 4, 5, 6, 8}) {
    const int n = plane_count(p);
    std::set<std::pair<int, int>> seen;
    std::pair<int, int> prev{0, 0};
    for (int k = 1; k <= n; ++k) {
      const auto ij = pair_index(k, p);
      CHECK(ij.first >= 1);
      CHECK(ij.first < ij.second);
      CHECK(ij.second <= p);
      CHECK(ij > prev);  // lexicographic order is strictly increasing
      prev = ij;
      seen.insert(ij);
    }
    CHECK(static_cast<int>(seen.size()) == n);
    CHECK_THROWS_AS(pair_index(0, p), std::invalid_argument);
    CHECK_THROWS_AS(pair_index(n + 1, p), std::invalid_argument);
  }
}

/* ---------------------------------------------------------------------- */

TEST_CASE("StiefelPoint validates shape and finiteness") {
  CHECK_NOTHROW(StiefelPoint(Eigen::MatrixXd::Identity(3, 3)));
  CHECK_NOTHROW(StiefelPoint(Eigen::MatrixXd::Identity(5, 2)));
  CHECK_THROWS_AS(StiefelPoint(Eigen::MatrixXd::Identity(2, 5)), std::invalid_argument);
  CHECK_THROWS_AS(StiefelPoint(Eigen::MatrixXd(3, 0)), std::invalid_argument);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS((void)StiefelPoint(bad), std::invalid_argument);
}

TEST_CASE("givens_apply: quarter turn on I2") {
  const StiefelPoint q(Eigen::MatrixXd::Identity(2, 2));
  const StiefelPoint r = givens_apply(q, {1, 2, kPi / 2});
  Eigen::MatrixXd expect(2, 2);
  expect << 0, -1, 1, 0;
  CHECK(max_abs_diff(r.matrix(), expect) <= 1e-15);
}

TEST_CASE("givens_apply: zero angle is a bitwise no-op") {
  std::mt19937_64 rng(7);
  const StiefelPoint q = random_stiefel(6, 3, rng);
  const StiefelPoint r = givens_apply(q, {2, 5, 0.0});
  CHECK(q.matrix() == r.matrix());
}

TEST_CASE("givens_apply matches the dense-rotation oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int rep = 0; rep < 50; ++rep) {
    const int p = 2 + static_cast<int>(rng() % 7);
    const int d = 1 + static_cast<int>(rng() % p);
    const StiefelPoint q = random_stiefel(p, d, rng);
    const int k = 1 + static_cast<int>(rng() % plane_count(p));
    const auto [i, j] = pair_index(k, p);
    const double theta = angle(rng);
    const StiefelPoint fast = givens_apply(q, {i, j, theta});
    const Eigen::MatrixXd slow = dense_rotation(p, i, j, theta) * q.matrix();
    CHECK(max_abs_diff(fast.matrix(), slow) <= 1e-14);
  }
}

TEST_CASE("givens_apply leaves untouched rows bitwise identical") {
  std::mt19937_64 rng(13);
  const StiefelPoint q = random_stiefel(7, 4, rng);
  const StiefelPoint r = givens_apply(q, {2, 6, 0.8371});
  for (int row : {0, 2, 3, 4, 6}) {
    CHECK(q.matrix().row(row) == r.matrix().row(row));
  }
}

TEST_CASE("givens_apply: rotation and its inverse cancel") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int rep = 0; rep < 20; ++rep) {
    const StiefelPoint q = random_stiefel(5, 3, rng);
    const int k = 1 + static_cast<int>(rng() % plane_count(5));
    const auto [i, j] = pair_index(k, 5);
    const double theta = angle(rng);
    const StiefelPoint back = givens_apply(givens_apply(q, {i, j, theta}), {i, j, -theta});
    CHECK(max_abs_diff(q.matrix(), back.matrix()) <= 1e-13);
  }
}

TEST_CASE("givens_apply: rotations in disjoint planes commute") {
  std::mt19937_64 rng(19);
  const StiefelPoint q = random_stiefel(6, 6, rng);
  const StiefelPoint ab = givens_apply(givens_apply(q, {1, 2, 0.61}), {3, 4, -1.2});
  const StiefelPoint ba = givens_apply(givens_apply(q, {3, 4, -1.2}), {1, 2, 0.61});
  CHECK(max_abs_diff(ab.matrix(), ba.matrix()) <= 1e-13);
}

TEST_CASE("givens_apply adds at most 1e-13 feasibility drift") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int rep = 0; rep < 30; ++rep) {
    const int p = 2 + static_cast<int>(rng() % 15);
    const int d = 1 + static_cast<int>(rng() % p);
    StiefelPoint q = random_stiefel(p, d, rng);
    const double before = orthonormality_error(q);
    const int k = 1 + static_cast<int>(rng() % plane_count(p));
    const auto [i, j] = pair_index(k, p);
    q = givens_apply(q, {i, j, angle(rng)});
    CHECK(orthonormality_error(q) <= before + 1e-13);
  }
}

TEST_CASE("givens_apply rejects malformed moves") {
  const StiefelPoint q(Eigen::MatrixXd::Identity(4, 2));
  CHECK_THROWS_AS(givens_apply(q, {2, 2, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(givens_apply(q, {3, 1, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(givens_apply(q, {1, 5, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(givens_apply(q, {0, 2, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(givens_apply(q, {1, 2, std::nan("")}), std::invalid_argument);
}

/* ---------------------------------------------------------------------- */

TEST_CASE("random_stiefel is feasible and deterministic in the seed") {
  for (auto [p, d] : {std::pair{1, 1}, {5, 3}, {20, 10}, {20, 20}}) {
    std::mt19937_64 a(42), b(42), c(43);
    const StiefelPoint qa = random_stiefel(p, d, a);
    const StiefelPoint qb = random_stiefel(p, d, b);
    const StiefelPoint qc = random_stiefel(p, d, c);
    CHECK(orthonormality_error(qa) <= 1e-12);
    CHECK(qa.matrix() == qb.matrix());
    if (p > 1) CHECK(qa.matrix() != qc.matrix());
  }
}

TEST_CASE("random_stiefel on St(1,1) returns +-1 and both signs occur") {
  bool pos = false, neg = false;
  for (std::uint64_t seed = 0; seed < 32; ++seed) {
    std::mt19937_64 rng(seed);
    const double v = random_stiefel(1, 1, rng).matrix()(0, 0);
    CHECK(std::abs(std::abs(v) - 1.0) <= 1e-15);
    (v > 0 ? pos : neg) = true;
  }
  CHECK(pos);
  CHECK(neg);
}

TEST_CASE("random_stiefel rejects d > p") {
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(random_stiefel(2, 3, rng), std::invalid_argument);
}

TEST_CASE("orthonormality_error frozen values") {
  CHECK(orthonormality_error(StiefelPoint(Eigen::MatrixXd::Identity(3, 3))) == 0.0);
  // 2*I3: Gram is 4*I, error ||3*I||_F = 3*sqrt(3).
  const StiefelPoint scaled(2.0 * Eigen::MatrixXd::Identity(3, 3));
  CHECK(orthonormality_error(scaled) == doctest::Approx(3.0 * std::sqrt(3.0)).epsilon(1e-12));
}

/* ---------------------------------------------------------------------- */

TEST_CASE("reorthonormalize: exact input comes back essentially unchanged") {
  std::mt19937_64 rng(29);
  const StiefelPoint q = random_stiefel(8, 3, rng);
  const StiefelPoint r = reorthonormalize(q);
  CHECK(max_abs_diff(q.matrix(), r.matrix()) <= 1e-14);
}

TEST_CASE("reorthonormalize: near-feasible input moves at most 1e-10") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss(0.0, 1.0);
  StiefelPoint q = random_stiefel(10, 4, rng);
  Eigen::MatrixXd noisy = q.matrix();
  for (Eigen::Index r = 0; r < noisy.rows(); ++r) {
    for (Eigen::Index c = 0; c < noisy.cols(); ++c) noisy(r, c) += 1e-14 * gauss(rng);
  }
  const StiefelPoint in(noisy);
  REQUIRE(orthonormality_error(in) <= 1e-12);
  const StiefelPoint out = reorthonormalize(in);
  CHECK(orthonormality_error(out) <= 1e-14);
  CHECK(max_abs_diff(in.matrix(), out.matrix()) <= 1e-10);
}

TEST_CASE("reorthonormalize repairs 1e-9 drift to machine precision") {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> gauss(0.0, 1.0);
  StiefelPoint q = random_stiefel(12, 5, rng);
  Eigen::MatrixXd noisy = q.matrix();
  for (Eigen::Index r = 0; r < noisy.rows(); ++r) {
    for (Eigen::Index c = 0; c < noisy.cols(); ++c) noisy(r, c) += 1e-9 * gauss(rng);
  }
  const StiefelPoint out = reorthonormalize(StiefelPoint(noisy));
  CHECK(orthonormality_error(out) <= 1e-14);
}

TEST_CASE("reorthonormalize rejects rank-deficient input") {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(4, 2);
  CHECK_THROWS_AS(reorthonormalize(StiefelPoint(z)), NumericalError);
  Eigen::MatrixXd dup(4, 2);
  dup.col(0) = Eigen::Vector4d(1, 0, 0, 0);
  dup.col(1) = dup.col(0);
  CHECK_THROWS_AS(reorthonormalize(StiefelPoint(dup)), NumericalError);
}

/* ---------------------------------------------------------------------- */

TEST_CASE("nearest_orthonormal frozen examples") {
  const Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
  CHECK(max_abs_diff(nearest_orthonormal(3.0 * i2), i2) <= 1e-12);
  std::mt19937_64 rng(41);
  const Eigen::MatrixXd q = random_stiefel(6, 2, rng).matrix();
  CHECK(max_abs_diff(nearest_orthonormal(q), q) <= 1e-12);
}

TEST_CASE("nearest_orthonormal minimizes Frobenius distance") {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(4, 2);
  for (Eigen::Index r = 0; r < 4; ++r) {
    for (Eigen::Index c = 0; c < 2; ++c) a(r, c) = gauss(rng);
  }
  const Eigen::MatrixXd best = nearest_orthonormal(a);
  const double d_best = (a - best).norm();
  CHECK(orthonormality_error(StiefelPoint(best)) <= 1e-12);
  for (int rep = 0; rep < 1000; ++rep) {
    const Eigen::MatrixXd sample = random_stiefel(4, 2, rng).matrix();
    CHECK(d_best <= (a - sample).norm() + 1e-12);
  }
}

TEST_CASE("nearest_orthonormal is idempotent") {
  std::mt19937_64 rng(47);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(5, 3);
  for (Eigen::Index r = 0; r < 5; ++r) {
    for (Eigen::Index c = 0; c < 3; ++c) a(r, c) = gauss(rng);
  }
  const Eigen::MatrixXd once = nearest_orthonormal(a);
  const Eigen::MatrixXd twice = nearest_orthonormal(once);
  CHECK(max_abs_diff(once, twice) <= 1e-12);
}

TEST_CASE("nearest_orthonormal rejects rank-deficient input") {
  Eigen::MatrixXd dup(4, 2);
  dup.col(0) = Eigen::Vector4d(1, 2, 3, 4);
  dup.col(1) = 2.0 * dup.col(0);
  CHECK_THROWS_AS(nearest_orthonormal(dup), NumericalError);
}

/* ---------------------------------------------------------------------- */

TEST_CASE("wrap_angle lands in (-pi, pi] and preserves the direction") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(std::abs(wrap_angle(2.0 * kPi)) <= 1e-15);
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> wide(-50.0, 50.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double t = wide(rng);
    const double w = wrap_angle(t);
    CHECK(w > -kPi);
    CHECK(w <= kPi);
    CHECK(std::abs(std::cos(w) - std::cos(t)) <= 1e-12);
    CHECK(std::abs(std::sin(w) - std::sin(t)) <= 1e-12);
  }
}

/* ---------------------------------------------------------------------- */

TEST_CASE("givens_decompose: identity gives all-zero angles") {
  const AngleVector angles = givens_decompose(Eigen::MatrixXd::Identity(4, 4));
  REQUIRE(static_cast<int>(angles.size()) == plane_count(4));
  for (double t : angles) CHECK(t == 0.0);
}

TEST_CASE("givens_decompose: p=2 recovers the rotation angle") {
  for (double theta : {0.7, 3.0, -2.5}) {
    const Eigen::MatrixXd u = dense_rotation(2, 1, 2, theta);
    const AngleVector angles = givens_decompose(u);
    REQUIRE(angles.size() == 1);
    CHECK(angles[0] == doctest::Approx(theta).epsilon(1e-13));
  }
  // An angle outside (-pi, pi] comes back wrapped.
  const AngleVector wrapped = givens_decompose(dense_rotation(2, 1, 2, 3.5));
  REQUIRE(wrapped.size() == 1);
  CHECK(wrapped[0] == doctest::Approx(3.5 - 2.0 * kPi).epsilon(1e-13));
}

TEST_CASE("givens_decompose / givens_compose round trip") {
  std::mt19937_64 rng(59);
  for (int p : {2, 3, 5, 8}) {
    for (int rep = 0; rep < 10; ++rep) {
      const Eigen::MatrixXd u = random_rotation_matrix(p, rng);
      const AngleVector angles = givens_decompose(u);
      REQUIRE(static_cast<int>(angles.size()) == plane_count(p));
      for (double t : angles) {
        CHECK(t > -kPi);
        CHECK(t <= kPi);
      }
      const StiefelPoint rebuilt =
          givens_compose(angles, StiefelPoint(Eigen::MatrixXd::Identity(p, p)));
      CHECK(max_abs_diff(rebuilt.matrix(), u) <= 1e-10);
    }
  }
}

TEST_CASE("givens_decompose rejects reflections and non-orthogonal input") {
  Eigen::MatrixXd refl = Eigen::MatrixXd::Identity(3, 3);
  refl(2, 2) = -1.0;
  CHECK_THROWS_AS(givens_decompose(refl), ReflectionError);
  CHECK_THROWS_AS(givens_decompose(2.0 * Eigen::MatrixXd::Identity(3, 3)), FeasibilityError);
  CHECK_THROWS_AS(givens_decompose(Eigen::MatrixXd::Identity(3, 2)), std::invalid_argument);
}

/* ---------------------------------------------------------------------- */

TEST_CASE("givens_compose: zero angles reproduce q0 bitwise") {
  std::mt19937_64 rng(61);
  const StiefelPoint q0 = random_stiefel(5, 5, rng);
  const AngleVector zeros(static_cast<size_t>(plane_count(5)), 0.0);
  CHECK(givens_compose(zeros, q0).matrix() == q0.matrix());
}

TEST_CASE("givens_compose: quarter turn on I2") {
  const StiefelPoint q0(Eigen::MatrixXd::Identity(2, 2));
  const StiefelPoint r = givens_compose({kPi / 2}, q0);
  Eigen::MatrixXd expect(2, 2);
  expect << 0, -1, 1, 0;
  CHECK(max_abs_diff(r.matrix(), expect) <= 1e-15);
}

TEST_CASE("givens_compose matches the ordered dense-product oracle") {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  const int p = 4;
  const int n = plane_count(p);
  for (int rep = 0; rep < 10; ++rep) {
    AngleVector angles(static_cast<size_t>(n));
    for (double& t : angles) t = angle(rng);
    const StiefelPoint q0 = random_stiefel(p, 2, rng);
    // Product with the pair_index(1) factor leftmost.
    Eigen::MatrixXd product = Eigen::MatrixXd::Identity(p, p);
    for (int k = 1; k <= n; ++k) {
      const auto [i, j] = pair_index(k, p);
      product = product * dense_rotation(p, i, j, angles[static_cast<size_t>(k - 1)]);
    }
    const StiefelPoint composed = givens_compose(angles, q0);
    CHECK(max_abs_diff(composed.matrix(), product * q0.matrix()) <= 1e-13);
    CHECK(orthonormality_error(composed) <= 1e-12);
  }
}

TEST_CASE("givens_compose rejects wrong-length angle vectors") {
  const StiefelPoint q0(Eigen::MatrixXd::Identity(3, 3));
  CHECK_THROWS_AS(givens_compose({0.1, 0.2}, q0), std::invalid_argument);
  CHECK_THROWS_AS(givens_compose({0.1, 0.2, std::nan("")}, q0), std::invalid_argument);
}
