#include "booom/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "booom/errors.hpp"

namespace booom {

namespace {

Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd g(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) g(i, j) = gauss(rng);
  }
  return g;
}

// Correlation matrix as the Gram matrix of unit-normalized Gaussian columns.
// The diagonal is pinned to exactly one; normalization already puts it there
// up to roundoff.
Eigen::MatrixXd random_correlation(int size, std::mt19937_64& rng) {
  Eigen::MatrixXd g = gaussian_matrix(size, size, rng);
  for (int j = 0; j < size; ++j) {
    const double norm = g.col(j).norm();
    if (norm <= 0.0) {
      throw NumericalError("random_correlation: degenerate Gaussian column");
    }
    g.col(j) /= norm;
  }
  Eigen::MatrixXd gram = g.transpose() * g;
  gram.diagonal().setOnes();
  return gram;
}

// Exactly symmetric product E diag(lambda) E^T: floating-point matrix
// multiplication does not commute entrywise, so the result is symmetrized
// by averaging with its transpose (averaging is entrywise commutative).
Eigen::MatrixXd symmetric_similarity(const Eigen::MatrixXd& e,
                                     const Eigen::VectorXd& lambda) {
  const Eigen::MatrixXd raw = e * lambda.asDiagonal() * e.transpose();
  return 0.5 * (raw + raw.transpose());
}

}  // namespace

/* ---------------------------------------------------------------------- */
/* Seeding                                                                 */
/* ---------------------------------------------------------------------- */

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replicate_index) {
  // The (replicate_index + 1)-th output of splitmix64 seeded at master_seed:
  // advance the state by that many golden-ratio increments and finalize.
  std::uint64_t z = master_seed + (replicate_index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

StiefelPoint random_rotation(int p, std::mt19937_64& rng) {
  Eigen::MatrixXd q = random_stiefel(p, p, rng).matrix();
  if (q.determinant() < 0.0) q.col(p - 1) *= -1.0;
  return StiefelPoint(std::move(q));
}

/* ---------------------------------------------------------------------- */
/* PSD families                                                            */
/* ---------------------------------------------------------------------- */

const char* to_string(PsdPattern pattern) {
  switch (pattern) {
    case PsdPattern::random: return "random";
    case PsdPattern::toeplitz: return "toeplitz";
    case PsdPattern::block_diag: return "blockdiag";
  }
  throw std::invalid_argument("to_string: unknown PSD pattern");
}

PsdPattern psd_pattern_from_string(const std::string& name) {
  if (name == "random") return PsdPattern::random;
  if (name == "toeplitz") return PsdPattern::toeplitz;
  if (name == "blockdiag") return PsdPattern::block_diag;
  throw std::invalid_argument("unknown PSD pattern '" + name +
                              "' (expected random, toeplitz, or blockdiag)");
}

Eigen::MatrixXd toeplitz_psd(int p, double rho) {
  if (p < 1) throw std::invalid_argument("toeplitz_psd: p must be >= 1");
  if (!std::isfinite(rho)) throw std::invalid_argument("toeplitz_psd: rho must be finite");
  Eigen::MatrixXd m(p, p);
  for (int j = 0; j < p; ++j) {
    for (int k = 0; k < p; ++k) m(j, k) = std::pow(rho, std::abs(j - k));
  }
  return m;
}

std::vector<Eigen::MatrixXd> gen_psd_set(PsdPattern pattern, int p, int d,
                                         std::mt19937_64& rng) {
  if (p < 2) throw std::invalid_argument("gen_psd_set: p must be >= 2");
  if (d < 1) throw std::invalid_argument("gen_psd_set: d must be >= 1");
  if (pattern == PsdPattern::block_diag && p < 5) {
    throw std::invalid_argument("gen_psd_set: blockdiag needs p >= 5 to form 5 blocks");
  }

  std::vector<Eigen::MatrixXd> ms;
  ms.reserve(static_cast<size_t>(d));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < d; ++i) {
    switch (pattern) {
      case PsdPattern::random: {
        const Eigen::MatrixXd a = gaussian_matrix(p, p, rng);
        ms.push_back(a.transpose() * a);
        break;
      }
      case PsdPattern::toeplitz: {
        ms.push_back(toeplitz_psd(p, unit(rng)));
        break;
      }
      case PsdPattern::block_diag: {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
        const int base = p / 5;
        const int extra = p % 5;  // first `extra` blocks get one more row
        int offset = 0;
        for (int b = 0; b < 5; ++b) {
          const int size = base + (b < extra ? 1 : 0);
          m.block(offset, offset, size, size) = random_correlation(size, rng);
          offset += size;
        }
        ms.push_back(std::move(m));
        break;
      }
    }
  }
  return ms;
}

/* ---------------------------------------------------------------------- */
/* Low rank plus sparse                                                    */
/* ---------------------------------------------------------------------- */

LowRankSparseInstance gen_lowrank_sparse(int n, int p, int d, std::mt19937_64& rng) {
  if (n < 1 || p < 1) throw std::invalid_argument("gen_lowrank_sparse: n and p must be >= 1");
  if (d < 1 || d > std::min(n, p)) {
    throw std::invalid_argument("gen_lowrank_sparse: d must satisfy 1 <= d <= min(n, p)");
  }

  const Eigen::MatrixXd a = gaussian_matrix(n, p, rng);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);

  Eigen::VectorXd dl(d);
  if (d == 1) {
    dl(0) = 2.0;
  } else {
    for (int k = 1; k <= d; ++k) {
      dl(k - 1) = 1.0 + static_cast<double>(d - k) / static_cast<double>(d - 1);
    }
  }

  LowRankSparseInstance inst;
  inst.l = svd.matrixU().leftCols(d) * dl.asDiagonal() * svd.matrixV().leftCols(d).transpose();

  std::bernoulli_distribution hit(0.2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd s_draw = Eigen::MatrixXd::Zero(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) {
      if (hit(rng)) s_draw(i, j) = std::tan(std::numbers::pi * (unit(rng) - 0.5));
    }
  }

  inst.x = inst.l + s_draw;
  // Re-derive the sparse part from the rounded sum so the decomposition
  // x = l + s holds without any floating-point residue: entries where the
  // draw was zero stay exactly zero, the rest move by at most one ulp.
  inst.s = inst.x - inst.l;
  return inst;
}

/* ---------------------------------------------------------------------- */
/* Independent component analysis                                          */
/* ---------------------------------------------------------------------- */

IcaInstance gen_ica(int p, int n, std::mt19937_64& rng) {
  if (p < 1) throw std::invalid_argument("gen_ica: p must be >= 1");
  if (n <= p) throw std::invalid_argument("gen_ica: n must exceed p (whitening is singular otherwise)");

  IcaInstance inst;
  inst.sources.resize(p, n);
  std::exponential_distribution<double> expo(1.0);
  std::chi_squared_distribution<double> chi3(3.0);
  std::normal_distribution<double> gauss;
  const double sqrt3 = std::sqrt(3.0);
  std::uniform_real_distribution<double> uni(-sqrt3, sqrt3);
  for (int i = 0; i < p; ++i) {
    switch (i % 3) {
      case 0:  // Laplace(0,1) as the difference of two unit exponentials
        for (int t = 0; t < n; ++t) inst.sources(i, t) = expo(rng) - expo(rng);
        break;
      case 1:  // Student-t with 3 degrees of freedom
        for (int t = 0; t < n; ++t) {
          inst.sources(i, t) = gauss(rng) / std::sqrt(chi3(rng) / 3.0);
        }
        break;
      default:  // Uniform[-sqrt(3), sqrt(3)]
        for (int t = 0; t < n; ++t) inst.sources(i, t) = uni(rng);
        break;
    }
    // Standardize empirically (population moments, 1/n throughout the module).
    Eigen::RowVectorXd row = inst.sources.row(i);
    row.array() -= row.mean();
    const double sd = std::sqrt(row.squaredNorm() / n);
    if (sd <= 0.0) throw NumericalError("gen_ica: degenerate source row");
    inst.sources.row(i) = row / sd;
  }

  Eigen::VectorXd s(p);
  for (int i = 0; i < p; ++i) {
    const double u = (p == 1) ? 0.0 : static_cast<double>(i) / static_cast<double>(p - 1);
    s(i) = std::pow(10.0, u);
  }
  const Eigen::MatrixXd uorth = random_stiefel(p, p, rng).matrix();
  const Eigen::MatrixXd vorth = random_stiefel(p, p, rng).matrix();
  inst.a = uorth * s.asDiagonal() * vorth.transpose();

  inst.x = inst.a * inst.sources;

  const Eigen::VectorXd row_means = inst.x.rowwise().mean();
  const Eigen::MatrixXd centered = inst.x.colwise() - row_means;
  const Eigen::MatrixXd cov = (centered * centered.transpose()) / static_cast<double>(n);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (cov + cov.transpose()));
  const Eigen::VectorXd lambda = eig.eigenvalues();  // ascending
  if (lambda(0) <= 1e-12 * std::max(lambda(p - 1), 1e-300)) {
    throw NumericalError("gen_ica: sample covariance is numerically singular");
  }
  inst.whitener = lambda.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  inst.xw = inst.whitener * centered;
  return inst;
}

/* ---------------------------------------------------------------------- */
/* Factor rotation                                                         */
/* ---------------------------------------------------------------------- */

VarimaxInstance gen_varimax(int n, int p, std::mt19937_64& rng) {
  if (p < 3) throw std::invalid_argument("gen_varimax: p must be >= 3 (two cross-loading factors)");
  if (n < 1) throw std::invalid_argument("gen_varimax: n must be >= 1");

  std::uniform_int_distribution<int> pick(0, p - 1);
  std::uniform_real_distribution<double> magnitude(0.8, 1.2);
  std::normal_distribution<double> gauss;
  std::normal_distribution<double> cross(0.0, 0.05);

  VarimaxInstance inst;
  // A column that no row touches cannot be normalized; redraw in that
  // (vanishingly rare for n >= p) case.
  for (int attempt = 0; attempt < 1000; ++attempt) {
    inst.b0 = Eigen::MatrixXd::Zero(n, p);
    for (int k = 0; k < n; ++k) {
      const int dominant = pick(rng);
      const double sign = gauss(rng) < 0.0 ? -1.0 : 1.0;
      inst.b0(k, dominant) = sign * magnitude(rng);
      // Two distinct extra factors, uniform without replacement.
      std::uniform_int_distribution<int> pick_other(0, p - 2);
      int first = pick_other(rng);
      if (first >= dominant) ++first;
      std::uniform_int_distribution<int> pick_last(0, p - 3);
      int second = pick_last(rng);
      for (int taken : {std::min(dominant, first), std::max(dominant, first)}) {
        if (second >= taken) ++second;
      }
      inst.b0(k, first) = cross(rng);
      inst.b0(k, second) = cross(rng);
    }
    const Eigen::VectorXd norms = inst.b0.colwise().norm();
    if (norms.minCoeff() > 0.0) {
      for (int j = 0; j < p; ++j) inst.b0.col(j) /= norms(j);
      inst.r_true = random_rotation(p, rng).matrix();
      inst.a = inst.b0 * inst.r_true.transpose();
      return inst;
    }
  }
  throw NumericalError("gen_varimax: could not populate every factor column");
}

/* ---------------------------------------------------------------------- */
/* Joint diagonalization                                                   */
/* ---------------------------------------------------------------------- */

Eigen::VectorXd ojd_base_profile(int p) {
  if (p < 2) throw std::invalid_argument("ojd_base_profile: p must be >= 2");
  Eigen::VectorXd base(p);
  for (int i = 0; i < p; ++i) {
    base(i) = 0.5 + (2.0 - 0.5) * static_cast<double>(i) / static_cast<double>(p - 1);
  }
  return base;
}

OjdInstance gen_ojd(int p, int m, double sigma, std::mt19937_64& rng) {
  if (p < 2) throw std::invalid_argument("gen_ojd: p must be >= 2");
  if (m < 1) throw std::invalid_argument("gen_ojd: m must be >= 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("gen_ojd: sigma must be >= 0");

  OjdInstance inst;
  inst.w_true = random_rotation(p, rng).matrix();
  const Eigen::VectorXd base = ojd_base_profile(p);
  std::normal_distribution<double> gauss;
  inst.cs.reserve(static_cast<size_t>(m));
  inst.ds.reserve(static_cast<size_t>(m));
  for (int k = 0; k < m; ++k) {
    Eigen::VectorXd dk(p);
    for (int i = 0; i < p; ++i) dk(i) = base(i) + 0.2 * gauss(rng);
    Eigen::MatrixXd ck = symmetric_similarity(inst.w_true, dk);
    if (sigma > 0.0) {
      const Eigen::MatrixXd g = gaussian_matrix(p, p, rng);
      ck += sigma * 0.5 * (g + g.transpose());
    }
    inst.cs.push_back(std::move(ck));
    inst.ds.push_back(std::move(dk));
  }
  return inst;
}

/* ---------------------------------------------------------------------- */
/* Synthetic symmetric operator                                            */
/* ---------------------------------------------------------------------- */

Eigen::MatrixXd gen_reduced_hamiltonian(int p, std::mt19937_64& rng,
                                        const std::optional<Eigen::VectorXd>& spectrum) {
  if (p < 2) throw std::invalid_argument("gen_reduced_hamiltonian: p must be >= 2");
  Eigen::VectorXd lambda;
  if (spectrum.has_value()) {
    if (spectrum->size() != p) {
      throw std::invalid_argument("gen_reduced_hamiltonian: spectrum length must equal p");
    }
    if (!spectrum->allFinite()) {
      throw std::invalid_argument("gen_reduced_hamiltonian: spectrum must be finite");
    }
    lambda = *spectrum;
  } else {
    // Log-like ramp from -1 to 10: a geometric grid on [1, 10] mapped
    // affinely, dense near the low end the way occupied levels sit below a
    // spread of virtual ones.
    lambda.resize(p);
    for (int i = 0; i < p; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(p - 1);
      lambda(i) = -1.0 + 11.0 * (std::pow(10.0, u) - 1.0) / 9.0;
    }
  }
  return symmetric_similarity(random_rotation(p, rng).matrix(), lambda);
}

/* ---------------------------------------------------------------------- */
/* Labeled two-class data                                                  */
/* ---------------------------------------------------------------------- */

TwoClassInstance gen_two_class(int n, int p, int d_signal, std::mt19937_64& rng) {
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("gen_two_class: n must be even and >= 4");
  if (p < 1) throw std::invalid_argument("gen_two_class: p must be >= 1");
  if (d_signal < 1 || d_signal > p) {
    throw std::invalid_argument("gen_two_class: d_signal must satisfy 1 <= d_signal <= p");
  }

  TwoClassInstance inst;
  inst.x = gaussian_matrix(n, p, rng);
  inst.y.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    inst.y[static_cast<size_t>(i)] = (i < n / 2) ? 0 : 1;
    if (i >= n / 2) {
      for (int j = 0; j < d_signal; ++j) inst.x(i, j) += 2.0;
    }
  }
  for (int j = 0; j < p; ++j) {
    Eigen::VectorXd col = inst.x.col(j);
    col.array() -= col.mean();
    const double sd = std::sqrt(col.squaredNorm() / n);
    if (sd <= 0.0) throw NumericalError("gen_two_class: degenerate data column");
    inst.x.col(j) = col / sd;
  }
  return inst;
}

}  // namespace booom
