#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "booom/stiefel.hpp"

namespace booom {

/* ---------------------------------------------------------------------- */
/* Seeding                                                                 */
/* ---------------------------------------------------------------------- */

// Stable hash of (master_seed, replicate_index) used to give every replicate
// its own independent generator stream. The mixing function is splitmix64,
// applied to the master seed and then advanced by the replicate index, so the
// mapping is a pure function of its two arguments and identical on every
// platform.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t replicate_index);

// Uniformly random rotation (orthogonal with determinant +1): a Haar
// orthogonal draw with the last column negated when the determinant is -1.
StiefelPoint random_rotation(int p, std::mt19937_64& rng);

/* ---------------------------------------------------------------------- */
/* Positive semidefinite matrix families                                   */
/* ---------------------------------------------------------------------- */

enum class PsdPattern { random, toeplitz, block_diag };

const char* to_string(PsdPattern pattern);
PsdPattern psd_pattern_from_string(const std::string& name);

// Toeplitz correlation matrix with entries rho^|j-k|.
Eigen::MatrixXd toeplitz_psd(int p, double rho);

// A list of d PSD matrices of size p x p:
//   random     -> A^T A with A standard Gaussian,
//   toeplitz   -> rho^|j-k| with rho ~ Uniform(0,1) drawn per matrix,
//   block_diag -> five near-equal diagonal blocks, each a random correlation
//                 matrix (Gram matrix of unit-normalized Gaussian columns);
//                 requires p >= 5.
std::vector<Eigen::MatrixXd> gen_psd_set(PsdPattern pattern, int p, int d,
                                         std::mt19937_64& rng);

/* ---------------------------------------------------------------------- */
/* Low rank plus sparse                                                    */
/* ---------------------------------------------------------------------- */

struct LowRankSparseInstance {
  Eigen::MatrixXd x;  // observed matrix, exactly l + s
  Eigen::MatrixXd l;  // rank-d component with singular values 2 down to 1
  Eigen::MatrixXd s;  // sparse Cauchy outliers (density 0.2)
};

LowRankSparseInstance gen_lowrank_sparse(int n, int p, int d, std::mt19937_64& rng);

/* ---------------------------------------------------------------------- */
/* Independent component analysis                                          */
/* ---------------------------------------------------------------------- */

struct IcaInstance {
  Eigen::MatrixXd x;         // observed p x n data, a * sources
  Eigen::MatrixXd a;         // p x p mixing matrix, condition number 10
  Eigen::MatrixXd sources;   // p x n standardized non-Gaussian sources
  Eigen::MatrixXd xw;        // whitened data: cov(xw) = I
  Eigen::MatrixXd whitener;  // p x p whitening transform applied to centered x
};

// Sources cycle Laplace / Student-t(3) / Uniform[-sqrt(3), sqrt(3)] across
// rows, each row standardized to zero mean and unit variance empirically.
IcaInstance gen_ica(int p, int n, std::mt19937_64& rng);

/* ---------------------------------------------------------------------- */
/* Factor rotation                                                         */
/* ---------------------------------------------------------------------- */

struct VarimaxInstance {
  Eigen::MatrixXd a;       // observed loadings, b0 * r_true^T
  Eigen::MatrixXd b0;      // simple-structure loadings with unit-norm columns
  Eigen::MatrixXd r_true;  // planted rotation recovering b0 = a * r_true
};

VarimaxInstance gen_varimax(int n, int p, std::mt19937_64& rng);

/* ---------------------------------------------------------------------- */
/* Joint diagonalization                                                   */
/* ---------------------------------------------------------------------- */

struct OjdInstance {
  std::vector<Eigen::MatrixXd> cs;  // m symmetric matrices sharing eigenbasis
  Eigen::MatrixXd w_true;           // planted common rotation
  std::vector<Eigen::VectorXd> ds;  // per-matrix eigenvalue vectors
};

// The shared eigenvalue ramp: p values linearly spaced from 0.5 to 2.0.
Eigen::VectorXd ojd_base_profile(int p);

// C_k = W diag(d_k) W^T + sigma * (G + G^T)/2 with d_k a jittered copy of the
// linear ramp 0.5..2.0; sigma = 0 yields exactly jointly diagonalizable input.
OjdInstance gen_ojd(int p, int m, double sigma, std::mt19937_64& rng);

/* ---------------------------------------------------------------------- */
/* Synthetic symmetric operator                                            */
/* ---------------------------------------------------------------------- */

// H = E diag(lambda) E^T with a random rotation E, exactly symmetric. The
// spectrum defaults to a log-like ramp from -1 to 10 (dense near -1) when not
// supplied; a supplied spectrum must have length p.
Eigen::MatrixXd gen_reduced_hamiltonian(
    int p, std::mt19937_64& rng,
    const std::optional<Eigen::VectorXd>& spectrum = std::nullopt);

/* ---------------------------------------------------------------------- */
/* Labeled two-class data                                                  */
/* ---------------------------------------------------------------------- */

struct TwoClassInstance {
  Eigen::MatrixXd x;   // n x p, columns standardized to mean 0 variance 1
  std::vector<int> y;  // n balanced labels in {0, 1}
};

// Class means differ by +2 on the first d_signal coordinates before the
// per-column standardization; the noise is unit Gaussian.
TwoClassInstance gen_two_class(int n, int p, int d_signal, std::mt19937_64& rng);

}  // namespace booom
