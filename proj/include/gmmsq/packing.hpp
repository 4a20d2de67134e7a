#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmmsq/common.hpp"

namespace gmmsq::packing {

/// Per-batch records of the batched-SVD construction.
struct BatchStats {
  double sigma_min = 1.0;
  double sigma_max = 1.0;
  double gershgorin_radius = 0.0;  // max row sum of off-diagonal |<u_k, u_l>|
  double correction_frobenius = 0.0;  // ||A_i - B_i||_F
};

/// A set of m x d row-orthonormal matrices with pairwise near-orthogonality
/// statistics recorded at build time.
struct SubspacePack {
  int subspace_dim = 0;  // m
  int ambient_dim = 0;   // d
  std::vector<Matrix> frames;
  std::string method;  // "frobenius" | "batched-svd"
  double threshold = 0.0;
  double exponent = 0.0;  // c, batched-svd only
  std::uint64_t seed = 0;
  std::vector<BatchStats> batches;     // batched-svd only
  std::vector<Matrix> raw_batches;     // batched-svd only: B_i before orthonormalization
  double max_cross_frobenius = 0.0;
  double max_cross_operator = 0.0;

  int count() const { return static_cast<int>(frames.size()); }
};

/// Haar-random m-frame: row-orthonormalized Gaussian m x d matrix.
Matrix random_frame(int m, int d, std::uint64_t seed);

/// Greedy rejection pack: frames are accepted only when the Frobenius norm of
/// the cross product with all previously accepted frames stays below the
/// threshold. Throws ConstructionError (with achieved statistics) when
/// max_attempts is exhausted; max_attempts <= 0 means 50 * count.
SubspacePack pack_frobenius(int count, int m, int d, double threshold, std::uint64_t seed,
                            int max_attempts = 0);

/// Batched-SVD pack: draws count*m near-orthogonal unit vectors (greedy
/// rejection at 4 d^{-1/2+c}), groups them into m-row batches B_i, and
/// returns the orthonormalizations A_i = U_i V_i^T with all singular values
/// replaced by one. Requires 0 < c < 1/4 and m < d.
SubspacePack pack_batched_svd(int count, int m, int d, double c, std::uint64_t seed);

struct PairStat {
  int i = 0, j = 0;
  double op_norm = 0.0;
  double frobenius = 0.0;
  double chain_bound = 0.0;  // triangle-inequality bound assembled from batch terms
};

struct PackDiagnostics {
  double max_orthonormality_residual = 0.0;  // max ||A A^T - I||_F
  double max_pair_operator = 0.0;
  double max_pair_frobenius = 0.0;
  std::vector<PairStat> pairs;
  std::vector<BatchStats> batches;       // recomputed for batched-svd packs
  bool gershgorin_pass = true;           // singular values inside the measured band
  bool chain_pass = true;                // op norms below the assembled chain bound
  bool stats_match_recorded = true;      // stored pack stats equal recomputation
};

/// Recomputes orthonormality residuals, pairwise norms, Gershgorin bands and
/// the decomposition bound chain; flags violations.
PackDiagnostics diagnostics(const SubspacePack& pack);

/// Spectral norm via SVD.
double operator_norm(const Matrix& a);
/// Spectral norm via power iteration on A^T A; the large-matrix fallback.
double operator_norm_power(const Matrix& a, int iterations = 100, double tol = 1e-9);

/// Threshold on m*d above which diagnostics switch to power iteration.
inline constexpr std::size_t op_norm_switch = 1'000'000;

}  // namespace gmmsq::packing
