#pragma once

#include <cstdint>
#include <functional>

#include "gmmsq/common.hpp"
#include "gmmsq/mixture.hpp"
#include "gmmsq/planting.hpp"

namespace gmmsq::metrics {

/// Monte Carlo point estimate with a CLT standard error.
struct EstimateWithCI {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
  double multiplier = 3.0;
  bool reliable = true;     // false when the relative stderr exceeds 1
  std::size_t skipped = 0;  // zero-density proposal points

  double lower() const { return estimate - multiplier * stderr_; }
  double upper() const { return estimate + multiplier * stderr_; }
};

/// Anything with a log-density and a seeded sampler; the shared face of the
/// Monte Carlo estimators.
struct Density {
  int dimension = 0;
  std::function<double(const Vector&)> log_density;
  std::function<Matrix(std::size_t, std::uint64_t)> sample;
};

Density standard_gaussian(int dimension);
Density density_of(const planting::PlantedInstance& inst);
Density density_of(const mixture::SmoothedMixture& mix);

/// chi_N(P1, P2) = E_{x~N}[P1(x) P2(x) / phi(x)^2] - 1 by importance sampling
/// from N(0, I_d). Flagged unreliable (not an error) when the weight variance
/// blows up.
EstimateWithCI pairwise_correlation(const Density& p1, const Density& p2, std::size_t n,
                                    std::uint64_t seed);

/// Quadrature evaluation of the same integral for dimension <= 3.
double pairwise_correlation_quadrature(const Density& p1, const Density& p2,
                                       double half_width = 12.0, double tol = 1e-8);

/// ||U V^T||_op^{t+1} * chi^2(A, N), the pairwise-correlation bound for
/// degree-t matched mixtures.
double correlation_bound(const mixture::SmoothedMixture& low_dim, const Matrix& u,
                         const Matrix& v, int matched_degree);

/// d_TV(P, Q) = 1 - E_{x~P}[min(1, Q(x)/P(x))], sampling from P.
EstimateWithCI tv_montecarlo(const Density& p, const Density& q, std::size_t n,
                             std::uint64_t seed);

/// d_TV(N(mu, I), N(0, I)) = 1 - erfc(|mu| / (2 sqrt(2))).
double tv_gaussian_identity_cov(double mu_norm);

struct SeparationReport {
  double min_distance = 0.0;
  double target = 0.0;
  bool pass = false;
  int arg_i = -1, arg_j = -1;
};

/// Exact min pairwise distance of the planted means against a target.
SeparationReport separation_check(const planting::PlantedInstance& inst, double target);

struct DeterminantReport {
  double determinant = 0.0;
  double abs_determinant = 0.0;
  bool reduced_rank = false;  // span(U, V) had dimension below 2m
  double reference = 0.5;
};

/// det(U R_{V2}^T) where R_{V2} completes V to an orthonormal basis of
/// span(rows of U, rows of V); reports |det| as the basis-independent value.
/// Requires d >= 2m.
DeterminantReport determinant_check(const Matrix& u, const Matrix& v);

}  // namespace gmmsq::metrics
