#pragma once

#include <cstdint>

#include "gmmsq/builders.hpp"
#include "gmmsq/common.hpp"
#include "gmmsq/hermite.hpp"

namespace gmmsq::mixture {

/// k-component spherical Gaussian mixture on R^m with one shared per-
/// coordinate variance. Produced by Gaussian-noise smoothing of a discrete
/// core, in which case means are rho * (core points) with rho = sqrt(1 -
/// variance). variance = 1 (a plain Gaussian mixture with identity-scaled
/// components) is accepted for direct construction; smooth() itself requires
/// variance in (0, 1).
struct SmoothedMixture {
  int dimension = 0;
  Matrix means;    // k x m
  Vector weights;  // k
  double variance = 0.0;

  int components() const { return static_cast<int>(means.rows()); }
  double rho() const;
  void validate(double tol = 1e-12) const;
};

/// Gaussian-noise smoothing: replaces each support point x with a spherical
/// Gaussian centered at rho * x with variance delta, rho = sqrt(1 - delta).
SmoothedMixture smooth(const builders::DiscreteDistribution& core, double delta);

/// Exact Hermite moment E[h_a] = sum_i w_i rho^{|a|} h_a(mu_i / rho).
double hermite_moment(const SmoothedMixture& mix, const hermite::MultiIndex& a);

/// Closed-form cross integral T(mu1, mu2) = int N(x;mu1,dI) N(x;mu2,dI) /
/// N(x;0,I) dx, the building block of the chi-squared divergence. Symmetric
/// in its mean arguments.
double log_cross_density_integral(const Vector& mu1, const Vector& mu2, double delta);
double cross_density_integral(const Vector& mu1, const Vector& mu2, double delta);

/// chi^2(mix, N(0, I_m)) = sum_{ij} w_i w_j T(mu_i, mu_j) - 1, evaluated in
/// log space. Requires variance < 1.
double chi2_vs_standard(const SmoothedMixture& mix);

double log_pdf(const SmoothedMixture& mix, const Vector& x);
double pdf(const SmoothedMixture& mix, const Vector& x);

/// n i.i.d. draws (rows); deterministic given the seed, and independent of
/// thread count (the stream splits into fixed sample blocks).
Matrix sample(const SmoothedMixture& mix, std::size_t n, std::uint64_t seed);
/// Reference implementation: identical output, no parallelism.
Matrix sample_serial(const SmoothedMixture& mix, std::size_t n, std::uint64_t seed);

}  // namespace gmmsq::mixture
