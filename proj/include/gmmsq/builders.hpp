#pragma once

#include <cstdint>
#include <string>

#include "gmmsq/common.hpp"
#include "gmmsq/hermite.hpp"

namespace gmmsq::builders {

/// Finitely supported distribution on R^m. Weights are strictly positive and
/// sum to one; support points are pairwise distinct.
struct DiscreteDistribution {
  int dimension = 0;
  Matrix support;  // N x m, one point per row
  Vector weights;  // N
  std::uint64_t seed = 0;
  std::string builder;     // "explicit3" | "lp"
  int matched_degree = 0;  // degree up to which Hermite moments vanish

  int size() const { return static_cast<int>(support.rows()); }
  void validate(double tol = 1e-12) const;
};

/// Uniform distribution on the 2m points {+-sqrt(m) e_i}. Matches all moments
/// of degree 1..3 with N(0, I_m) exactly, and the support radius makes
/// E[x_i^2] = 1 (radius sqrt(m/2) would give 1/2). Min pairwise distance is
/// sqrt(2m).
DiscreteDistribution explicit_three_moment(int m);

struct LpOptions {
  int max_degree = 2;            // t
  std::size_t support_size = 0;  // N; 0 means 20 * C(m+t,t)
  double min_weight = -1.0;      // alpha; negative means 0.99 / N
  std::uint64_t seed = 0;
  double tolerance = 1e-9;  // moment equalities relaxed to +-tolerance
  int max_retries = 4;      // fresh derived seeds after infeasibility
};

/// Weight vector w with w_i >= alpha and sum_i w_i h_a(x_i) = 1{a=0} within
/// tolerance for every |a| <= t, over a caller-fixed support (the test hook
/// that bypasses sampling). Throws ConstructionError with the dual
/// certificate summary when infeasible.
Vector lp_weights_for_support(const Matrix& support, int max_degree, double alpha,
                              double tolerance = 1e-9);

/// Support of N i.i.d. N(0, I_m) points plus LP-matched weights; resamples
/// with a derived seed on infeasibility up to max_retries.
DiscreteDistribution lp_matched(int m, const LpOptions& options);

struct GeometryReport {
  double min_norm = 0.0;
  double max_norm = 0.0;
  double min_pairwise_distance = 0.0;  // +inf for a single point
  double norm_lo_bound = 0.0;          // lo_factor * sqrt(m)
  double norm_hi_bound = 0.0;
  double min_separation_bound = 0.0;
  bool norm_band_pass = false;
  bool separation_pass = false;
  bool pass() const { return norm_band_pass && separation_pass; }
};

/// Brute-force support geometry against the norm band
/// [lo_factor sqrt(m), hi_factor sqrt(m)] and the pairwise separation bound.
GeometryReport support_geometry(const DiscreteDistribution& dist, double lo_factor,
                                double hi_factor, double min_separation);

/// Exact Hermite moment table: entry at a is sum_i w_i h_a(x_i).
hermite::CoefficientTable hermite_moments(const DiscreteDistribution& dist, int max_degree,
                                          std::uint64_t cap = hermite::default_basis_cap);

/// sup over degree <= t polynomials p with E_N[p^2] = 1 of
/// |E_{U(S)}[p] - E_N[p]|; equals the Euclidean norm of the empirical Hermite
/// coefficient deviations of degree 1..t (h_0 contributes deviation zero).
double poly_deviation_linear(const Matrix& samples, int max_degree);

}  // namespace gmmsq::builders
