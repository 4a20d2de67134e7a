#include "gmmsq/builders.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gmmsq/parallel.hpp"
#include "gmmsq/rng.hpp"
#include "gmmsq/simplex.hpp"

namespace gmmsq::builders {

void DiscreteDistribution::validate(double tol) const {
  if (dimension < 1) throw ParameterError("DiscreteDistribution: dimension must be >= 1");
  if (support.rows() != weights.size() || support.cols() != dimension) {
    throw ParameterError("DiscreteDistribution: shape mismatch");
  }
  if (weights.size() == 0) throw ParameterError("DiscreteDistribution: empty support");
  if (std::abs(weights.sum() - 1.0) > tol) {
    throw VerificationError("DiscreteDistribution: weights sum to " +
                            std::to_string(weights.sum()) + ", not 1");
  }
  if (weights.minCoeff() <= 0.0) {
    throw VerificationError("DiscreteDistribution: non-positive weight present");
  }
  for (int i = 0; i < support.rows(); ++i) {
    for (int j = i + 1; j < support.rows(); ++j) {
      if ((support.row(i) - support.row(j)).norm() == 0.0) {
        throw VerificationError("DiscreteDistribution: duplicate support points " +
                                std::to_string(i) + ", " + std::to_string(j));
      }
    }
  }
}

DiscreteDistribution explicit_three_moment(int m) {
  if (m < 1) throw ParameterError("explicit_three_moment: m must be >= 1");
  const double radius = std::sqrt(static_cast<double>(m));
  DiscreteDistribution d;
  d.dimension = m;
  d.support = Matrix::Zero(2 * m, m);
  for (int i = 0; i < m; ++i) {
    d.support(i, i) = radius;
    d.support(m + i, i) = -radius;
  }
  d.weights = Vector::Constant(2 * m, 1.0 / (2.0 * m));
  d.builder = "explicit3";
  d.matched_degree = 3;
  return d;
}

Vector lp_weights_for_support(const Matrix& support, int max_degree, double alpha,
                              double tolerance) {
  const int n = static_cast<int>(support.rows());
  const int m = static_cast<int>(support.cols());
  if (n < 1) throw ParameterError("lp_weights_for_support: empty support");
  if (alpha * n >= 1.0) {
    throw ParameterError("lp_weights_for_support: alpha * N must be < 1");
  }
  if (tolerance <= 0.0) throw ParameterError("lp_weights_for_support: tolerance must be > 0");

  const auto idx = hermite::basis(m, max_degree);
  const int r = static_cast<int>(idx.size());
  if (static_cast<std::size_t>(n) < static_cast<std::size_t>(r)) {
    throw ParameterError("lp_weights_for_support: N = " + std::to_string(n) +
                         " below basis count " + std::to_string(r));
  }

  // Moment matrix H with H(a, i) = h_a(x_i); basis row a = 0 is first.
  Matrix h(r, n);
  std::vector<double> vals(static_cast<std::size_t>(max_degree) + 1);
  for (int i = 0; i < n; ++i) {
    // per-coordinate 1-d values reused across the basis
    Matrix coord(m, max_degree + 1);
    for (int c = 0; c < m; ++c) {
      hermite::evaluate_all(max_degree, support(i, c), std::span<double>(vals));
      for (int k = 0; k <= max_degree; ++k) coord(c, k) = vals[static_cast<std::size_t>(k)];
    }
    for (int a = 0; a < r; ++a) {
      double prod = 1.0;
      for (int c = 0; c < m; ++c) prod *= coord(c, idx[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)]);
      h(a, i) = prod;
    }
  }

  // Substitute v_i = w_i - alpha >= 0. The sum row stays an equality; the
  // remaining moment rows are relaxed to a +-tolerance band.
  Vector target = Vector::Zero(r);
  target[0] = 1.0;
  Vector shifted = target - alpha * h.rowwise().sum();

  simplex::Problem p;
  const int extra = r - 1;
  p.a = Matrix::Zero(1 + 2 * extra, n);
  p.rhs = Vector::Zero(1 + 2 * extra);
  p.relations.assign(static_cast<std::size_t>(1 + 2 * extra), simplex::Relation::LessEq);
  p.a.row(0) = h.row(0);
  p.rhs[0] = shifted[0];
  p.relations[0] = simplex::Relation::Equal;
  for (int a = 1; a < r; ++a) {
    p.a.row(2 * a - 1) = h.row(a);
    p.rhs[2 * a - 1] = shifted[a] + tolerance;
    p.relations[static_cast<std::size_t>(2 * a - 1)] = simplex::Relation::LessEq;
    p.a.row(2 * a) = h.row(a);
    p.rhs[2 * a] = shifted[a] - tolerance;
    p.relations[static_cast<std::size_t>(2 * a)] = simplex::Relation::GreaterEq;
  }

  const auto result = simplex::find_feasible(p);
  if (result.status != simplex::Status::Feasible) {
    std::string msg = "lp_weights_for_support: infeasible (phase-1 residual " +
                      std::to_string(result.infeasibility) + ")";
    // The multipliers define a separating degree-<=t polynomial, the dual
    // certificate: p(x) = sum_a y_a h_a(x) nonneg on the support with
    // E_N[p] below alpha * sum_i p(x_i).
    if (result.row_multipliers.size() > 0) {
      msg += "; dual certificate row norm " + std::to_string(result.row_multipliers.norm());
    }
    throw ConstructionError(msg);
  }

  Vector w = result.x.array() + alpha;
  // Tiny renormalization guard; the equality row already pins the sum to
  // machine precision, so this moves residuals by O(1e-15).
  w /= w.sum();
  return w;
}

DiscreteDistribution lp_matched(int m, const LpOptions& options) {
  if (m < 1) throw ParameterError("lp_matched: m must be >= 1");
  if (options.max_degree < 0) throw ParameterError("lp_matched: max_degree must be >= 0");
  const std::uint64_t basis_n = hermite::basis_size(m, options.max_degree);
  const std::size_t n =
      options.support_size > 0 ? options.support_size : 20 * static_cast<std::size_t>(basis_n);
  if (n < basis_n) {
    throw ParameterError("lp_matched: support size " + std::to_string(n) +
                         " below basis count " + std::to_string(basis_n));
  }
  // Inflate the internal floor a hair so the final renormalization cannot dip
  // a weight below the advertised alpha.
  const double alpha = options.min_weight >= 0.0 ? options.min_weight
                                                 : 0.99 / static_cast<double>(n);
  const double alpha_internal = alpha * (1.0 + 1e-6);
  if (alpha_internal * static_cast<double>(n) >= 1.0) {
    throw ParameterError("lp_matched: alpha * N must be < 1");
  }

  std::string last_error;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    const std::uint64_t seed =
        attempt == 0 ? options.seed : derive_seed(options.seed, static_cast<std::uint64_t>(attempt));
    Rng rng(seed);
    Matrix support(static_cast<Eigen::Index>(n), m);
    for (Eigen::Index i = 0; i < support.rows(); ++i) {
      for (int c = 0; c < m; ++c) support(i, c) = rng.normal();
    }
    try {
      Vector w = lp_weights_for_support(support, options.max_degree, alpha_internal,
                                        options.tolerance);
      DiscreteDistribution d;
      d.dimension = m;
      d.support = std::move(support);
      d.weights = std::move(w);
      d.seed = seed;
      d.builder = "lp";
      d.matched_degree = options.max_degree;
      return d;
    } catch (const ConstructionError& e) {
      last_error = e.what();
    }
  }
  throw ConstructionError("lp_matched: infeasible after " +
                          std::to_string(options.max_retries + 1) + " attempts; last: " +
                          last_error);
}

GeometryReport support_geometry(const DiscreteDistribution& dist, double lo_factor,
                                double hi_factor, double min_separation) {
  if (dist.size() == 0) throw ParameterError("support_geometry: empty distribution");
  GeometryReport rep;
  const double root_m = std::sqrt(static_cast<double>(dist.dimension));
  rep.norm_lo_bound = lo_factor * root_m;
  rep.norm_hi_bound = hi_factor * root_m;
  rep.min_separation_bound = min_separation;

  const int n = dist.size();
  rep.min_norm = std::numeric_limits<double>::infinity();
  rep.max_norm = 0.0;
  for (int i = 0; i < n; ++i) {
    const double nrm = dist.support.row(i).norm();
    rep.min_norm = std::min(rep.min_norm, nrm);
    rep.max_norm = std::max(rep.max_norm, nrm);
  }

  rep.min_pairwise_distance = std::numeric_limits<double>::infinity();
  if (n > 1) {
    std::vector<double> row_min(static_cast<std::size_t>(n),
                                std::numeric_limits<double>::infinity());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n - 1; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = i + 1; j < n; ++j) {
        best = std::min(best, (dist.support.row(i) - dist.support.row(j)).norm());
      }
      row_min[static_cast<std::size_t>(i)] = best;
    }
    for (double v : row_min) rep.min_pairwise_distance = std::min(rep.min_pairwise_distance, v);
  }

  rep.norm_band_pass = rep.min_norm >= rep.norm_lo_bound && rep.max_norm <= rep.norm_hi_bound;
  rep.separation_pass = rep.min_pairwise_distance >= min_separation;
  return rep;
}

hermite::CoefficientTable hermite_moments(const DiscreteDistribution& dist, int max_degree,
                                          std::uint64_t cap) {
  hermite::CoefficientTable table(dist.dimension, max_degree, cap);
  const auto& idx = table.indices();
  const int n = dist.size();
  const int m = dist.dimension;
  // Cache per-point, per-coordinate 1-d Hermite values.
  std::vector<double> vals(static_cast<std::size_t>(max_degree) + 1);
  Matrix coord(static_cast<Eigen::Index>(n) * m, max_degree + 1);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < m; ++c) {
      hermite::evaluate_all(max_degree, dist.support(i, c), std::span<double>(vals));
      for (int k = 0; k <= max_degree; ++k) {
        coord(static_cast<Eigen::Index>(i) * m + c, k) = vals[static_cast<std::size_t>(k)];
      }
    }
  }
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const auto& mi = idx[a];
    table.value(a) = par::blocked_sum(static_cast<std::size_t>(n), [&](std::size_t i) {
      double prod = dist.weights[static_cast<Eigen::Index>(i)];
      for (int c = 0; c < m; ++c) {
        prod *= coord(static_cast<Eigen::Index>(i) * m + c, mi[static_cast<std::size_t>(c)]);
      }
      return prod;
    });
  }
  return table;
}

double poly_deviation_linear(const Matrix& samples, int max_degree) {
  const int n = static_cast<int>(samples.rows());
  const int m = static_cast<int>(samples.cols());
  if (n == 0) throw ParameterError("poly_deviation_linear: empty sample");
  const auto idx = hermite::basis(m, max_degree);
  double sq = 0.0;
  std::vector<double> vals(static_cast<std::size_t>(max_degree) + 1);
  for (std::size_t a = 1; a < idx.size(); ++a) {  // a = 0 deviates by zero
    const auto& mi = idx[a];
    const double mean = par::blocked_sum(static_cast<std::size_t>(n), [&](std::size_t i) {
      double prod = 1.0;
      for (int c = 0; c < m; ++c) {
        prod *= hermite::evaluate(mi[static_cast<std::size_t>(c)],
                                  samples(static_cast<Eigen::Index>(i), c));
      }
      return prod;
    }) / static_cast<double>(n);
    sq += mean * mean;
  }
  return std::sqrt(sq);
}

}  // namespace gmmsq::builders
