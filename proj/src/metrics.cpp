#include "gmmsq/metrics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "gmmsq/packing.hpp"
#include "gmmsq/parallel.hpp"
#include "gmmsq/quadrature.hpp"
#include "gmmsq/rng.hpp"

namespace gmmsq::metrics {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double std_normal_log_pdf(const Vector& x) {
  return -0.5 * (static_cast<double>(x.size()) * kLog2Pi + x.squaredNorm());
}

Matrix sample_std_normal(int dim, std::size_t n, std::uint64_t seed) {
  Matrix out(static_cast<Eigen::Index>(n), dim);
  par::blocked_apply(n, [&](std::size_t block, std::size_t lo, std::size_t hi) {
    Rng rng(derive_seed(seed, block));
    for (std::size_t i = lo; i < hi; ++i) {
      for (int c = 0; c < dim; ++c) out(static_cast<Eigen::Index>(i), c) = rng.normal();
    }
  });
  return out;
}

EstimateWithCI from_sums(double sum, double sumsq, std::size_t n) {
  EstimateWithCI est;
  est.samples = n;
  est.estimate = sum / static_cast<double>(n);
  const double var =
      std::max(0.0, sumsq / static_cast<double>(n) - est.estimate * est.estimate);
  est.stderr_ = std::sqrt(var / static_cast<double>(n));
  return est;
}

}  // namespace

Density standard_gaussian(int dimension) {
  Density d;
  d.dimension = dimension;
  d.log_density = [](const Vector& x) { return std_normal_log_pdf(x); };
  d.sample = [dimension](std::size_t n, std::uint64_t seed) {
    return sample_std_normal(dimension, n, seed);
  };
  return d;
}

Density density_of(const planting::PlantedInstance& inst) {
  Density d;
  d.dimension = inst.ambient_dim;
  d.log_density = [inst](const Vector& x) { return planting::log_pdf(inst, x); };
  d.sample = [inst](std::size_t n, std::uint64_t seed) {
    return planting::sample(inst, n, seed);
  };
  return d;
}

Density density_of(const mixture::SmoothedMixture& mix) {
  Density d;
  d.dimension = mix.dimension;
  d.log_density = [mix](const Vector& x) { return mixture::log_pdf(mix, x); };
  d.sample = [mix](std::size_t n, std::uint64_t seed) { return mixture::sample(mix, n, seed); };
  return d;
}

EstimateWithCI pairwise_correlation(const Density& p1, const Density& p2, std::size_t n,
                                    std::uint64_t seed) {
  if (p1.dimension != p2.dimension) {
    throw ParameterError("pairwise_correlation: ambient dimensions differ");
  }
  if (n == 0) throw ParameterError("pairwise_correlation: need n > 0");
  const Matrix xs = sample_std_normal(p1.dimension, n, seed);
  const auto [sum, sumsq] = par::blocked_sum_sumsq(n, [&](std::size_t i) {
    const Vector x = xs.row(static_cast<Eigen::Index>(i)).transpose();
    const double l0 = std_normal_log_pdf(x);
    return std::exp(p1.log_density(x) + p2.log_density(x) - 2.0 * l0);
  });
  EstimateWithCI est = from_sums(sum, sumsq, n);
  est.estimate -= 1.0;  // correlation subtracts the unit mass
  // Heavy-tailed importance weights show up as a stderr exceeding the
  // estimate itself; near-zero correlations get an absolute floor.
  est.reliable = est.stderr_ <= std::max(std::abs(est.estimate), 1e-3);
  return est;
}

double pairwise_correlation_quadrature(const Density& p1, const Density& p2,
                                       double half_width, double tol) {
  if (p1.dimension != p2.dimension) {
    throw ParameterError("pairwise_correlation_quadrature: ambient dimensions differ");
  }
  const int d = p1.dimension;
  if (d > 3) throw ParameterError("pairwise_correlation_quadrature: dimension must be <= 3");
  auto integrand_at = [&](const Vector& x) {
    return std::exp(p1.log_density(x) + p2.log_density(x) - std_normal_log_pdf(x));
  };
  double integral = 0.0;
  if (d == 1) {
    integral = quad::adaptive_simpson(
        [&](double x) {
          Vector v(1);
          v[0] = x;
          return integrand_at(v);
        },
        -half_width, half_width, tol);
  } else if (d == 2) {
    integral = quad::adaptive_simpson_2d(
        [&](double x, double y) {
          Vector v(2);
          v << x, y;
          return integrand_at(v);
        },
        -half_width, half_width, -half_width, half_width, tol);
  } else {
    auto inner2 = [&](double x) {
      return quad::adaptive_simpson_2d(
          [&](double y, double z) {
            Vector v(3);
            v << x, y, z;
            return integrand_at(v);
          },
          -half_width, half_width, -half_width, half_width, tol * 0.1);
    };
    integral = quad::adaptive_simpson(inner2, -half_width, half_width, tol);
  }
  return integral - 1.0;
}

double correlation_bound(const mixture::SmoothedMixture& low_dim, const Matrix& u,
                         const Matrix& v, int matched_degree) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw ParameterError("correlation_bound: frame shapes differ");
  }
  const double nu = packing::operator_norm(u * v.transpose());
  const double chi2 = mixture::chi2_vs_standard(low_dim);
  return std::pow(nu, matched_degree + 1) * chi2;
}

EstimateWithCI tv_montecarlo(const Density& p, const Density& q, std::size_t n,
                             std::uint64_t seed) {
  if (p.dimension != q.dimension) throw ParameterError("tv_montecarlo: dimensions differ");
  if (n == 0) throw ParameterError("tv_montecarlo: need n > 0");
  const Matrix xs = p.sample(n, seed);
  std::vector<std::uint8_t> skip(n, 0);
  const auto [sum, sumsq] = par::blocked_sum_sumsq(n, [&](std::size_t i) {
    const Vector x = xs.row(static_cast<Eigen::Index>(i)).transpose();
    const double lp = p.log_density(x);
    if (!std::isfinite(lp)) {
      skip[i] = 1;  // zero-density proposal point; contributes nothing
      return 0.0;
    }
    const double lq = q.log_density(x);
    return std::exp(std::min(0.0, lq - lp));
  });
  std::size_t skipped = 0;
  for (auto s : skip) skipped += s;
  EstimateWithCI est = from_sums(sum, sumsq, n);
  est.estimate = 1.0 - est.estimate;
  est.skipped = skipped;
  est.reliable = skipped <= n / 100;
  return est;
}

double tv_gaussian_identity_cov(double mu_norm) {
  if (mu_norm < 0.0) throw ParameterError("tv_gaussian_identity_cov: norm must be >= 0");
  return 1.0 - std::erfc(mu_norm / (2.0 * std::sqrt(2.0)));
}

SeparationReport separation_check(const planting::PlantedInstance& inst, double target) {
  if (inst.components() < 2) throw ParameterError("separation_check: need >= 2 components");
  SeparationReport rep;
  rep.target = target;
  rep.min_distance = std::numeric_limits<double>::infinity();
  for (int i = 0; i < inst.components(); ++i) {
    for (int j = i + 1; j < inst.components(); ++j) {
      const double dist = (inst.means.row(i) - inst.means.row(j)).norm();
      if (dist < rep.min_distance) {
        rep.min_distance = dist;
        rep.arg_i = i;
        rep.arg_j = j;
      }
    }
  }
  rep.pass = rep.min_distance >= target;
  return rep;
}

DeterminantReport determinant_check(const Matrix& u, const Matrix& v) {
  const int m = static_cast<int>(u.rows());
  const int d = static_cast<int>(u.cols());
  if (v.rows() != m || v.cols() != d) throw ParameterError("determinant_check: shape mismatch");
  if (d < 2 * m) throw ParameterError("determinant_check: need d >= 2m");

  DeterminantReport rep;
  constexpr double kRankTol = 1e-10;

  // Orthonormal completion of V inside span(rows of U, rows of V):
  // Gram-Schmidt the U rows against V and earlier completions.
  std::vector<Vector> basis;
  basis.reserve(static_cast<std::size_t>(2 * m));
  for (int i = 0; i < m; ++i) basis.push_back(v.row(i).transpose());
  std::vector<Vector> completion;
  for (int i = 0; i < m && static_cast<int>(completion.size()) < m; ++i) {
    Vector w = u.row(i).transpose();
    for (const Vector& b : basis) w -= b.dot(w) * b;
    // second pass stabilizes near-dependent directions
    for (const Vector& b : basis) w -= b.dot(w) * b;
    const double norm = w.norm();
    if (norm > kRankTol) {
      w /= norm;
      basis.push_back(w);
      completion.push_back(w);
    }
  }
  if (static_cast<int>(completion.size()) < m) {
    // span(U, V) is degenerate; pad with coordinate directions so the
    // completion exists, and flag the reduced rank.
    rep.reduced_rank = true;
    for (int c = 0; c < d && static_cast<int>(completion.size()) < m; ++c) {
      Vector w = Vector::Zero(d);
      w[c] = 1.0;
      for (const Vector& b : basis) w -= b.dot(w) * b;
      for (const Vector& b : basis) w -= b.dot(w) * b;
      const double norm = w.norm();
      if (norm > kRankTol) {
        w /= norm;
        basis.push_back(w);
        completion.push_back(w);
      }
    }
  }

  Matrix r2(m, d);
  for (int i = 0; i < m; ++i) r2.row(i) = completion[static_cast<std::size_t>(i)].transpose();
  const Matrix prod = u * r2.transpose();
  rep.determinant = prod.determinant();
  rep.abs_determinant = std::abs(rep.determinant);
  return rep;
}

}  // namespace gmmsq::metrics
