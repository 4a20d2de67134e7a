#include "gmmsq/mixture.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "gmmsq/parallel.hpp"
#include "gmmsq/rng.hpp"

namespace gmmsq::mixture {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double log_sum_exp(const std::vector<double>& v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace

double SmoothedMixture::rho() const { return std::sqrt(1.0 - variance); }

void SmoothedMixture::validate(double tol) const {
  if (dimension < 1) throw ParameterError("SmoothedMixture: dimension must be >= 1");
  if (!(variance > 0.0 && variance <= 1.0)) {
    throw ParameterError("SmoothedMixture: variance must lie in (0, 1]");
  }
  if (means.rows() != weights.size() || means.cols() != dimension) {
    throw ParameterError("SmoothedMixture: shape mismatch");
  }
  if (std::abs(weights.sum() - 1.0) > tol) {
    throw VerificationError("SmoothedMixture: weights sum to " +
                            std::to_string(weights.sum()) + ", not 1");
  }
  if (weights.minCoeff() <= 0.0) {
    throw VerificationError("SmoothedMixture: non-positive weight present");
  }
  const double r = rho();
  if (std::abs(r * r + variance - 1.0) > tol) {
    throw VerificationError("SmoothedMixture: rho^2 + delta != 1");
  }
}

SmoothedMixture smooth(const builders::DiscreteDistribution& core, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ParameterError("smooth: delta must lie in (0, 1)");
  }
  SmoothedMixture mix;
  mix.dimension = core.dimension;
  mix.variance = delta;
  mix.means = std::sqrt(1.0 - delta) * core.support;
  mix.weights = core.weights;
  return mix;
}

double hermite_moment(const SmoothedMixture& mix, const hermite::MultiIndex& a) {
  if (static_cast<int>(a.size()) != mix.dimension) {
    throw ParameterError("mixture::hermite_moment: multi-index length mismatch");
  }
  const int deg = hermite::degree(a);
  if (deg == 0) return 1.0;
  std::vector<double> moments(static_cast<std::size_t>(deg) + 1);
  double total = 0.0;
  for (int i = 0; i < mix.components(); ++i) {
    double prod = 1.0;
    for (int c = 0; c < mix.dimension; ++c) {
      const int k = a[static_cast<std::size_t>(c)];
      if (k == 0) continue;
      hermite::gaussian_moments_1d(deg, mix.means(i, c), mix.variance,
                                   std::span<double>(moments));
      prod *= moments[static_cast<std::size_t>(k)];
    }
    total += mix.weights[i] * prod;
  }
  return total;
}

double log_cross_density_integral(const Vector& mu1, const Vector& mu2, double delta) {
  if (mu1.size() != mu2.size()) {
    throw ParameterError("cross_density_integral: mean dimension mismatch");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ParameterError("cross_density_integral: delta must lie in (0, 1)");
  }
  const double m = static_cast<double>(mu1.size());
  const double s = 2.0 - delta;
  // Complete-the-square per coordinate:
  //   log T = -(m/2) log(delta s) - [(1-delta)(|mu1|^2 + |mu2|^2) - 2 <mu1,mu2>] / (2 delta s)
  const double quad =
      (1.0 - delta) * (mu1.squaredNorm() + mu2.squaredNorm()) - 2.0 * mu1.dot(mu2);
  return -0.5 * m * std::log(delta * s) - quad / (2.0 * delta * s);
}

double cross_density_integral(const Vector& mu1, const Vector& mu2, double delta) {
  return std::exp(log_cross_density_integral(mu1, mu2, delta));
}

double chi2_vs_standard(const SmoothedMixture& mix) {
  if (!(mix.variance < 1.0)) {
    throw ParameterError("chi2_vs_standard: delta must be < 1 for a finite divergence");
  }
  const int k = mix.components();
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      terms.push_back(std::log(mix.weights[i]) + std::log(mix.weights[j]) +
                      log_cross_density_integral(mix.means.row(i), mix.means.row(j),
                                                 mix.variance));
    }
  }
  return std::expm1(log_sum_exp(terms));
}

double log_pdf(const SmoothedMixture& mix, const Vector& x) {
  if (x.size() != mix.dimension) throw ParameterError("mixture::log_pdf: dimension mismatch");
  const double m = static_cast<double>(mix.dimension);
  const double log_norm = -0.5 * m * (kLog2Pi + std::log(mix.variance));
  std::vector<double> terms(static_cast<std::size_t>(mix.components()));
  for (int i = 0; i < mix.components(); ++i) {
    const double q = (x.transpose() - mix.means.row(i)).squaredNorm() / (2.0 * mix.variance);
    terms[static_cast<std::size_t>(i)] = std::log(mix.weights[i]) + log_norm - q;
  }
  return log_sum_exp(terms);
}

double pdf(const SmoothedMixture& mix, const Vector& x) { return std::exp(log_pdf(mix, x)); }

namespace {

template <class Apply>
Matrix sample_impl(const SmoothedMixture& mix, std::size_t n, std::uint64_t seed, Apply apply) {
  Matrix out(static_cast<Eigen::Index>(n), mix.dimension);
  // Component cumulative weights once; per-block RNG streams keep the output
  // independent of scheduling.
  Vector cumulative(mix.components());
  double acc = 0.0;
  for (int i = 0; i < mix.components(); ++i) {
    acc += mix.weights[i];
    cumulative[i] = acc;
  }
  const double sd = std::sqrt(mix.variance);
  apply(n, [&](std::size_t block, std::size_t lo, std::size_t hi) {
    Rng rng(derive_seed(seed, block));
    for (std::size_t i = lo; i < hi; ++i) {
      const double u = rng.uniform();
      int comp = 0;
      while (comp + 1 < mix.components() && u >= cumulative[comp]) ++comp;
      for (int c = 0; c < mix.dimension; ++c) {
        out(static_cast<Eigen::Index>(i), c) = mix.means(comp, c) + sd * rng.normal();
      }
    }
  });
  return out;
}

}  // namespace

Matrix sample(const SmoothedMixture& mix, std::size_t n, std::uint64_t seed) {
  return sample_impl(mix, n, seed,
                     [](std::size_t count, auto&& fn) { par::blocked_apply(count, fn); });
}

Matrix sample_serial(const SmoothedMixture& mix, std::size_t n, std::uint64_t seed) {
  return sample_impl(mix, n, seed,
                     [](std::size_t count, auto&& fn) { par::serial_apply(count, fn); });
}

}  // namespace gmmsq::mixture
