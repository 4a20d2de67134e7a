#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gmmsq/common.hpp"
#include "gmmsq/hermite.hpp"
#include "gmmsq/mixture.hpp"

namespace gmmsq::planting {

enum class Mode { GeneralEps, SqrtK };

std::string mode_name(Mode mode);
Mode mode_from_name(const std::string& name);

struct Seeds {
  std::uint64_t core = 1;
  std::uint64_t pack = 2;
  std::uint64_t sampling = 3;
};

/// Parameter record tying a construction run together. Derived fields:
///   general-eps: m = round(k^{2 eps}), t = max(1, floor(1/(26 eps))),
///                delta = c_delta k^{-2.5/m}
///   sqrt-k:      m = k/2 (k even), t = 3, delta = c_delta k^{-2.5/m}
struct InstanceSpec {
  Mode mode = Mode::SqrtK;
  int k = 0;
  double epsilon = 0.0;  // general-eps only
  double c_delta = 0.1;
  int m = 0;
  int t = 0;
  double delta = 0.0;
  double rho = 0.0;
  int d = 0;
  Seeds seeds;
  std::vector<std::string> advisories;  // which asymptotic preconditions hold

  double separation_target() const;  // k^eps or sqrt(k)/3
};

InstanceSpec derive_params(Mode mode, int k, std::optional<double> epsilon, double c_delta,
                           int d, Seeds seeds = {});

/// Full-dimensional mixture: means V^T mu_i, shared covariance
/// I_d - (1 - delta) V^T V, plus the hidden frame.
struct PlantedInstance {
  int ambient_dim = 0;
  Matrix frame;    // V, m x d row-orthonormal
  Matrix means;    // k x d
  Vector weights;  // k
  double delta = 0.0;
  InstanceSpec spec;
  std::string core_hash;

  int components() const { return static_cast<int>(means.rows()); }
  int subspace_dim() const { return static_cast<int>(frame.rows()); }
  Matrix covariance() const;       // dense Sigma
  Matrix sqrt_covariance() const;  // I - (1 - sqrt(delta)) V^T V
  void validate(double tol = 1e-10) const;
};

/// Embeds the low-dimensional mixture along the rows of V. Requires V
/// row-orthonormal within 1e-10 and matching dimensions.
PlantedInstance plant(const mixture::SmoothedMixture& low_dim, const Matrix& v);

/// Fast factorized density: mixture(Vx) * phi_{d-m}(x - V^T V x).
double log_pdf(const PlantedInstance& inst, const Vector& x);
double pdf(const PlantedInstance& inst, const Vector& x);

/// Dense-covariance GMM density; an independent evaluation path kept for
/// verification (the two must agree pointwise).
double log_pdf_dense(const PlantedInstance& inst, const Vector& x);

Matrix sample(const PlantedInstance& inst, std::size_t n, std::uint64_t seed);
Matrix sample_serial(const PlantedInstance& inst, std::size_t n, std::uint64_t seed);

/// Exact E[h_a(x)] for x ~ N(mean, cov) via the truncated generating
/// function exp(<t, mean> + t^T (cov - I) t / 2); returns moments for the
/// whole degree <= max_degree basis in graded-lex order.
Vector gaussian_hermite_moments(const Vector& mean, const Matrix& cov, int max_degree);

/// Exact E[h_a(x)] under the planted instance, for every |a| <= max_degree.
Vector hermite_moments(const PlantedInstance& inst, int max_degree);
double hermite_moment(const PlantedInstance& inst, const hermite::MultiIndex& a);

/// Canonical JSON bytes of a discrete core; hashed into provenance.
std::string core_json(const builders::DiscreteDistribution& core);
std::string core_hash(const builders::DiscreteDistribution& core);

/// Instance file I/O. Round-trips byte-exactly: exporting an imported
/// instance reproduces the file.
std::string instance_json(const PlantedInstance& inst);
void export_instance(const PlantedInstance& inst, const std::string& path);
PlantedInstance import_instance(const std::string& path);
std::string instance_hash(const PlantedInstance& inst);

/// Sample CSV ("x0,...,x{d-1}" header, 17 significant digits).
void write_samples_csv(const Matrix& samples, const std::string& path);

}  // namespace gmmsq::planting
