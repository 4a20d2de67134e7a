#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "gmmsq/common.hpp"

namespace gmmsq::hermite {

/// Exponent vector of a multivariate Hermite polynomial, one entry per
/// coordinate; total degree is the entry sum.
using MultiIndex = std::vector<int>;

int degree(const MultiIndex& a);

inline constexpr std::uint64_t default_basis_cap = 1'000'000;

/// C(m + t, t), the number of multi-indices of degree <= t in m variables.
/// Throws ParameterError when the count overflows the cap.
std::uint64_t basis_size(int dimension, int max_degree,
                         std::uint64_t cap = default_basis_cap);

/// All multi-indices of degree <= max_degree in graded lexicographic order
/// (by total degree, then lexicographically with earlier coordinates ranked
/// higher). The order is the canonical indexing used by every coefficient
/// table and LP matrix in this library.
std::vector<MultiIndex> basis(int dimension, int max_degree,
                              std::uint64_t cap = default_basis_cap);

/// Normalized probabilist's Hermite polynomial h_k(x), orthonormal under
/// N(0,1). Evaluated with the three-term recurrence
///   h_{k+1} = (x h_k - sqrt(k) h_{k-1}) / sqrt(k+1),
/// which is stable far past the degrees where the explicit factorial sum
/// loses precision.
double evaluate(int k, double x);

/// h_0(x) .. h_{max_degree}(x) in one recurrence pass; out.size() must be
/// max_degree + 1.
void evaluate_all(int max_degree, double x, std::span<double> out);

/// Product form h_a(x) = prod_i h_{a_i}(x_i). Throws on shape mismatch.
double evaluate(const MultiIndex& a, const Vector& x);

/// E_{x ~ N(mu, variance)}[h_k(x)] for k = 0..max_degree. Uses the scaled
/// recurrence m_{k+1} = (mu m_k - sqrt(k) (1 - variance) m_{k-1}) / sqrt(k+1),
/// which stays finite at variance = 1 (value mu^k / sqrt(k!)) and reduces to
/// plain evaluation at variance = 0.
void gaussian_moments_1d(int max_degree, double mu, double variance, std::span<double> out);

/// Coefficients (or moments) indexed by the graded-lex Hermite basis of a
/// fixed dimension and max degree.
class CoefficientTable {
 public:
  CoefficientTable() = default;
  CoefficientTable(int dimension, int max_degree,
                   std::uint64_t cap = default_basis_cap);

  int dimension() const { return dimension_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return basis_.size(); }
  const std::vector<MultiIndex>& indices() const { return basis_; }

  double value(std::size_t i) const { return values_[i]; }
  double& value(std::size_t i) { return values_[i]; }
  double at(const MultiIndex& a) const;
  double& at(const MultiIndex& a);
  std::size_t position(const MultiIndex& a) const;

 private:
  int dimension_ = 0;
  int max_degree_ = 0;
  std::vector<MultiIndex> basis_;
  std::vector<double> values_;
  std::map<MultiIndex, std::size_t> index_;
};

/// Diagonal action of the Gaussian noise operator on Hermite coefficients:
/// the entry at multi-index a picks up a factor rho^{|a|}. Requires
/// rho in (0, 1).
CoefficientTable ou_transform(const CoefficientTable& table, double rho);

}  // namespace gmmsq::hermite
