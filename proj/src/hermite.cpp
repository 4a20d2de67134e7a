#include "gmmsq/hermite.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace gmmsq::hermite {

int degree(const MultiIndex& a) { return std::accumulate(a.begin(), a.end(), 0); }

std::uint64_t basis_size(int dimension, int max_degree, std::uint64_t cap) {
  if (dimension < 1) throw ParameterError("basis_size: dimension must be >= 1");
  if (max_degree < 0) throw ParameterError("basis_size: max degree must be >= 0");
  // C(m + t, t) accumulated as product (m + j) / j, checked against the cap.
  long double count = 1.0L;
  for (int j = 1; j <= max_degree; ++j) {
    count *= static_cast<long double>(dimension + j) / static_cast<long double>(j);
    if (count > 4.0L * static_cast<long double>(cap)) break;
  }
  const std::uint64_t n = static_cast<std::uint64_t>(std::llroundl(count));
  if (n > cap) {
    throw ParameterError("basis_size: C(m+t,t) = " + std::to_string(n) +
                         " exceeds cap " + std::to_string(cap) +
                         "; use smaller dimension or degree");
  }
  return n;
}

namespace {

void emit_compositions(int remaining, int slots, MultiIndex& scratch,
                       std::vector<MultiIndex>& out) {
  if (slots == 1) {
    scratch.push_back(remaining);
    out.push_back(scratch);
    scratch.pop_back();
    return;
  }
  for (int head = remaining; head >= 0; --head) {
    scratch.push_back(head);
    emit_compositions(remaining - head, slots - 1, scratch, out);
    scratch.pop_back();
  }
}

}  // namespace

std::vector<MultiIndex> basis(int dimension, int max_degree, std::uint64_t cap) {
  const std::uint64_t n = basis_size(dimension, max_degree, cap);
  std::vector<MultiIndex> out;
  out.reserve(n);
  MultiIndex scratch;
  for (int deg = 0; deg <= max_degree; ++deg) {
    emit_compositions(deg, dimension, scratch, out);
  }
  return out;
}

double evaluate(int k, double x) {
  if (k < 0) throw ParameterError("hermite::evaluate: negative degree");
  double prev = 1.0;  // h_0
  if (k == 0) return prev;
  double cur = x;  // h_1
  for (int j = 1; j < k; ++j) {
    const double next = (x * cur - std::sqrt(static_cast<double>(j)) * prev) /
                        std::sqrt(static_cast<double>(j + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

void evaluate_all(int max_degree, double x, std::span<double> out) {
  if (static_cast<int>(out.size()) != max_degree + 1) {
    throw ParameterError("hermite::evaluate_all: output span has wrong length");
  }
  out[0] = 1.0;
  if (max_degree == 0) return;
  out[1] = x;
  for (int j = 1; j < max_degree; ++j) {
    out[j + 1] = (x * out[j] - std::sqrt(static_cast<double>(j)) * out[j - 1]) /
                 std::sqrt(static_cast<double>(j + 1));
  }
}

void gaussian_moments_1d(int max_degree, double mu, double variance, std::span<double> out) {
  if (static_cast<int>(out.size()) != max_degree + 1) {
    throw ParameterError("gaussian_moments_1d: output span has wrong length");
  }
  const double rho2 = 1.0 - variance;
  out[0] = 1.0;
  if (max_degree == 0) return;
  out[1] = mu;
  for (int j = 1; j < max_degree; ++j) {
    out[j + 1] = (mu * out[j] - std::sqrt(static_cast<double>(j)) * rho2 * out[j - 1]) /
                 std::sqrt(static_cast<double>(j + 1));
  }
}

double evaluate(const MultiIndex& a, const Vector& x) {
  if (static_cast<Eigen::Index>(a.size()) != x.size()) {
    throw ParameterError("hermite::evaluate: multi-index length " +
                         std::to_string(a.size()) + " does not match point dimension " +
                         std::to_string(x.size()));
  }
  double prod = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    prod *= evaluate(a[i], x[static_cast<Eigen::Index>(i)]);
  }
  return prod;
}

CoefficientTable::CoefficientTable(int dimension, int max_degree, std::uint64_t cap)
    : dimension_(dimension), max_degree_(max_degree), basis_(basis(dimension, max_degree, cap)) {
  values_.assign(basis_.size(), 0.0);
  for (std::size_t i = 0; i < basis_.size(); ++i) index_[basis_[i]] = i;
}

std::size_t CoefficientTable::position(const MultiIndex& a) const {
  auto it = index_.find(a);
  if (it == index_.end()) {
    throw ParameterError("CoefficientTable: multi-index not in basis");
  }
  return it->second;
}

double CoefficientTable::at(const MultiIndex& a) const { return values_[position(a)]; }

double& CoefficientTable::at(const MultiIndex& a) { return values_[position(a)]; }

CoefficientTable ou_transform(const CoefficientTable& table, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw ParameterError("ou_transform: rho must lie in (0, 1)");
  }
  CoefficientTable out = table;
  // rho^deg reused across all indices of equal degree.
  std::vector<double> rho_pow(static_cast<std::size_t>(table.max_degree()) + 1, 1.0);
  for (std::size_t k = 1; k < rho_pow.size(); ++k) rho_pow[k] = rho_pow[k - 1] * rho;
  const auto& idx = table.indices();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.value(i) = table.value(i) * rho_pow[static_cast<std::size_t>(degree(idx[i]))];
  }
  return out;
}

}  // namespace gmmsq::hermite
