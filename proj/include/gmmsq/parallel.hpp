#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace gmmsq::par {

inline constexpr std::size_t default_block = 8192;

/// Deterministic parallel sum: the index range is split into fixed-size
/// blocks, block partials are reduced in index order. The result does not
/// depend on the number of threads.
template <class TermFn>
double blocked_sum(std::size_t n, TermFn&& term, std::size_t block = default_block) {
  if (n == 0) return 0.0;
  const std::size_t nblocks = (n + block - 1) / block;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * block;
    const std::size_t hi = lo + block < n ? lo + block : n;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

/// Serial reference for blocked_sum (plain left-to-right accumulation).
template <class TermFn>
double serial_sum(std::size_t n, TermFn&& term) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += term(i);
  return s;
}

/// Deterministic parallel sum and sum of squares in one pass; feeds
/// mean/stderr computations of the Monte Carlo estimators.
template <class TermFn>
std::pair<double, double> blocked_sum_sumsq(std::size_t n, TermFn&& term,
                                            std::size_t block = default_block) {
  if (n == 0) return {0.0, 0.0};
  const std::size_t nblocks = (n + block - 1) / block;
  std::vector<double> ps(nblocks, 0.0), pss(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * block;
    const std::size_t hi = lo + block < n ? lo + block : n;
    double s = 0.0, ss = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double v = term(i);
      s += v;
      ss += v * v;
    }
    ps[static_cast<std::size_t>(b)] = s;
    pss[static_cast<std::size_t>(b)] = ss;
  }
  double s = 0.0, ss = 0.0;
  for (std::size_t b = 0; b < nblocks; ++b) {
    s += ps[b];
    ss += pss[b];
  }
  return {s, ss};
}

template <class TermFn>
std::pair<double, double> serial_sum_sumsq(std::size_t n, TermFn&& term) {
  double s = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = term(i);
    s += v;
    ss += v * v;
  }
  return {s, ss};
}

/// Deterministic per-block work: fn(block_index, begin, end) fills disjoint
/// output ranges, so scheduling cannot change the result.
template <class BlockFn>
void blocked_apply(std::size_t n, BlockFn&& fn, std::size_t block = default_block) {
  if (n == 0) return;
  const std::size_t nblocks = (n + block - 1) / block;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * block;
    const std::size_t hi = lo + block < n ? lo + block : n;
    fn(static_cast<std::size_t>(b), lo, hi);
  }
}

template <class BlockFn>
void serial_apply(std::size_t n, BlockFn&& fn, std::size_t block = default_block) {
  if (n == 0) return;
  const std::size_t nblocks = (n + block - 1) / block;
  for (std::size_t b = 0; b < nblocks; ++b) {
    const std::size_t lo = b * block;
    const std::size_t hi = lo + block < n ? lo + block : n;
    fn(b, lo, hi);
  }
}

}  // namespace gmmsq::par
