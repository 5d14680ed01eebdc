#pragma once

#include <cstddef>
#include <vector>

namespace nbch {

/// Pairwise sum with a fixed recursion topology: the result depends only on
/// the index range and the term values, never on thread count or scheduling.
/// Every reduction in the library goes through this so that runs are bitwise
/// reproducible.
template <class F>
double pairwise_sum(std::size_t lo, std::size_t hi, F&& term) {
  const std::size_t n = hi - lo;
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += term(k);
    return s;
  }
  const std::size_t mid = lo + n / 2;
  return pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term);
}

/// Two-stage deterministic reduction: row terms evaluated in parallel into a
/// dense buffer, then combined by a serial pairwise sum. Identical result for
/// any number of threads.
template <class RowF>
double rows_sum(std::size_t nrows, RowF&& row) {
  std::vector<double> partial(nrows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < std::ptrdiff_t(nrows); ++j)
    partial[std::size_t(j)] = row(std::size_t(j));
  return pairwise_sum(0, nrows, [&](std::size_t j) { return partial[j]; });
}

}  // namespace nbch
