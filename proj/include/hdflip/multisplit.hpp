#ifndef HDFLIP_MULTISPLIT_HPP
#define HDFLIP_MULTISPLIT_HPP

#include <cstdint>
#include <vector>

#include "hdflip/hdstats.hpp"

namespace hdflip {

// Per-split and aggregated p-values of the Multisplit baseline. Raw entries
// for non-selected variables are 1; adjusted entries are
// min(|A^q| * raw, 1); the aggregated row is the quantile aggregation below.
struct PValueTable {
  Matrix raw;         // Q x m
  Matrix adjusted;    // Q x m
  Vector aggregated;  // m
  double gamma_min = 0.05;
};

struct MultisplitResult {
  PValueTable table;
  std::vector<int> rejected;  // {j : p_j <= alpha}, 0-based ascending
};

// Two-sided OLS t-test p-values for each column of X_test in the fit of
// Y_test on [intercept, X_test]; df = |D_out| - |A| - 1. Throws
// Error(NonPositiveDf) when the fit is saturated and Error(SingularGram) on
// collinear designs.
Vector ols_pvalues(const Vector& Y_test, const Matrix& X_test);

// min(|A^q| * raw, 1), entrywise per split row.
Matrix adjust_pvalues(const Matrix& raw, const std::vector<int>& selected_counts);

// Quantile aggregation over splits:
//   p = min{1, (1 - log gamma_min) * inf_gamma Q(gamma)},
// Q(gamma) = min{1, empirical gamma-quantile of {p^q/gamma}}, the quantile
// being the ceil(gamma Q)-th smallest and the infimum evaluated on the grid
// gamma in {k/Q : ceil(gamma_min Q) <= k <= Q}.
double aggregate_pvalues(const Vector& adjusted_column, double gamma_min);

// Full pipeline: Q splits, selection on the fit half, OLS p-values on the
// test half, adjustment, aggregation, rejection at level alpha. Splits are
// drawn by the same machinery as the resampling methods, so identical seeds
// give identical partitions.
MultisplitResult multisplit_run(const DesignData& data, int Q,
                                const Selector& selector, double alpha,
                                double gamma_min, std::uint64_t seed);

}  // namespace hdflip

#endif  // HDFLIP_MULTISPLIT_HPP
