#ifndef HDFLIP_HDSTATS_HPP
#define HDFLIP_HDSTATS_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hdflip/linalg.hpp"
#include "hdflip/scoreflip.hpp"
#include "hdflip/selection.hpp"

namespace hdflip {

// Response and fixed design, possibly high-dimensional (m >> n).
struct DesignData {
  Matrix X;  // n x m
  Vector Y;  // n
  std::vector<std::string> names;  // optional column names, size m when present

  Index n() const { return X.rows(); }
  Index m() const { return X.cols(); }
};

// One data split: fit rows drive selection, test rows drive the statistics.
struct Split {
  IndexList fit_rows;   // D_in
  IndexList test_rows;  // D_out
  SelectedSet selected;  // A^q, sorted ascending
};

// Q splits plus their selections, reproducible from `seed`. Selections are
// capped at floor(|D_out|/2) so the per-split projections stay well-posed.
struct SplitPlan {
  Index n = 0;
  std::vector<Split> splits;
  std::uint64_t seed = 0;
};

// B x m matrix of standardized statistics; rows are transformations (row 0
// observed), columns are variables. Columns of variables never selected are
// identically zero.
struct StatMatrix {
  enum class Method { Exact, Approximate };
  Matrix values;  // B x m
  Method method = Method::Exact;

  int B() const { return static_cast<int>(values.rows()); }
  Index m() const { return values.cols(); }
};

// Peak scratch memory used by a statistics build, for the documented
// memory-contract instrumentation of the approximate method.
struct MemoryStats {
  std::size_t peak_workspace_bytes_per_thread = 0;
};

// Draws Q uniform partitions of {1..n} into halves (fit half gets the extra
// observation when n is odd) and runs the selector on the fit half only.
// Split randomness and selection randomness come from independent streams of
// `seed`.
SplitPlan make_splits(Index n, int Q, const Selector& selector,
                      const DesignData& data, std::uint64_t seed);

// Exact method: for each variable j and transformation b, the statistic is
// the standardized sum over splits of per-split effective scores, the
// per-split residual makers being applied on their test-row blocks. Columns
// are independent; `threads` > 1 parallelizes over them with identical
// results.
StatMatrix exact_stats(const DesignData& data, const SplitPlan& plan,
                       const FlipSet& flips, int threads = 1);

// Approximate method: per variable, the per-split residual makers are summed
// into a single accumulated matrix first and one overall score is computed
// per transformation. Scratch memory stays within a constant number of n x n
// matrices per thread (reported through `memory` when given).
StatMatrix approx_stats(const DesignData& data, const SplitPlan& plan,
                        const FlipSet& flips, int threads = 1,
                        MemoryStats* memory = nullptr);

// CSV serialization of a statistic matrix: header row of 1-based variable
// indices, then B data rows.
std::string stat_matrix_to_csv(const StatMatrix& G);
StatMatrix stat_matrix_from_csv(const std::string& csv,
                                StatMatrix::Method method);

}  // namespace hdflip

#endif  // HDFLIP_HDSTATS_HPP
