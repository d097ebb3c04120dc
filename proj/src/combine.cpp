#include "hdflip/combine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "hdflip/errors.hpp"

namespace hdflip {

namespace {

void check_subset(const StatMatrix& G, const std::vector<int>& S) {
  if (S.empty()) throw Error(ErrorCode::EmptySubset, "subset must be nonempty");
  for (int j : S) {
    if (j < 0 || j >= G.m()) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "subset index " + std::to_string(j) + " outside 0.." +
                      std::to_string(G.m() - 1));
    }
  }
}

}  // namespace

Combiner Combiner::weighted_sum(Vector w) {
  if (w.size() == 0 || !(w.array() >= 0.0).all() || !w.allFinite() ||
      w.maxCoeff() <= 0.0) {
    throw Error(ErrorCode::InvalidConfig,
                "weights must be finite, nonnegative and not all zero");
  }
  Combiner g;
  g.kind = Kind::WeightedSum;
  g.weights = std::move(w);
  return g;
}

Vector combine(const StatMatrix& G, const std::vector<int>& S,
               const Combiner& g) {
  check_subset(G, S);
  if (g.kind == Combiner::Kind::WeightedSum &&
      g.weights.size() != static_cast<Index>(S.size())) {
    throw Error(ErrorCode::DimensionMismatch,
                "need one weight per subset member");
  }

  const int B = G.B();
  Vector combined(B);
  for (int b = 0; b < B; ++b) {
    double value;
    switch (g.kind) {
      case Combiner::Kind::Max: {
        value = 0.0;
        for (int j : S) value = std::max(value, std::abs(G.values(b, j)));
        break;
      }
      case Combiner::Kind::Sum: {
        value = 0.0;
        for (int j : S) value += std::abs(G.values(b, j));
        break;
      }
      case Combiner::Kind::WeightedSum: {
        value = 0.0;
        for (std::size_t i = 0; i < S.size(); ++i)
          value += g.weights(static_cast<Index>(i)) * std::abs(G.values(b, S[i]));
        break;
      }
    }
    combined(b) = value;
  }
  return combined;
}

SubsetResult subset_test(const StatMatrix& G, const std::vector<int>& S,
                         const Combiner& g, double alpha) {
  SubsetResult result;
  result.subset = S;
  std::sort(result.subset.begin(), result.subset.end());
  result.combined = combine(G, S, g);
  // Combined statistics are already on the absolute scale; no second
  // absolute value before the decision rule.
  result.decision = flip_test(result.combined, alpha);
  return result;
}

MaxTResult maxt_adjusted(const StatMatrix& G, double alpha, bool step_down) {
  const int B = G.B();
  const Index m = G.m();
  MaxTResult result;
  result.step_down = step_down;
  result.adjusted_p.resize(m);

  Matrix abs = G.values.cwiseAbs();

  if (!step_down) {
    const Vector row_max = abs.rowwise().maxCoeff();
    for (Index j = 0; j < m; ++j) {
      int count = 0;
      for (int b = 0; b < B; ++b)
        if (row_max(b) >= abs(0, j)) ++count;
      result.adjusted_p(j) = static_cast<double>(count) / B;
    }
  } else {
    // Free step-down: variables in decreasing observed order; the b-th null
    // maximum is taken over the still-unrejected tail, and adjusted p-values
    // are made monotone along that order.
    std::vector<Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return abs(0, a) > abs(0, b); });

    // Running maxima over suffixes of the ordered variables.
    Matrix tail_max(B, m);
    for (Index pos = m - 1; pos >= 0; --pos) {
      const Index j = order[static_cast<std::size_t>(pos)];
      for (int b = 0; b < B; ++b) {
        const double next = pos + 1 < m ? tail_max(b, pos + 1) : 0.0;
        tail_max(b, pos) = std::max(next, abs(b, j));
      }
    }
    double running = 0.0;
    for (Index pos = 0; pos < m; ++pos) {
      const Index j = order[static_cast<std::size_t>(pos)];
      int count = 0;
      for (int b = 0; b < B; ++b)
        if (tail_max(b, pos) >= abs(0, j)) ++count;
      running = std::max(running, static_cast<double>(count) / B);
      result.adjusted_p(j) = running;
    }
  }

  const double threshold =
      std::floor(alpha * static_cast<double>(B)) / static_cast<double>(B);
  for (Index j = 0; j < m; ++j)
    if (result.adjusted_p(j) <= threshold)
      result.rejected.push_back(static_cast<int>(j));
  return result;
}

int closed_testing_tdp(const StatMatrix& G, const std::vector<int>& S,
                       const Combiner& g, double alpha) {
  check_subset(G, S);
  const int s = static_cast<int>(S.size());
  if (s > 20) {
    throw Error(ErrorCode::SubsetTooLarge,
                "closed testing enumerates 2^|S| subsets; |S| = " +
                    std::to_string(s) + " exceeds 20");
  }
  std::vector<int> members(S);
  std::sort(members.begin(), members.end());

  const std::uint32_t full = (1u << s) - 1u;

  // Local rejection of every nonempty V within S.
  std::vector<char> rejected(static_cast<std::size_t>(full) + 1, 0);
  std::vector<int> subset;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    subset.clear();
    for (int i = 0; i < s; ++i)
      if (mask & (1u << i)) subset.push_back(members[static_cast<std::size_t>(i)]);
    rejected[mask] = subset_test(G, subset, g, alpha).decision.reject ? 1 : 0;
  }

  // Closed-test rejection of U: every V with U <= V <= S rejected locally.
  // Subset-sum sweep: AND each mask with its immediate supersets.
  std::vector<char> closed(rejected);
  for (int i = 0; i < s; ++i) {
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      if (!(mask & (1u << i)))
        closed[mask] = static_cast<char>(closed[mask] & closed[mask | (1u << i)]);
    }
  }

  // Bound: |S| minus the largest subset whose intersection hypothesis
  // survives the closed test.
  int largest_surviving = 0;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    if (!closed[mask])
      largest_surviving = std::max(largest_surviving, __builtin_popcount(mask));
  }
  return s - largest_surviving;
}

}  // namespace hdflip
