#ifndef HDFLIP_COMBINE_HPP
#define HDFLIP_COMBINE_HPP

#include <vector>

#include "hdflip/hdstats.hpp"
#include "hdflip/scoreflip.hpp"

namespace hdflip {

// Combining function g over a subset's per-variable |statistics|. Increasing
// in each argument by construction (max, sum, or a nonnegative weighted sum
// with at least one positive weight).
struct Combiner {
  enum class Kind { Max, Sum, WeightedSum };
  Kind kind = Kind::Max;
  Vector weights;  // WeightedSum only; one weight per subset member

  static Combiner max() { return {Kind::Max, {}}; }
  static Combiner sum() { return {Kind::Sum, {}}; }
  static Combiner weighted_sum(Vector w);
};

struct SubsetResult {
  std::vector<int> subset;  // 0-based variable indices
  Vector combined;          // B combined statistics, entry 0 observed
  TestDecision decision;
};

struct MaxTResult {
  Vector adjusted_p;          // per variable
  std::vector<int> rejected;  // 0-based, ascending
  bool step_down = false;
};

// Entry b = g(|G_b,j1|, ..., |G_b,js|) for the subset S (0-based indices).
// Throws Error(EmptySubset) / Error(IndexOutOfRange).
Vector combine(const StatMatrix& G, const std::vector<int>& S,
               const Combiner& g);

// Flip-test decision rule applied to the combined statistics (already on the
// absolute scale).
SubsetResult subset_test(const StatMatrix& G, const std::vector<int>& S,
                         const Combiner& g, double alpha);

// Single-step maxT adjusted p-values: p_j = #{b : max_k |G_bk| >= |G_1j|}/B,
// rejecting when p_j <= floor(alpha B)/B. With `step_down`, the
// Westfall-Young free step-down refinement (maxima over shrinking tail sets,
// monotonicity enforced).
MaxTResult maxt_adjusted(const StatMatrix& G, double alpha,
                         bool step_down = false);

// Lower (1-alpha)-confidence bound for the number of active variables in S,
// by brute-force closed testing restricted to subsets of S (a conservative
// restriction). |S| is capped at 20; beyond that throws Error(SubsetTooLarge).
int closed_testing_tdp(const StatMatrix& G, const std::vector<int>& S,
                       const Combiner& g, double alpha);

}  // namespace hdflip

#endif  // HDFLIP_COMBINE_HPP
