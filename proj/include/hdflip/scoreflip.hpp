#ifndef HDFLIP_SCOREFLIP_HPP
#define HDFLIP_SCOREFLIP_HPP

#include <cstdint>

#include "hdflip/linalg.hpp"

namespace hdflip {

// B diagonal sign-flipping transformations, stored as sign vectors (columns
// of `signs`, entries in {-1,+1}). Column 0 is the identity transformation
// (all +1); the rest are i.i.d. uniform signs, reproducible from `seed`.
struct FlipSet {
  Index n = 0;
  int B = 0;
  Matrix signs;  // n x B
  std::uint64_t seed = 0;
};

FlipSet make_flips(Index n, int B, std::uint64_t seed);

// Outcome of the resampling decision rule: reject when the observed
// statistic strictly exceeds the ceil((1-alpha)B)-th smallest of the B
// statistics. The p-value counts all b with stat_b >= stat_1 (including
// b = 1, so p >= 1/B); rejecting at level alpha is equivalent to
// p <= floor(alpha B)/B.
struct TestDecision {
  double statistic_observed = 0.0;
  int critical_index = 0;  // 1-based rank ceil((1-alpha)B)
  double critical_value = 0.0;
  double pvalue = 1.0;
  bool reject = false;
};

// Effective scores for variable j (0-based): entry b is
//   (1/sqrt(n)) X_j' R F_b R Y
// with R the residual maker of the design without column j. Entry 0 is the
// observed score. Low-dimensional use: requires the reduced design to have a
// nonsingular Gram (throws Error(SingularGram) otherwise).
Vector effective_scores(const Matrix& X, const Vector& Y, Index j,
                        const FlipSet& flips);

// Standardized scores: entry b is t_b' Y / ||t_b|| with t_b = R (f_b . R X_j),
// and 0 where ||t_b|| vanishes. These are the statistics whose flip test is
// exact at any sample size.
Vector standardized_scores(const Matrix& X, const Vector& Y, Index j,
                           const FlipSet& flips);

// t / ||t||, or the zero vector when ||t|| <= 1e-12.
Vector standardize(const Vector& t);

// Decision rule applied to B statistics already on the absolute scale;
// stats[0] is the observed one.
TestDecision flip_test(const Vector& abs_stats, double alpha);

}  // namespace hdflip

#endif  // HDFLIP_SCOREFLIP_HPP
