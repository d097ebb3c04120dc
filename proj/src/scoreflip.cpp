#include "hdflip/scoreflip.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hdflip/errors.hpp"
#include "hdflip/rng.hpp"

namespace hdflip {

namespace {

constexpr double kZeroNormTolerance = 1e-12;

Matrix drop_column(const Matrix& X, Index j) {
  Matrix Z(X.rows(), X.cols() - 1);
  if (j > 0) Z.leftCols(j) = X.leftCols(j);
  if (j + 1 < X.cols()) Z.rightCols(X.cols() - j - 1) = X.rightCols(X.cols() - j - 1);
  return Z;
}

void check_score_inputs(const Matrix& X, const Vector& Y, Index j,
                        const FlipSet& flips) {
  if (Y.size() != X.rows() || flips.n != X.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "X, Y and flips must share the same number of observations");
  }
  if (j < 0 || j >= X.cols()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "variable index " + std::to_string(j) + " outside design");
  }
}

}  // namespace

FlipSet make_flips(Index n, int B, std::uint64_t seed) {
  if (B < 1) {
    throw Error(ErrorCode::InvalidB,
                "need at least one transformation, got B=" + std::to_string(B));
  }
  FlipSet flips;
  flips.n = n;
  flips.B = B;
  flips.seed = seed;
  flips.signs.resize(n, B);
  flips.signs.col(0).setOnes();  // F_1 is the identity
  Rng rng(derive_seed(seed, stream::kFlips));
  for (int b = 1; b < B; ++b)
    for (Index i = 0; i < n; ++i) flips.signs(i, b) = rng.sign();
  return flips;
}

Vector effective_scores(const Matrix& X, const Vector& Y, Index j,
                        const FlipSet& flips) {
  check_score_inputs(X, Y, j, flips);
  const Index n = X.rows();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));

  GramSolver solver(drop_column(X, j));
  const Vector rx = solver.residuals(X.col(j));
  const Vector ry = solver.residuals(Y);

  // t_b' Y = (1/sqrt(n)) (f_b . R X_j)' R Y by symmetry of R.
  Vector scores(flips.B);
  for (int b = 0; b < flips.B; ++b)
    scores(b) = scale * flips.signs.col(b).cwiseProduct(rx).dot(ry);
  return scores;
}

Vector standardized_scores(const Matrix& X, const Vector& Y, Index j,
                           const FlipSet& flips) {
  check_score_inputs(X, Y, j, flips);
  const Index n = X.rows();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));

  GramSolver solver(drop_column(X, j));
  const Vector rx = solver.residuals(X.col(j));

  Vector scores(flips.B);
  for (int b = 0; b < flips.B; ++b) {
    const Vector t = scale * solver.residuals(flips.signs.col(b).cwiseProduct(rx));
    const double norm = t.norm();
    scores(b) = norm <= kZeroNormTolerance ? 0.0 : t.dot(Y) / norm;
  }
  return scores;
}

Vector standardize(const Vector& t) {
  const double norm = t.norm();
  if (norm <= kZeroNormTolerance) return Vector::Zero(t.size());
  return t / norm;
}

TestDecision flip_test(const Vector& abs_stats, double alpha) {
  const int B = static_cast<int>(abs_stats.size());
  if (B < 1) throw Error(ErrorCode::InvalidB, "empty statistic vector");
  if (alpha < 0.0 || alpha >= 1.0) {
    throw Error(ErrorCode::InvalidConfig, "alpha must lie in [0, 1)");
  }

  std::vector<double> sorted(abs_stats.data(), abs_stats.data() + B);
  std::sort(sorted.begin(), sorted.end());

  TestDecision decision;
  decision.statistic_observed = abs_stats(0);
  decision.critical_index =
      static_cast<int>(std::ceil((1.0 - alpha) * static_cast<double>(B)));
  decision.critical_value = sorted[decision.critical_index - 1];
  decision.reject = decision.statistic_observed > decision.critical_value;

  int count_ge = 0;
  for (int b = 0; b < B; ++b)
    if (abs_stats(b) >= decision.statistic_observed) ++count_ge;
  decision.pvalue = static_cast<double>(count_ge) / static_cast<double>(B);
  return decision;
}

}  // namespace hdflip
