#include "hdflip/multisplit.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hdflip/errors.hpp"
#include "hdflip/tdist.hpp"

namespace hdflip {

namespace {

Matrix with_intercept(const Matrix& X) {
  Matrix D(X.rows(), X.cols() + 1);
  D.col(0).setOnes();
  D.rightCols(X.cols()) = X;
  return D;
}

}  // namespace

Vector ols_pvalues(const Vector& Y_test, const Matrix& X_test) {
  const Index n = X_test.rows();
  const Index k = X_test.cols();
  if (Y_test.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "X rows and Y length differ");
  }
  const double df = static_cast<double>(n - k - 1);
  if (df <= 0.0) {
    throw Error(ErrorCode::NonPositiveDf,
                "OLS with " + std::to_string(k) + " regressors + intercept on " +
                    std::to_string(n) + " observations leaves no df");
  }

  const Matrix D = with_intercept(X_test);
  GramSolver solver(D);
  const Vector beta = solver.solve_gram(D.transpose() * Y_test);
  const double rss = (Y_test - D * beta).squaredNorm();
  const double sigma2 = rss / df;
  const Vector inv_diag = solver.gram_inverse_diagonal();

  Vector pvalues(k);
  for (Index j = 0; j < k; ++j) {
    const double se = std::sqrt(sigma2 * inv_diag(j + 1));
    if (se == 0.0) {
      // Degenerate exact fit: a zero estimate carries no evidence, anything
      // else is infinitely significant.
      pvalues(j) = beta(j + 1) == 0.0 ? 1.0 : 0.0;
      continue;
    }
    pvalues(j) = t_two_sided_pvalue(beta(j + 1) / se, df);
  }
  return pvalues;
}

Matrix adjust_pvalues(const Matrix& raw, const std::vector<int>& selected_counts) {
  if (static_cast<Index>(selected_counts.size()) != raw.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "one selection count per split");
  }
  Matrix adjusted = raw;
  for (Index q = 0; q < raw.rows(); ++q) {
    const double count = static_cast<double>(selected_counts[static_cast<std::size_t>(q)]);
    adjusted.row(q) = (raw.row(q) * count).cwiseMin(1.0);
  }
  return adjusted;
}

double aggregate_pvalues(const Vector& adjusted_column, double gamma_min) {
  const int Q = static_cast<int>(adjusted_column.size());
  if (Q < 1) throw Error(ErrorCode::InvalidConfig, "need at least one split");
  if (!(gamma_min > 0.0 && gamma_min < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "gamma_min must lie in (0, 1)");
  }

  std::vector<double> sorted(adjusted_column.data(), adjusted_column.data() + Q);
  std::sort(sorted.begin(), sorted.end());

  // The empirical gamma-quantile (ceil(gamma Q)-th smallest) is piecewise
  // constant in gamma, so the infimum over (gamma_min, 1) is attained on the
  // grid gamma = k/Q; the division by gamma moves inside the quantile.
  const int k_min = static_cast<int>(
      std::ceil(gamma_min * static_cast<double>(Q) - 1e-9));
  double infimum = 1.0;
  for (int k = std::max(1, k_min); k <= Q; ++k) {
    const double gamma = static_cast<double>(k) / static_cast<double>(Q);
    const double value = std::min(1.0, sorted[static_cast<std::size_t>(k) - 1] / gamma);
    infimum = std::min(infimum, value);
  }
  return std::min(1.0, (1.0 - std::log(gamma_min)) * infimum);
}

MultisplitResult multisplit_run(const DesignData& data, int Q,
                                const Selector& selector, double alpha,
                                double gamma_min, std::uint64_t seed) {
  const Index m = data.m();
  SplitPlan plan = make_splits(data.n(), Q, selector, data, seed);

  MultisplitResult result;
  result.table.gamma_min = gamma_min;
  result.table.raw = Matrix::Ones(Q, m);  // non-selected variables keep p = 1

  std::vector<int> selected_counts(static_cast<std::size_t>(Q), 0);
  for (int q = 0; q < Q; ++q) {
    const Split& split = plan.splits[static_cast<std::size_t>(q)];
    selected_counts[static_cast<std::size_t>(q)] =
        static_cast<int>(split.selected.size());
    if (split.selected.empty()) continue;

    Matrix X_test(static_cast<Index>(split.test_rows.size()),
                  static_cast<Index>(split.selected.size()));
    Vector Y_test(static_cast<Index>(split.test_rows.size()));
    for (std::size_t r = 0; r < split.test_rows.size(); ++r) {
      Y_test(static_cast<Index>(r)) = data.Y(split.test_rows[r]);
      for (std::size_t c = 0; c < split.selected.size(); ++c)
        X_test(static_cast<Index>(r), static_cast<Index>(c)) =
            data.X(split.test_rows[r], split.selected[c]);
    }

    const Vector pvals = ols_pvalues(Y_test, X_test);
    for (std::size_t c = 0; c < split.selected.size(); ++c)
      result.table.raw(q, split.selected[c]) = pvals(static_cast<Index>(c));
  }

  result.table.adjusted = adjust_pvalues(result.table.raw, selected_counts);
  result.table.aggregated.resize(m);
  for (Index j = 0; j < m; ++j) {
    result.table.aggregated(j) =
        aggregate_pvalues(result.table.adjusted.col(j), gamma_min);
  }
  for (Index j = 0; j < m; ++j)
    if (result.table.aggregated(j) <= alpha)
      result.rejected.push_back(static_cast<int>(j));
  return result;
}

}  // namespace hdflip
