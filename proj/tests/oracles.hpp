// Test-only reference implementations, kept deliberately naive and
// independent of the library code paths they are used to check.

#ifndef HDFLIP_TESTS_ORACLES_HPP
#define HDFLIP_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hdflip/hdstats.hpp"

namespace oracles {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Deterministic test-data source, separate from the library RNG.
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double gauss() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

  MatrixXd matrix(int rows, int cols) {
    MatrixXd X(rows, cols);
    for (int c = 0; c < cols; ++c)
      for (int r = 0; r < rows; ++r) X(r, c) = gauss();
    return X;
  }
  VectorXd vector(int len) {
    VectorXd v(len);
    for (int i = 0; i < len; ++i) v(i) = gauss();
    return v;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Residual maker via per-basis-vector least squares (QR), independent of the
// library's Cholesky route: column i of R is the residual of e_i on Z.
inline MatrixXd residual_maker(const MatrixXd& Z) {
  const int n = static_cast<int>(Z.rows());
  MatrixXd R(n, n);
  if (Z.cols() == 0) return MatrixXd::Identity(n, n);
  Eigen::ColPivHouseholderQR<MatrixXd> qr(Z);
  for (int i = 0; i < n; ++i) {
    VectorXd e = VectorXd::Zero(n);
    e(i) = 1.0;
    R.col(i) = e - Z * qr.solve(e);
  }
  return R;
}

// Index-by-index scatter of a block into a full-size zero matrix.
inline MatrixXd embed(int full, const std::vector<int>& rows, const MatrixXd& block) {
  MatrixXd out = MatrixXd::Zero(full, full);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows.size(); ++c)
      out(rows[r], rows[c]) = block(static_cast<int>(r), static_cast<int>(c));
  return out;
}

inline VectorXd standardize(const VectorXd& t) {
  const double norm = std::sqrt(t.dot(t));
  if (norm <= 1e-12) return VectorXd::Zero(t.size());
  return t / norm;
}

// Literal full-matrix residual maker of one split for variable j: zero unless
// j is selected, otherwise the residual maker of the test-row block embedded
// at the test rows.
inline MatrixXd split_residual_maker(const hdflip::DesignData& data,
                                     const hdflip::Split& split, int j) {
  const int n = static_cast<int>(data.n());
  const bool selected =
      std::find(split.selected.begin(), split.selected.end(), j) !=
      split.selected.end();
  if (!selected) return MatrixXd::Zero(n, n);

  std::vector<int> rows(split.test_rows.begin(), split.test_rows.end());
  MatrixXd Z(static_cast<int>(rows.size()),
             static_cast<int>(split.selected.size()) - 1);
  int out_col = 0;
  for (int v : split.selected) {
    if (v == j) continue;
    for (std::size_t r = 0; r < rows.size(); ++r)
      Z(static_cast<int>(r), out_col) = data.X(rows[r], v);
    ++out_col;
  }
  return embed(n, rows, residual_maker(Z));
}

// Literal implementation of the exact method: materializes every n x n
// matrix, sums the per-split effective scores, standardizes columnwise.
inline MatrixXd exact_stats(const hdflip::DesignData& data,
                            const hdflip::SplitPlan& plan,
                            const hdflip::FlipSet& flips) {
  const int n = static_cast<int>(data.n());
  const int m = static_cast<int>(data.m());
  const int B = flips.B;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));

  MatrixXd G = MatrixXd::Zero(B, m);
  for (int j = 0; j < m; ++j) {
    std::vector<MatrixXd> makers;
    for (const hdflip::Split& split : plan.splits)
      makers.push_back(split_residual_maker(data, split, j));

    for (int b = 0; b < B; ++b) {
      const MatrixXd F = MatrixXd(flips.signs.col(b).asDiagonal());
      VectorXd u = VectorXd::Zero(n);
      for (const MatrixXd& R : makers) u += scale * R * F * R * data.X.col(j);
      G(b, j) = standardize(u).dot(data.Y);
    }
  }
  return G;
}

// Literal implementation of the approximate method: sums the residual maker
// matrices first, then computes one overall score per transformation.
inline MatrixXd approx_stats(const hdflip::DesignData& data,
                             const hdflip::SplitPlan& plan,
                             const hdflip::FlipSet& flips) {
  const int n = static_cast<int>(data.n());
  const int m = static_cast<int>(data.m());
  const int B = flips.B;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));

  MatrixXd G = MatrixXd::Zero(B, m);
  for (int j = 0; j < m; ++j) {
    MatrixXd Rbar = MatrixXd::Zero(n, n);
    for (const hdflip::Split& split : plan.splits)
      Rbar += split_residual_maker(data, split, j);

    for (int b = 0; b < B; ++b) {
      const MatrixXd F = MatrixXd(flips.signs.col(b).asDiagonal());
      const VectorXd v = scale * Rbar * F * Rbar * data.X.col(j);
      G(b, j) = standardize(v).dot(data.Y);
    }
  }
  return G;
}

// Student t density, for the quadrature-based CDF check.
inline double t_density(double x, double df) {
  const double c = std::exp(std::lgamma((df + 1.0) / 2.0) -
                            std::lgamma(df / 2.0)) /
                   std::sqrt(df * 3.14159265358979323846);
  return c * std::pow(1.0 + x * x / df, -(df + 1.0) / 2.0);
}

inline double simpson(double a, double b, double df, int intervals) {
  const double h = (b - a) / intervals;
  double sum = t_density(a, df) + t_density(b, df);
  for (int i = 1; i < intervals; ++i)
    sum += t_density(a + i * h, df) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// Two-sided p-value by quadrature: 2 * (0.5 - integral of the density from 0
// to |t|).
inline double t_two_sided_pvalue(double t, double df) {
  const double at = std::abs(t);
  return 1.0 - 2.0 * simpson(0.0, at, df, 20000);
}

// Exhaustive closed-testing TDP bound within S: for each nonempty U, check
// every superset V of U inside S by recomputing the subset decision from
// scratch; the bound is |S| minus the largest U whose intersection survives.
// `reject_subset` decides one local test.
template <typename RejectFn>
int closed_tdp(int s, const RejectFn& reject_subset) {
  const unsigned full = (1u << s) - 1u;
  std::vector<char> local(full + 1, 0);
  for (unsigned mask = 1; mask <= full; ++mask) local[mask] = reject_subset(mask);

  int largest_surviving = 0;
  for (unsigned u = 1; u <= full; ++u) {
    bool all_rejected = true;
    for (unsigned v = 1; v <= full; ++v) {
      if ((v & u) != u) continue;  // not a superset
      if (!local[v]) {
        all_rejected = false;
        break;
      }
    }
    if (!all_rejected) {
      int size = 0;
      for (int i = 0; i < s; ++i)
        if (u & (1u << i)) ++size;
      largest_surviving = std::max(largest_surviving, size);
    }
  }
  return s - largest_surviving;
}

}  // namespace oracles

#endif  // HDFLIP_TESTS_ORACLES_HPP
