#include "hdflip/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hdflip/errors.hpp"

namespace hdflip {

namespace {

constexpr double kCoefficientTolerance = 1e-7;
constexpr int kMaxSweeps = 100000;
constexpr int kGridPoints = 100;
constexpr double kGridFloor = 1e-4;  // smallest lambda, relative to lambda_max

double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

// Columns centered and scaled to norm sqrt(n); Y centered. Constant columns
// get scale 0 and are frozen at coefficient 0.
struct Standardized {
  Matrix X;
  Vector Y;
  Vector scale;  // per-column; 0 marks a dropped (constant) column
};

Standardized standardize_design(const Matrix& X, const Vector& Y) {
  const Index n = X.rows();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  Standardized s;
  s.X = X;
  s.scale = Vector::Zero(X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    s.X.col(j).array() -= s.X.col(j).mean();
    const double norm = s.X.col(j).norm();
    if (norm > 1e-12) {
      s.X.col(j) *= sqrt_n / norm;
      s.scale(j) = sqrt_n / norm;
    } else {
      s.X.col(j).setZero();
    }
  }
  s.Y = Y.array() - Y.mean();
  return s;
}

}  // namespace

SelectedSet oracle_select(const std::vector<int>& truly_active, int m, int extra,
                          int capacity, Rng& rng) {
  const int want = static_cast<int>(truly_active.size()) + extra;
  if (want > capacity) {
    throw Error(ErrorCode::CapacityExceeded,
                "oracle asked for " + std::to_string(want) +
                    " variables, capacity " + std::to_string(capacity));
  }
  std::vector<bool> taken(m, false);
  SelectedSet out = truly_active;
  for (int j : out) taken[j] = true;

  std::vector<int> complement;
  complement.reserve(m - out.size());
  for (int j = 0; j < m; ++j)
    if (!taken[j]) complement.push_back(j);

  // Partial Fisher-Yates: draw `extra` indices without replacement.
  for (int i = 0; i < extra; ++i) {
    const std::size_t pick =
        i + static_cast<std::size_t>(rng.below(complement.size() - i));
    std::swap(complement[i], complement[pick]);
    out.push_back(complement[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> default_lambda_grid(const Matrix& X, const Vector& Y) {
  Standardized s = standardize_design(X, Y);
  const double n = static_cast<double>(X.rows());
  const double lambda_max = (s.X.transpose() * s.Y).cwiseAbs().maxCoeff() / n;
  std::vector<double> grid(kGridPoints);
  const double log_max = std::log(lambda_max);
  const double log_min = std::log(lambda_max * kGridFloor);
  for (int i = 0; i < kGridPoints; ++i) {
    grid[i] = std::exp(log_max + (log_min - log_max) * i / (kGridPoints - 1));
  }
  return grid;
}

LassoPath lasso_path(const Matrix& X, const Vector& Y,
                     const std::vector<double>& lambdas) {
  if (Y.size() != X.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "X rows and Y length differ");
  }
  Standardized s = standardize_design(X, Y);
  const Index n = X.rows();
  const Index m = X.cols();
  const double dn = static_cast<double>(n);

  LassoPath path;
  path.lambdas = lambdas;
  path.coefficients.reserve(lambdas.size());

  Vector beta = Vector::Zero(m);
  Vector residual = s.Y;
  for (double lambda : lambdas) {
    int sweep = 0;
    double max_change;
    do {
      max_change = 0.0;
      for (Index j = 0; j < m; ++j) {
        if (s.scale(j) == 0.0) continue;
        const double old = beta(j);
        // Standardized columns have X_j'X_j/n = 1, so the update is a plain
        // soft-threshold of the partial correlation.
        const double z = old + s.X.col(j).dot(residual) / dn;
        const double updated = soft_threshold(z, lambda);
        if (updated != old) {
          residual += s.X.col(j) * (old - updated);
          beta(j) = updated;
          max_change = std::max(max_change, std::abs(updated - old));
        }
      }
      if (++sweep > kMaxSweeps) {
        throw Error(ErrorCode::NoConvergence,
                    "coordinate descent exceeded " +
                        std::to_string(kMaxSweeps) + " sweeps at lambda=" +
                        std::to_string(lambda));
      }
    } while (max_change >= kCoefficientTolerance);
    path.coefficients.push_back(beta);
  }
  return path;
}

SelectedSet lasso_select(const Matrix& X, const Vector& Y, int k) {
  const Index n = X.rows();
  if (k < 1 || 2 * static_cast<Index>(k) > n) {
    throw Error(ErrorCode::CapacityExceeded,
                "target cardinality " + std::to_string(k) +
                    " violates |A| <= n/2 with n=" + std::to_string(n));
  }

  LassoPath path = lasso_path(X, Y, default_lambda_grid(X, Y));

  // Largest lambda whose support reaches k; fall back to the largest support
  // attained anywhere on the grid.
  auto support_of = [](const Vector& beta) {
    SelectedSet support;
    for (Index j = 0; j < beta.size(); ++j)
      if (beta(j) != 0.0) support.push_back(static_cast<int>(j));
    return support;
  };

  std::size_t chosen = 0;
  std::size_t best_size = 0;
  bool reached = false;
  for (std::size_t i = 0; i < path.coefficients.size(); ++i) {
    const std::size_t size = support_of(path.coefficients[i]).size();
    if (size >= static_cast<std::size_t>(k)) {
      chosen = i;
      reached = true;
      break;
    }
    if (size > best_size) {
      best_size = size;
      chosen = i;
    }
  }

  SelectedSet support = support_of(path.coefficients[chosen]);
  if (reached && support.size() > static_cast<std::size_t>(k)) {
    // Trim overshoot, keeping the k coefficients of largest magnitude.
    const Vector& beta = path.coefficients[chosen];
    std::stable_sort(support.begin(), support.end(), [&](int a, int b) {
      return std::abs(beta(a)) > std::abs(beta(b));
    });
    support.resize(k);
  }
  std::sort(support.begin(), support.end());
  return support;
}

Selector make_oracle_selector(std::vector<int> truly_active, int extra) {
  return [truly_active = std::move(truly_active), extra](
             const Matrix& X_fit, const Vector&, int capacity, Rng& rng) {
    return oracle_select(truly_active, static_cast<int>(X_fit.cols()), extra,
                         capacity, rng);
  };
}

Selector make_lasso_selector(int target_k) {
  return [target_k](const Matrix& X_fit, const Vector& Y_fit, int capacity,
                    Rng&) {
    const int k = std::min(target_k, capacity);
    return lasso_select(X_fit, Y_fit, k);
  };
}

}  // namespace hdflip
