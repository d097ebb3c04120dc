#ifndef HDFLIP_SELECTION_HPP
#define HDFLIP_SELECTION_HPP

#include <functional>
#include <vector>

#include "hdflip/linalg.hpp"
#include "hdflip/rng.hpp"

namespace hdflip {

// Variable indices (0-based) picked by a selection procedure. Sparsity is
// enforced at the call sites that know the relevant capacity.
using SelectedSet = std::vector<int>;

// A selection procedure run on the fitting half of a split. `capacity` is the
// largest admissible selection for that split; the Rng carries the selection
// randomness stream (procedures without randomness ignore it).
using Selector = std::function<SelectedSet(
    const Matrix& X_fit, const Vector& Y_fit, int capacity, Rng& rng)>;

// The simulation oracle: always returns `truly_active` plus `extra` further
// indices drawn uniformly without replacement from the complement.
// `capacity` is the sparsity cap (at most half the fitting sample);
// violating it throws Error(CapacityExceeded).
SelectedSet oracle_select(const std::vector<int>& truly_active, int m, int extra,
                          int capacity, Rng& rng);

// Lasso solutions of (1/2n)||Y - X beta||^2 + lambda ||beta||_1 along a
// decreasing lambda grid, by coordinate descent with warm starts. Columns are
// standardized internally to mean 0 and norm sqrt(n); Y is centered.
// Coefficients are reported on the standardized scale. Throws
// Error(NoConvergence) if any grid point exceeds the iteration cap.
struct LassoPath {
  std::vector<double> lambdas;  // decreasing
  std::vector<Vector> coefficients;
};

LassoPath lasso_path(const Matrix& X, const Vector& Y,
                     const std::vector<double>& lambdas);

// 100-point logarithmic grid from lambda_max down to 1e-4 lambda_max.
std::vector<double> default_lambda_grid(const Matrix& X, const Vector& Y);

// Cardinality-calibrated Lasso selection: the support at the largest grid
// lambda reaching size >= k, trimmed to the k largest |coefficients| on
// overshoot. Returns min(k, largest attained support) indices.
SelectedSet lasso_select(const Matrix& X, const Vector& Y, int k);

// Ready-made Selectors for the split machinery. Targets exceeding the
// per-split capacity are clamped to it.
Selector make_oracle_selector(std::vector<int> truly_active, int extra);
Selector make_lasso_selector(int target_k);

}  // namespace hdflip

#endif  // HDFLIP_SELECTION_HPP
