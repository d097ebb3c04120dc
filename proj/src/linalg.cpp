#include "hdflip/linalg.hpp"

#include <string>

#include "hdflip/errors.hpp"

namespace hdflip {

namespace {

// Relative pivot threshold for declaring Z'Z singular. Calibrated for double
// precision at n <= 500.
constexpr double kSingularityThreshold = 1e-12;

}  // namespace

GramSolver::GramSolver(const Matrix& Z) : Z_(Z) {
  const Index k = Z_.cols();
  if (k == 0) return;  // R is the identity; nothing to factor

  Matrix gram = Z_.transpose() * Z_;
  ldlt_.compute(gram);

  // vectorD() holds the LDLT pivots, which for a positive-definite Gram are
  // the squared Cholesky pivots; compare on that scale against the largest
  // Gram diagonal.
  const double max_diag = gram.diagonal().maxCoeff();
  const double tol = kSingularityThreshold * max_diag;
  if (max_diag <= 0.0 || ldlt_.info() != Eigen::Success ||
      ldlt_.vectorD().minCoeff() < tol) {
    throw Error(ErrorCode::SingularGram,
                "Z'Z is numerically singular (" + std::to_string(Z_.rows()) +
                    "x" + std::to_string(k) + " design)");
  }
}

Vector GramSolver::residuals(const Vector& v) const {
  if (Z_.cols() == 0) return v;
  return v - Z_ * ldlt_.solve(Z_.transpose() * v);
}

Vector GramSolver::solve_gram(const Vector& b) const {
  return ldlt_.solve(b);
}

Vector GramSolver::gram_inverse_diagonal() const {
  const Index k = Z_.cols();
  Matrix inv = ldlt_.solve(Matrix::Identity(k, k));
  return inv.diagonal();
}

Matrix GramSolver::hat() const {
  const Index n = Z_.rows();
  if (Z_.cols() == 0) return Matrix::Zero(n, n);
  return Z_ * ldlt_.solve(Z_.transpose());
}

Matrix residual_maker(const Matrix& Z) {
  const Index n = Z.rows();
  if (Z.cols() == 0) return Matrix::Identity(n, n);
  if (Z.cols() > n) {
    throw Error(ErrorCode::SingularGram,
                "more columns than rows: Z'Z cannot be invertible");
  }
  GramSolver solver(Z);
  return Matrix::Identity(n, n) - solver.hat();
}

Matrix embed_block(Index full_size, const IndexList& rows, const Matrix& block) {
  if (block.rows() != block.cols() ||
      block.rows() != static_cast<Index>(rows.size())) {
    throw Error(ErrorCode::DimensionMismatch,
                "block must be square with one row per listed index");
  }
  for (Index r : rows) {
    if (r < 0 || r >= full_size) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "index " + std::to_string(r) + " outside [0, " +
                      std::to_string(full_size) + ")");
    }
  }
  Matrix out = Matrix::Zero(full_size, full_size);
  const Index d = block.rows();
  for (Index c = 0; c < d; ++c)
    for (Index r = 0; r < d; ++r) out(rows[r], rows[c]) = block(r, c);
  return out;
}

}  // namespace hdflip
