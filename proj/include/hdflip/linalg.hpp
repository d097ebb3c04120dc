#ifndef HDFLIP_LINALG_HPP
#define HDFLIP_LINALG_HPP

#include <Eigen/Dense>
#include <vector>

namespace hdflip {

// Dense, column-major (Eigen default) throughout. All values are immutable
// after construction and safe to share across threads.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;

// Factorization of Z'Z used to apply the residual-maker operator
// R = I - Z (Z'Z)^-1 Z' without materializing it. Construction throws
// Error(SingularGram) when a Cholesky pivot of Z'Z falls below
// 1e-12 x (largest Gram diagonal), which signals collinear columns.
class GramSolver {
 public:
  explicit GramSolver(const Matrix& Z);

  Index rows() const { return Z_.rows(); }
  Index cols() const { return Z_.cols(); }

  // R v, i.e. the OLS residuals of v regressed on Z.
  Vector residuals(const Vector& v) const;

  // (Z'Z)^-1 b.
  Vector solve_gram(const Vector& b) const;

  // Diagonal of (Z'Z)^-1, for OLS standard errors.
  Vector gram_inverse_diagonal() const;

  // Hat matrix H = Z (Z'Z)^-1 Z'.
  Matrix hat() const;

 private:
  Matrix Z_;
  Eigen::LDLT<Matrix> ldlt_;
};

// Residual maker matrix R = I - Z (Z'Z)^-1 Z'. Z may have zero columns, in
// which case R is the identity. R is symmetric, idempotent, and annihilates
// the columns of Z.
Matrix residual_maker(const Matrix& Z);

// Scatters `block` into an otherwise-zero full_size x full_size matrix at the
// rows/columns listed in `rows`. Throws Error(IndexOutOfRange) when an index
// exceeds full_size.
Matrix embed_block(Index full_size, const IndexList& rows, const Matrix& block);

}  // namespace hdflip

#endif  // HDFLIP_LINALG_HPP
