#pragma once

// Kernels for the small (order <= memory bound + 1) symmetric matrices that
// sit in the middle of the compact representation. Nothing here is meant for
// n x n work.

#include <vector>

#include <Eigen/Dense>

namespace scsr1::dense {

/// Ascending eigenvalues and matching orthonormal eigenvectors (as columns).
/// Each column is signed so that its largest-magnitude entry is positive.
struct EigResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Throws InvalidInput for non-square, non-finite or visibly unsymmetric input.
EigResult sym_eig(const Eigen::MatrixXd& a);

/// Upper-triangular R with RᵀR = A and positive diagonal.
/// Throws RankDeficient(j) when pivot j satisfies R(j,j)² <= 1e-14·max diag(A).
Eigen::MatrixXd cholesky(const Eigen::MatrixXd& a);

/// Relative pivot size below which cholesky() reports rank deficiency.
inline constexpr double kCholeskyRankTol = 1e-14;

/// Symmetric-indefinite LDLᵀ factorization with Bunch–Kaufman pivoting.
/// D has 1x1 and 2x2 diagonal blocks; works for indefinite middle matrices.
class SymIndefiniteFactor {
 public:
  /// Throws SingularMatrix when a pivot block is singular relative to
  /// `singular_tol`·max|A(i,j)|.
  explicit SymIndefiniteFactor(const Eigen::MatrixXd& a,
                               double singular_tol = 1e-13);

  Eigen::Index order() const { return lower_.rows(); }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  /// Number of negative eigenvalues of A (Sylvester's law of inertia).
  int negative_count() const;

 private:
  Eigen::MatrixXd lower_;       // unit lower-triangular L
  Eigen::MatrixXd block_diag_;  // D, tridiagonal storage
  std::vector<int> block_size_;  // 1 or 2 at the leading index of each block
  std::vector<Eigen::Index> perm_;
};

/// Solves A x = b for symmetric, possibly indefinite A.
/// Throws SingularMatrix when A is singular to tolerance.
Eigen::VectorXd solve_sym(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

/// A⁻¹ through the symmetric-indefinite factorization, symmetrized.
Eigen::MatrixXd inverse_sym(const Eigen::MatrixXd& a);

/// R⁻¹ b for upper-triangular R.
Eigen::VectorXd solve_upper(const Eigen::MatrixXd& r, const Eigen::VectorXd& b);
/// R⁻ᵀ b for upper-triangular R.
Eigen::VectorXd solve_upper_transposed(const Eigen::MatrixXd& r,
                                       const Eigen::VectorXd& b);

/// Largest absolute entry, 0 for an empty matrix.
double max_abs(const Eigen::MatrixXd& a);

}  // namespace scsr1::dense
