#pragma once

// Implicit eigendecomposition of a compact L-SR1 matrix,
//
//   B = P diag(Λ, γI) Pᵀ,   P = [P∥ P⊥],   P∥ = Ψ R⁻¹ U,
//
// where RᵀR = ΨᵀΨ (Cholesky of the Gram matrix) and R M Rᵀ = U Λ̂ Uᵀ with
// Λ = Λ̂ + γI. Only products with P∥ are available; P⊥ enters through the
// orthogonality of P.
//
// Linearly dependent columns of Ψ are pruned greedily: the column whose
// Cholesky pivot collapses is dropped, and M is reduced to the kept columns
// with the same represented B, so m' = rank(Ψ) can be smaller than m.

#include <vector>

#include <Eigen/Dense>

#include "scsr1/compact.hpp"

namespace scsr1 {

/// Eigenvalues within this relative distance of λ₁ count toward its
/// multiplicity; also the threshold for treating λ₁ as zero.
inline constexpr double kClusterTol = 1e-10;

/// g∥ = P∥ᵀg and ‖g⊥‖ = ‖P⊥ᵀg‖.
struct ProjectedGradient {
  VectorXd g_par;
  double g_perp_norm = 0.0;
  double g_norm = 0.0;
};

class SpectralFactors {
 public:
  const CompactRep& rep() const { return rep_; }
  Index dim() const { return rep_.dim(); }
  /// m', the number of kept Ψ columns.
  Index rank() const { return lambda_.size(); }
  double gamma() const { return rep_.gamma(); }

  /// λ₁ <= ... <= λ_{m'}.
  const VectorXd& lambda() const { return lambda_; }
  const MatrixXd& r_factor() const { return r_; }
  const MatrixXd& u() const { return u_; }
  const std::vector<Index>& kept_columns() const { return kept_; }
  /// Middle matrix restricted to the kept columns.
  const MatrixXd& reduced_middle() const { return reduced_middle_; }
  /// Multiplicity of λ₁ (0 when m' = 0).
  int r_mult() const { return r_mult_; }

  /// P∥ᵀx = Uᵀ R⁻ᵀ Ψᵀx.
  VectorXd pll_tmv(const VectorXd& x) const;
  /// P∥v = Ψ R⁻¹ U v.
  VectorXd pll_mv(const VectorXd& v) const;
  ProjectedGradient project_gradient(const VectorXd& g) const;
  /// ‖P⊥ᵀeᵢ‖ = √(1 − ‖P∥ᵀeᵢ‖²), 0-based i.
  double eperp_norm(Index i) const;

  /// Dense n×m' P∥. Test and debug use only.
  MatrixXd p_par_dense() const;

 private:
  friend SpectralFactors factorize(const CompactRep& rep);
  explicit SpectralFactors(CompactRep rep) : rep_(std::move(rep)) {}

  VectorXd gather(const VectorXd& full) const;

  CompactRep rep_;
  std::vector<Index> kept_;
  MatrixXd r_;
  MatrixXd u_;
  MatrixXd reduced_middle_;
  VectorXd lambda_;
  int r_mult_ = 0;
};

/// O(m³) given the cached Gram matrices; no pass over n.
SpectralFactors factorize(const CompactRep& rep);

}  // namespace scsr1
