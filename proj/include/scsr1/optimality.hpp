#pragma once

// Global-optimality checks for the (P,2) subproblem. A feasible p* is a
// global solution iff there are σ∥, σ⊥ >= 0 with
//
//   (B + C∥)p* + g = 0,   C∥ = σ⊥I + (σ∥ − σ⊥)P∥P∥ᵀ,
//   σ∥(‖P∥ᵀp*‖ − δ) = 0,  σ⊥(‖P⊥ᵀp*‖ − δ) = 0,
//   B + C∥ positive semidefinite  ⇔  λᵢ + σ∥ >= 0, γ + σ⊥ >= 0.

#include <Eigen/Dense>

#include "scsr1/compact.hpp"
#include "scsr1/solver.hpp"
#include "scsr1/spectral.hpp"

namespace scsr1 {

struct OptimalityReport {
  double opt1 = 0.0;  // ‖(B + C∥)p + g‖₂
  double opt2 = 0.0;  // |σ∥(‖P∥ᵀp‖ − δ)| + |σ⊥(‖P⊥ᵀp‖ − δ)|
  double lam1_plus_sigpar = 0.0;
  double gamma_plus_sigperp = 0.0;
  double sigma_par = 0.0;
  double sigma_perp = 0.0;
  bool feasible_par = true;
  bool feasible_perp = true;

  /// opt1 <= 1e-8·max(1, ‖g‖), opt2 <= 1e-8·max(1, δ), both multipliers
  /// nonnegative, both curvature sums >= −1e-10, and p feasible.
  bool meets_bounds(double g_norm, double delta) const;
};

inline constexpr double kOpt1RelTol = 1e-8;
inline constexpr double kOpt2RelTol = 1e-8;
inline constexpr double kCurvatureTol = 1e-10;
inline constexpr double kFeasibilityTol = 1e-9;

/// Residuals computed with implicit products only. When m' = 0 the λ₁ + σ∥
/// column reports σ∥ alone.
OptimalityReport check(const CompactRep& rep, const SpectralFactors& factors,
                       const VectorXd& g, double delta,
                       const SubproblemSolution& sol);

/// True iff every component of v∥ lies on a valid branch of the
/// componentwise (P,∞) solution, to 1e-10·max(1, δ).
bool check_pinf(const VectorXd& lambda, const VectorXd& g_par, double delta,
                const VectorXd& v_par);
inline bool check_pinf(const SpectralFactors& factors, const VectorXd& g_par,
                       double delta, const VectorXd& v_par) {
  return check_pinf(factors.lambda(), g_par, delta, v_par);
}

struct OracleSolution {
  VectorXd p;
  double q = 0.0;  // gᵀp + ½pᵀBp
};

/// Dense reference solver for the (P,2) subproblem: splits Rⁿ into
/// range(P∥) and its complement, then solves each two-norm problem by a full
/// eigendecomposition and bisection on ‖v(σ)‖ = δ (explicit step in the hard
/// case). Intended for n up to a few hundred.
OracleSolution oracle_solve_p2(const MatrixXd& b_dense,
                               const MatrixXd& p_par_dense, const VectorXd& g,
                               double delta);

/// Two-norm trust-region minimizer of gᵀx + ½xᵀHx over ‖x‖ <= δ by dense
/// eigendecomposition and bisection.
VectorXd dense_trust_region(const MatrixXd& h, const VectorXd& g, double delta);

}  // namespace scsr1
