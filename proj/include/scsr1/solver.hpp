#pragma once

// Trust-region subproblem
//
//   minimize gᵀp + ½pᵀBp  subject to  ‖p‖_{P,2} <= δ  or  ‖p‖_{P,∞} <= δ
//
// for a compact L-SR1 matrix B. In the eigenbasis of B the problem splits
// into a small problem in v∥ = P∥ᵀp (size m') and a closed-form problem in
// v⊥ = P⊥ᵀp; the step is then assembled as p = P∥v∥ + (I − P∥P∥ᵀ)w.

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

#include "scsr1/spectral.hpp"

namespace scsr1 {

enum class Norm { p2, pinf };

std::string_view to_string(Norm norm);
Norm parse_norm(std::string_view text);

enum class CaseTag {
  interior,            // σ∥ = 0, unconstrained minimizer feasible (λ₁ > 0)
  boundary_newton,     // σ∥ from Newton on the secular equation
  singular_zero,       // λ₁ = 0, σ∥ = 0, minimum-norm pseudo-inverse step
  hard_case,           // λ₁ < 0, σ∥ = −λ₁, step completed along e₁
  pinf_componentwise,  // (P,∞) norm: closed form per component
};

std::string_view to_string(CaseTag tag);

enum class PerpCase {
  scale_g_by_inv_gamma,  // w = −g/γ
  e_i_direction,         // w = δ eᵢ / ‖P⊥ᵀeᵢ‖
  scale_g_to_boundary,   // w = −δ g / ‖g⊥‖
};

struct PerpSolution {
  PerpCase w_case = PerpCase::scale_g_by_inv_gamma;
  double sigma_perp = 0.0;
};

/// Distinct eigenvalues carrying a nonzero share of g∥:
/// ‖v∥(σ)‖² = Σ āᵢ²/(λ̄ᵢ + σ)².
struct SecularSpectrum {
  VectorXd lam_bar;  // strictly ascending
  VectorXd a_bar;    // all > 0
  Index ell() const { return lam_bar.size(); }
};

struct NewtonResult {
  double sigma = 0.0;
  int iterations = 0;
};

struct ParSolution {
  VectorXd v_par;
  double sigma_par = 0.0;
  CaseTag case_tag = CaseTag::interior;
  int newton_iters = 0;
  double alpha = 0.0;
};

struct SubproblemSolution {
  VectorXd p;
  double sigma_par = 0.0;
  double sigma_perp = 0.0;
  VectorXd v_par;
  CaseTag case_tag = CaseTag::interior;
  PerpCase w_case = PerpCase::scale_g_by_inv_gamma;
  int newton_iters = 0;
  double alpha = 0.0;
  Norm norm = Norm::p2;
};

/// A component of g∥ is treated as zero when |[g∥]ᵢ| <= this times ‖g∥‖.
inline constexpr double kZeroGradTol = 1e-12;
/// ‖g⊥‖ is treated as zero when it is <= this times ‖g‖.
inline constexpr double kZeroPerpTol = 1e-10;
inline constexpr int kNewtonMaxIters = 100;

/// Solves the full subproblem. Throws InvalidInput when δ <= 0 or the
/// gradient does not match the factors.
SubproblemSolution solve(const SpectralFactors& factors,
                         const ProjectedGradient& pg, const VectorXd& g,
                         double delta, Norm norm);

/// Closed-form v⊥ branch and multiplier σ⊥. `g_perp_norm` <= `zero_tol`
/// counts as ‖g⊥‖ = 0.
PerpSolution solve_vperp(double gamma, double g_perp_norm, double delta,
                         double zero_tol = 0.0);

/// Componentwise minimizer over |vᵢ| <= δ. Free choices: c = 0 when
/// gᵢ = λᵢ = 0, and +δ when gᵢ = 0, λᵢ < 0.
VectorXd solve_vpar_pinf(const VectorXd& lambda, const VectorXd& g_par,
                         double delta);

/// Minimizer over ‖v‖₂ <= δ for ascending Λ whose smallest eigenvalue has
/// multiplicity `r_mult`.
ParSolution solve_vpar_p2(const VectorXd& lambda, const VectorXd& g_par,
                          double delta, int r_mult);

/// Aggregates equal eigenvalues (within the cluster tolerance) and drops
/// zero-weight terms.
SecularSpectrum build_secular(const VectorXd& lambda, const VectorXd& g_par);

/// φ(σ) = 1/‖v∥(σ)‖ − 1/δ, equal to −1/δ at a pole σ = −λ̄ᵢ.
double phi(double sigma, const SecularSpectrum& spectrum, double delta);

/// Newton's method on φ from σ⁰ = max(0, −λ₁). Iterates increase
/// monotonically toward the root. Once |φ(σ)| <= eps·|φ(σ⁰)| + √eps one
/// further step is taken (and counted); rounding that stalls the iteration
/// or lands on φ >= 0 also stops it.
/// Throws ConvergenceFailure after kNewtonMaxIters steps.
NewtonResult newton_secular(const SecularSpectrum& spectrum, double delta,
                            double lambda_min);

/// p = P∥v∥ + (I − P∥P∥ᵀ)w.
VectorXd assemble_p(const SpectralFactors& factors, const VectorXd& v_par,
                    PerpCase w_case, const VectorXd& g,
                    const ProjectedGradient& pg, double delta);

/// ‖p‖_{P,2} or ‖p‖_{P,∞}.
double sc_norm(const SpectralFactors& factors, const VectorXd& p, Norm which);

/// ½vᵀΛv + gᵀv, handy for comparing candidate steps in the eigenbasis.
double q_par(const VectorXd& lambda, const VectorXd& g_par, const VectorXd& v);

}  // namespace scsr1
