#pragma once

// Random experiment generator and table runner for the six (P,2) problem
// classes:
//
//   E1  B ≻ 0,                 ‖Λ⁻¹g∥‖ >= δ
//   E2  B ⪰ 0 singular,        g∥ nonzero on the λ₁ block
//   E3  B ⪰ 0 singular,        g∥ zero on the λ₁ block, ‖Λ†g∥‖ > δ
//   E4  B indefinite,          g∥ zero on the λ₁ block, ‖(Λ − λ₁I)†g∥‖ > δ
//   E5  B indefinite,          g∥ nonzero on the λ₁ block
//   E6  B indefinite,          g∥ zero on the λ₁ block, ‖v∥(−λ₁)‖ <= δ

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "scsr1/compact.hpp"
#include "scsr1/solver.hpp"
#include "scsr1/spectral.hpp"

namespace scsr1 {

enum class Experiment { e1, e2, e3, e4, e5, e6 };

std::string_view to_string(Experiment tag);
Experiment parse_experiment(std::string_view text);

struct ExperimentSpec {
  Experiment tag = Experiment::e1;
  Index n = 1000;
  int m = 5;
  int r = 2;
  std::uint64_t seed = 1;
  int trials = 1;
  Norm norm = Norm::p2;
  double gscale = 1.0;

  /// Throws InvalidInput unless n >= m + 2 and 1 <= r <= m (r < m for
  /// E3 and E4, whose critical norm would otherwise vanish).
  void validate() const;
};

inline constexpr int kMaxGenerationAttempts = 100;

/// A generated instance. The compact representation carries an explicit
/// middle matrix: after the eigenvalue overwrite it no longer equals the
/// SR1 middle of its pairs.
struct Problem {
  SpectralFactors factors;
  VectorXd g;
  double delta = 0.0;
  int attempts = 0;

  const CompactRep& rep() const { return factors.rep(); }
};

/// Builds one instance of `spec.tag` for trial `trial`. Every attempt draws
/// from its own stream of (seed, trial, attempt). Throws GenerationFailure
/// when no attempt satisfies the class predicate.
Problem generate(const ExperimentSpec& spec, int trial = 0);

/// Class predicate re-derived from the factors: sign of λ₁, multiplicity r,
/// the λ₁-block of g∥, and the δ comparison.
bool class_holds(Experiment tag, const SpectralFactors& factors,
                 const ProjectedGradient& pg, double delta, int r);

struct TableRow {
  Index n = 0;
  std::optional<double> opt1;  // empty for (P,∞)
  std::optional<double> opt2;
  double lam1_plus_sigpar = 0.0;
  double gamma_plus_sigperp = 0.0;
  double sigma_par = 0.0;
  double sigma_perp = 0.0;
  int itns = 0;
  double time_seconds = 0.0;

  std::string experiment;
  std::string norm;
  std::uint64_t seed = 0;
  int trial = 0;
  double gscale = 1.0;
  std::string case_tag;
  bool pass = false;
  std::string error;
};

/// Factorizes, solves and checks one problem. Only factorize + solve is
/// timed. (P,2) rows pass on the optimality bounds; (P,∞) rows pass on
/// branch membership, feasibility and the sign conditions on σ⊥.
TableRow evaluate(const CompactRep& rep, const VectorXd& g, double delta,
                  Norm norm);

/// One row per trial. Generation and solver errors land in the error column.
std::vector<TableRow> run(const ExperimentSpec& spec);

/// `run` repeated with g multiplied by each scale. δ follows the scaled
/// gradient, so every instance stays in its class.
std::vector<TableRow> scaled_gradient_sweep(const ExperimentSpec& spec,
                                            const std::vector<double>& scales);

enum class Format { pretty, csv };
Format parse_format(std::string_view text);

std::string emit(const std::vector<TableRow>& rows, Format format);

/// Inverse of emit(rows, Format::csv).
std::vector<TableRow> parse_csv(std::string_view text);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);
double parse_double(std::string_view text);

}  // namespace scsr1
