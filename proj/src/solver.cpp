#include "scsr1/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "scsr1/errors.hpp"

namespace scsr1 {

std::string_view to_string(Norm norm) {
  return norm == Norm::p2 ? "p2" : "pinf";
}

Norm parse_norm(std::string_view text) {
  if (text == "p2") return Norm::p2;
  if (text == "pinf") return Norm::pinf;
  throw InvalidInput("unknown norm '" + std::string(text) + "'");
}

std::string_view to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::interior: return "interior";
    case CaseTag::boundary_newton: return "boundary-newton";
    case CaseTag::singular_zero: return "singular-zero";
    case CaseTag::hard_case: return "hard-case";
    case CaseTag::pinf_componentwise: return "pinf-componentwise";
  }
  return "unknown";
}

PerpSolution solve_vperp(double gamma, double g_perp_norm, double delta,
                         double zero_tol) {
  const bool g_perp_zero = g_perp_norm <= zero_tol;
  if (gamma > 0.0 && g_perp_norm <= delta * std::abs(gamma)) {
    return {PerpCase::scale_g_by_inv_gamma, 0.0};
  }
  if (gamma <= 0.0 && g_perp_zero) {
    // ‖g⊥‖ = 0: the multiplier only has to lift γ to zero
    return {PerpCase::e_i_direction, -gamma};
  }
  return {PerpCase::scale_g_to_boundary, g_perp_norm / delta - gamma};
}

VectorXd solve_vpar_pinf(const VectorXd& lambda, const VectorXd& g_par,
                         double delta) {
  if (lambda.size() != g_par.size()) {
    throw InvalidInput("solve_vpar_pinf: length mismatch");
  }
  const double gtol = kZeroGradTol * g_par.norm();
  VectorXd v(lambda.size());
  for (Index i = 0; i < lambda.size(); ++i) {
    const double lam = lambda(i);
    const double g = g_par(i);
    const bool g_zero = std::abs(g) <= gtol;
    const double sgn = g > 0.0 ? 1.0 : -1.0;
    if (lam > kClusterTol && std::abs(g / lam) <= delta) {
      v(i) = -g / lam;
    } else if (std::abs(lam) <= kClusterTol) {
      v(i) = g_zero ? 0.0 : -sgn * delta;
    } else if (g_zero) {
      v(i) = delta;  // λ < 0, g = 0: either end of the interval
    } else {
      v(i) = -sgn * delta;
    }
  }
  return v;
}

SecularSpectrum build_secular(const VectorXd& lambda, const VectorXd& g_par) {
  if (lambda.size() != g_par.size()) {
    throw InvalidInput("build_secular: length mismatch");
  }
  const double gtol = kZeroGradTol * g_par.norm();
  std::vector<double> lam_bar;
  std::vector<double> a_bar;
  Index i = 0;
  while (i < lambda.size()) {
    const double head = lambda(i);
    const double tol = kClusterTol * std::max(1.0, std::abs(head));
    double weight = 0.0;
    while (i < lambda.size() && lambda(i) - head <= tol) {
      if (std::abs(g_par(i)) > gtol) weight += g_par(i) * g_par(i);
      ++i;
    }
    if (weight > 0.0) {
      lam_bar.push_back(head);
      a_bar.push_back(std::sqrt(weight));
    }
  }
  SecularSpectrum out;
  out.lam_bar = Eigen::Map<const VectorXd>(lam_bar.data(),
                                           static_cast<Index>(lam_bar.size()));
  out.a_bar = Eigen::Map<const VectorXd>(a_bar.data(),
                                         static_cast<Index>(a_bar.size()));
  return out;
}

namespace {

struct PhiEval {
  double value = 0.0;
  double slope = 0.0;
  bool at_pole = false;
};

double pole_tol(double lam) { return 1e-13 * std::max(1.0, std::abs(lam)); }

// ‖v(σ)‖ and φ'(σ) with the terms rescaled by the largest |āᵢ/(λ̄ᵢ + σ)| so
// that nothing overflows close to a pole.
PhiEval evaluate(double sigma, const SecularSpectrum& s, double delta) {
  PhiEval e;
  double big = 0.0;
  for (Index i = 0; i < s.ell(); ++i) {
    const double t = s.lam_bar(i) + sigma;
    if (t == 0.0) {
      e.at_pole = true;
      break;
    }
    big = std::max(big, s.a_bar(i) / std::abs(t));
  }
  if (e.at_pole || std::isinf(big)) {
    e.value = -1.0 / delta;
    e.at_pole = true;
    return e;
  }
  double sum = 0.0;
  double dsum = 0.0;
  for (Index i = 0; i < s.ell(); ++i) {
    const double t = s.lam_bar(i) + sigma;
    const double u = s.a_bar(i) / std::abs(t) / big;
    sum += u * u;
    dsum += u * u / t;
  }
  const double vnorm = big * std::sqrt(sum);
  e.value = 1.0 / vnorm - 1.0 / delta;
  e.slope = dsum / (big * sum * std::sqrt(sum));
  return e;
}

}  // namespace

double phi(double sigma, const SecularSpectrum& spectrum, double delta) {
  if (spectrum.ell() == 0) return std::numeric_limits<double>::infinity();
  return evaluate(sigma, spectrum, delta).value;
}

NewtonResult newton_secular(const SecularSpectrum& spectrum, double delta,
                            double lambda_min) {
  NewtonResult out;
  out.sigma = std::max(0.0, -lambda_min);
  if (spectrum.ell() == 0) return out;

  const double lam1 = spectrum.lam_bar(0);
  const double guard = pole_tol(lam1);
  auto eval = [&](double sigma) {
    if (sigma + lam1 <= guard) {
      // at (or within rounding of) the leftmost pole: φ = −1/δ and the
      // one-sided slope tends to 1/ā₁
      PhiEval e;
      e.value = -1.0 / delta;
      e.slope = 1.0 / spectrum.a_bar(0);
      e.at_pole = true;
      return e;
    }
    return evaluate(sigma, spectrum, delta);
  };

  const double eps = std::numeric_limits<double>::epsilon();
  PhiEval e = eval(out.sigma);
  const double stop = eps * std::abs(e.value) + std::sqrt(eps);
  bool polish = false;
  while (true) {
    if (!e.at_pole) {
      // from the left φ < 0; a positive value means rounding put us on the root
      if (e.value >= 0.0 || polish) return out;
      // The test alone leaves |‖v‖ − δ| up to δ²√eps; one more step squares
      // that error.
      if (std::abs(e.value) <= stop) polish = true;
    }
    if (out.iterations >= kNewtonMaxIters) {
      throw ConvergenceFailure("secular Newton iteration did not converge",
                               out.sigma);
    }
    const double step = -e.value / e.slope;
    if (!std::isfinite(step)) {
      throw ConvergenceFailure("secular Newton step is not finite", out.sigma);
    }
    double next = out.sigma + step;
    if (next + lam1 <= guard) next = -lam1 + 2.0 * guard;
    if (!(next > out.sigma)) return out;  // stalled at working precision
    out.sigma = next;
    ++out.iterations;
    e = eval(out.sigma);
  }
}

ParSolution solve_vpar_p2(const VectorXd& lambda, const VectorXd& g_par,
                          double delta, int r_mult) {
  const Index m = lambda.size();
  if (g_par.size() != m) throw InvalidInput("solve_vpar_p2: length mismatch");
  ParSolution out;
  if (m == 0) {
    out.v_par.resize(0);
    return out;
  }
  const int r = std::clamp(r_mult, 1, static_cast<int>(m));
  const double gtol = kZeroGradTol * g_par.norm();
  auto g_zero = [&](Index i) { return std::abs(g_par(i)) <= gtol; };
  bool block_zero = true;
  for (Index i = 0; i < r; ++i) block_zero = block_zero && g_zero(i);

  // v(σ) = −(Λ + σI)⁻¹g∥, with zero components of g∥ mapped to zero (the
  // pseudo-inverse on the λ₁ block when σ = −λ₁)
  auto v_of = [&](double sigma) {
    VectorXd v(m);
    for (Index i = 0; i < m; ++i) {
      v(i) = g_zero(i) ? 0.0 : -g_par(i) / (lambda(i) + sigma);
    }
    return v;
  };

  const double lam1 = lambda(0);
  if (lam1 > kClusterTol) {
    VectorXd v0 = v_of(0.0);
    if (v0.norm() <= delta) {
      out.v_par = std::move(v0);
      out.case_tag = CaseTag::interior;
      return out;
    }
  } else if (lam1 >= -kClusterTol) {
    if (block_zero) {
      VectorXd v0 = v_of(0.0);
      if (v0.norm() <= delta) {
        out.v_par = std::move(v0);
        out.case_tag = CaseTag::singular_zero;
        return out;
      }
    }
  } else if (block_zero) {
    VectorXd vh = v_of(-lam1);
    const double vh_norm = vh.norm();
    if (vh_norm <= delta) {
      out.alpha = std::sqrt(std::max(0.0, delta * delta - vh_norm * vh_norm));
      vh(0) += out.alpha;
      out.v_par = std::move(vh);
      out.sigma_par = -lam1;
      out.case_tag = CaseTag::hard_case;
      return out;
    }
  }

  const NewtonResult nr =
      newton_secular(build_secular(lambda, g_par), delta, lam1);
  out.sigma_par = nr.sigma;
  out.newton_iters = nr.iterations;
  out.v_par = v_of(nr.sigma);
  out.case_tag = CaseTag::boundary_newton;
  return out;
}

VectorXd assemble_p(const SpectralFactors& factors, const VectorXd& v_par,
                    PerpCase w_case, const VectorXd& g,
                    const ProjectedGradient& pg, double delta) {
  const Index n = factors.dim();
  const Index rank = factors.rank();
  if (v_par.size() != rank) throw InvalidInput("assemble_p: v_par length");
  if (g.size() != n) throw InvalidInput("assemble_p: gradient length");

  VectorXd w;
  switch (w_case) {
    case PerpCase::scale_g_by_inv_gamma:
      w = -g / factors.gamma();
      break;
    case PerpCase::scale_g_to_boundary:
      w = -(delta / pg.g_perp_norm) * g;
      break;
    case PerpCase::e_i_direction: {
      if (n == rank) {
        w = VectorXd::Zero(n);  // P⊥ is empty
        break;
      }
      // Among the first m'+2 coordinates some eᵢ has ‖P⊥ᵀeᵢ‖² >= 2/(m'+2);
      // take the first one reasonably far from range(P∥).
      const Index limit = std::min<Index>(n, rank + 2);
      const double wanted =
          0.5 * std::sqrt(2.0 / static_cast<double>(rank + 2));
      Index pick = 0;
      double pick_norm = -1.0;
      for (Index i = 0; i < limit; ++i) {
        const double e = factors.eperp_norm(i);
        if (e > pick_norm) {
          pick = i;
          pick_norm = e;
        }
        if (e > wanted) break;
      }
      w = VectorXd::Zero(n);
      w(pick) = delta / pick_norm;
      break;
    }
  }
  VectorXd p = w;
  if (rank > 0) p += factors.pll_mv(v_par - factors.pll_tmv(w));
  return p;
}

SubproblemSolution solve(const SpectralFactors& factors,
                         const ProjectedGradient& pg, const VectorXd& g,
                         double delta, Norm norm) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw InvalidInput("solve: delta must be positive and finite");
  }
  if (g.size() != factors.dim() || pg.g_par.size() != factors.rank()) {
    throw InvalidInput("solve: gradient does not match the factors");
  }
  if (!g.allFinite()) throw InvalidInput("solve: non-finite gradient");

  SubproblemSolution sol;
  sol.norm = norm;
  const PerpSolution perp =
      solve_vperp(factors.gamma(), pg.g_perp_norm, delta, kZeroPerpTol * pg.g_norm);
  sol.w_case = perp.w_case;
  sol.sigma_perp = perp.sigma_perp;

  if (norm == Norm::p2) {
    ParSolution par =
        solve_vpar_p2(factors.lambda(), pg.g_par, delta, factors.r_mult());
    sol.v_par = std::move(par.v_par);
    sol.sigma_par = par.sigma_par;
    sol.case_tag = par.case_tag;
    sol.newton_iters = par.newton_iters;
    sol.alpha = par.alpha;
  } else {
    sol.v_par = solve_vpar_pinf(factors.lambda(), pg.g_par, delta);
    sol.case_tag = CaseTag::pinf_componentwise;
  }
  sol.p = assemble_p(factors, sol.v_par, sol.w_case, g, pg, delta);
  return sol;
}

double sc_norm(const SpectralFactors& factors, const VectorXd& p, Norm which) {
  const VectorXd pp = factors.pll_tmv(p);
  double par = 0.0;
  if (pp.size() > 0) {
    par = which == Norm::p2 ? pp.norm() : pp.lpNorm<Eigen::Infinity>();
  }
  const double perp = std::sqrt(std::max(0.0, p.squaredNorm() - pp.squaredNorm()));
  return std::max(par, perp);
}

double q_par(const VectorXd& lambda, const VectorXd& g_par, const VectorXd& v) {
  return g_par.dot(v) + 0.5 * v.dot(lambda.cwiseProduct(v));
}

}  // namespace scsr1
