#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "scsr1/errors.hpp"
#include "scsr1/optimality.hpp"
#include "scsr1/solver.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using scsr1::CaseTag;
using scsr1::Norm;
using scsr1::PerpCase;

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

scsr1::SubproblemSolution solve_full(const scsr1::SpectralFactors& f, const VectorXd& g,
                                     double delta, Norm norm) {
  return scsr1::solve(f, f.project_gradient(g), g, delta, norm);
}

TEST(Solve, ZeroGradientOnSpdMatrix) {
  oracle::Rng rng(1);
  const auto f = scsr1::factorize(build::rep_with_spectrum(10, vec({1, 2, 3}), 2.0, rng));
  const auto sol = solve_full(f, VectorXd::Zero(10), 1.0, Norm::p2);
  EXPECT_EQ(sol.p.norm(), 0.0);
  EXPECT_EQ(sol.sigma_par, 0.0);
  EXPECT_EQ(sol.sigma_perp, 0.0);
  EXPECT_EQ(sol.case_tag, CaseTag::interior);
}

TEST(Solve, DiagonalExampleInterior) {
  const auto f = scsr1::factorize(build::diag21());
  const auto sol = solve_full(f, vec({3, 4}), 10.0, Norm::p2);
  EXPECT_LE((sol.p - vec({-1.5, -4})).norm(), 1e-14);
  EXPECT_NEAR(sol.v_par(0), -1.5, 1e-15);
  EXPECT_EQ(sol.w_case, PerpCase::scale_g_by_inv_gamma);
  EXPECT_EQ(sol.case_tag, CaseTag::interior);
}

TEST(Solve, DiagonalExampleOnBoundary) {
  const auto f = scsr1::factorize(build::diag21());
  const auto sol = solve_full(f, vec({3, 4}), 0.1, Norm::p2);
  EXPECT_LE((sol.p - vec({-0.1, -0.1})).norm(), 1e-13);
  EXPECT_NEAR(sol.sigma_par, 28.0, 1e-9);
  EXPECT_NEAR(sol.sigma_perp, 39.0, 1e-12);  // 4/(1 + σ⊥) = 0.1
  EXPECT_EQ(sol.case_tag, CaseTag::boundary_newton);
  EXPECT_EQ(sol.w_case, PerpCase::scale_g_to_boundary);
  EXPECT_NEAR(scsr1::sc_norm(f, sol.p, Norm::p2), 0.1, 1e-13);
}

TEST(Solve, RejectsBadRadius) {
  const auto f = scsr1::factorize(build::diag21());
  EXPECT_THROW(solve_full(f, vec({3, 4}), 0.0, Norm::p2), scsr1::InvalidInput);
  EXPECT_THROW(solve_full(f, vec({3, 4}), -1.0, Norm::pinf), scsr1::InvalidInput);
  EXPECT_THROW(solve_full(f, vec({3, 4}), std::nan(""), Norm::p2), scsr1::InvalidInput);
  EXPECT_THROW(scsr1::solve(f, f.project_gradient(vec({3, 4})), vec({1, 2, 3}), 1.0, Norm::p2),
               scsr1::InvalidInput);
}

TEST(SolveVperp, Branches) {
  auto a = scsr1::solve_vperp(2.0, 1.0, 1.0);
  EXPECT_EQ(a.w_case, PerpCase::scale_g_by_inv_gamma);
  EXPECT_EQ(a.sigma_perp, 0.0);
  auto b = scsr1::solve_vperp(-1.0, 0.0, 2.0);
  EXPECT_EQ(b.w_case, PerpCase::e_i_direction);
  EXPECT_EQ(b.sigma_perp, 1.0);
  auto c = scsr1::solve_vperp(1.0, 5.0, 1.0);
  EXPECT_EQ(c.w_case, PerpCase::scale_g_to_boundary);
  EXPECT_EQ(c.sigma_perp, 4.0);
  auto d = scsr1::solve_vperp(-1.0, 3.0, 1.0);
  EXPECT_EQ(d.w_case, PerpCase::scale_g_to_boundary);
  EXPECT_EQ(d.sigma_perp, 4.0);
}

TEST(SolveVparPinf, Branches) {
  EXPECT_EQ(scsr1::solve_vpar_pinf(vec({2}), vec({1}), 1.0)(0), -0.5);
  EXPECT_EQ(scsr1::solve_vpar_pinf(vec({0}), vec({0}), 1.0)(0), 0.0);
  EXPECT_EQ(scsr1::solve_vpar_pinf(vec({-1}), vec({0}), 1.5)(0), 1.5);
  EXPECT_EQ(scsr1::solve_vpar_pinf(vec({-1}), vec({2}), 1.0)(0), -1.0);
  EXPECT_EQ(scsr1::solve_vpar_pinf(vec({2}), vec({-8}), 1.0)(0), 1.0);
  EXPECT_EQ(scsr1::solve_vpar_pinf(vec({0}), vec({3}), 2.0)(0), -2.0);
}

TEST(SolveVparPinf, MatchesComponentwiseEnumeration) {
  oracle::Rng rng(3);
  for (int t = 0; t < 500; ++t) {
    const int m = rng.integer(1, 6);
    VectorXd lam = rng.vec(m) * 3.0;
    VectorXd g = rng.vec(m) * 2.0;
    if (t % 5 == 0) g(0) = 0.0;
    if (t % 7 == 0) lam(0) = 0.0;
    const double delta = rng.uniform(0.01, 3.0);
    const VectorXd v = scsr1::solve_vpar_pinf(lam, g, delta);
    const VectorXd ref = oracle::pinf_candidates(lam, g, delta);
    for (int i = 0; i < m; ++i) {
      auto q = [&](double x) { return g(i) * x + 0.5 * lam(i) * x * x; };
      EXPECT_LE(q(v(i)) - q(ref(i)), 1e-10 * std::max(1.0, std::abs(q(ref(i)))));
      EXPECT_LE(std::abs(v(i)), delta);
    }
    EXPECT_TRUE(scsr1::check_pinf(lam, g, delta, v));
  }
}

TEST(SolveVparP2, Examples) {
  auto a = scsr1::solve_vpar_p2(vec({1, 2}), vec({1, 2}), 10.0, 1);
  EXPECT_LE((a.v_par - vec({-1, -1})).norm(), 1e-15);
  EXPECT_EQ(a.sigma_par, 0.0);
  EXPECT_EQ(a.case_tag, CaseTag::interior);

  auto b = scsr1::solve_vpar_p2(vec({1}), vec({2}), 1.0, 1);
  EXPECT_NEAR(b.sigma_par, 1.0, 1e-12);
  EXPECT_NEAR(b.v_par(0), -1.0, 1e-12);
  EXPECT_EQ(b.case_tag, CaseTag::boundary_newton);

  auto c = scsr1::solve_vpar_p2(vec({-1, 2}), vec({0, 1.5}), 1.0, 1);
  EXPECT_EQ(c.case_tag, CaseTag::hard_case);
  EXPECT_EQ(c.newton_iters, 0);
  EXPECT_EQ(c.sigma_par, 1.0);
  EXPECT_NEAR(c.alpha, std::sqrt(0.75), 1e-15);
  EXPECT_LE((c.v_par - vec({std::sqrt(0.75), -0.5})).norm(), 1e-15);

  auto d = scsr1::solve_vpar_p2(vec({-1, 2}), vec({1, 0}), 0.5, 1);
  EXPECT_NEAR(d.sigma_par, 3.0, 1e-12);
  EXPECT_LE((d.v_par - vec({-0.5, 0})).norm(), 1e-12);
  EXPECT_EQ(d.case_tag, CaseTag::boundary_newton);
}

TEST(SolveVparP2, HardCaseMatchesGridSearch) {
  // minimize 1.5 v₂ − ½v₁² + v₂² over the unit disc by polar grid refinement
  auto q = [](double a, double b) { return 1.5 * b - 0.5 * a * a + b * b; };
  double best = 1e300;
  double ba = 0;
  double bb = 0;
  const int steps = 20000;
  for (int k = 0; k < steps; ++k) {
    const double t = 2.0 * M_PI * k / steps;
    const double a = std::cos(t);
    const double b = std::sin(t);
    if (q(a, b) < best) {
      best = q(a, b);
      ba = a;
      bb = b;
    }
  }
  const auto c = scsr1::solve_vpar_p2(vec({-1, 2}), vec({0, 1.5}), 1.0, 1);
  EXPECT_NEAR(std::abs(c.v_par(0)), std::abs(ba), 1e-3);
  EXPECT_NEAR(c.v_par(1), bb, 1e-3);
  EXPECT_LE(q(c.v_par(0), c.v_par(1)), best + 1e-12);
}

TEST(SolveVparP2, SingularWithZeroBlockUsesPseudoInverse) {
  const auto s = scsr1::solve_vpar_p2(vec({0, 0, 2}), vec({0, 0, 1}), 5.0, 2);
  EXPECT_EQ(s.case_tag, CaseTag::singular_zero);
  EXPECT_EQ(s.sigma_par, 0.0);
  EXPECT_LE((s.v_par - vec({0, 0, -0.5})).norm(), 1e-15);
}

TEST(BuildSecular, Examples) {
  auto a = scsr1::build_secular(vec({1, 1}), vec({3, 4}));
  ASSERT_EQ(a.ell(), 1);
  EXPECT_EQ(a.lam_bar(0), 1.0);
  EXPECT_NEAR(a.a_bar(0), 5.0, 1e-15);
  auto b = scsr1::build_secular(vec({1, 2}), vec({0, 2}));
  ASSERT_EQ(b.ell(), 1);
  EXPECT_EQ(b.lam_bar(0), 2.0);
  EXPECT_EQ(b.a_bar(0), 2.0);
  EXPECT_EQ(scsr1::build_secular(vec({1, 2}), vec({0, 0})).ell(), 0);
}

TEST(Phi, Examples) {
  const scsr1::SecularSpectrum s{vec({1}), vec({2})};
  EXPECT_EQ(scsr1::phi(-1.0, s, 1.0), -1.0);
  EXPECT_NEAR(scsr1::phi(1.0, s, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(scsr1::phi(1e9, s, 1.0), 5e8, 1.0);
  const scsr1::SecularSpectrum empty{VectorXd(0), VectorXd(0)};
  EXPECT_EQ(scsr1::phi(0.0, empty, 1.0), std::numeric_limits<double>::infinity());
}

TEST(NewtonSecular, Examples) {
  const auto a = scsr1::newton_secular({vec({1}), vec({2})}, 1.0, 1.0);
  EXPECT_NEAR(a.sigma, 1.0, 1e-12);
  EXPECT_LE(a.iterations, 10);
  const auto b = scsr1::newton_secular({vec({-1}), vec({1})}, 0.5, -1.0);
  EXPECT_NEAR(b.sigma, 3.0, 1e-12);
  // σ⁰ = 0 already solves 2/(2 + σ) = 1
  const auto c = scsr1::newton_secular({vec({2}), vec({2})}, 1.0, 2.0);
  EXPECT_EQ(c.sigma, 0.0);
  EXPECT_LE(c.iterations, 1);
}

TEST(NewtonSecular, ConvergesFromTheLeftOnRandomSpectra) {
  oracle::Rng rng(8);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int t = 0; t < 300; ++t) {
    const int l = rng.integer(1, 5);
    VectorXd lam(l);
    lam(0) = rng.uniform(-5, 5);
    for (int i = 1; i < l; ++i) lam(i) = lam(i - 1) + rng.uniform(0.01, 4);
    const VectorXd a = rng.vec(l).cwiseAbs().array() + 0.01;
    const scsr1::SecularSpectrum s{lam, a};
    const double sigma0 = std::max(0.0, -lam(0));
    // choose δ below ‖v(σ⁰)‖ so a root exists to the right of σ⁰
    double norm0 = 0.0;
    for (int i = 0; i < l; ++i) {
      const double d = lam(i) + sigma0;
      norm0 += d == 0.0 ? 1e300 : a(i) * a(i) / (d * d);
    }
    const double delta = std::min(std::sqrt(norm0), 1e6) * rng.uniform(0.05, 0.95);
    const auto r = scsr1::newton_secular(s, delta, lam(0));
    EXPECT_GE(r.sigma, sigma0);
    EXPECT_LE(r.iterations, 10);
    const double f = scsr1::phi(r.sigma, s, delta);
    EXPECT_LE(std::abs(f), eps / delta + std::sqrt(eps));
  }
}

TEST(AssembleP, Branches) {
  const auto f = scsr1::factorize(build::diag21());
  const VectorXd g = vec({3, 4});
  const auto pg = f.project_gradient(g);
  const VectorXd a = scsr1::assemble_p(f, vec({-1.5}), PerpCase::scale_g_by_inv_gamma, g, pg, 1.0);
  EXPECT_LE((a - vec({-1.5, -4})).norm(), 1e-15);
  const VectorXd b = scsr1::assemble_p(f, vec({0.3}), PerpCase::e_i_direction, g, pg, 0.7);
  EXPECT_LE((b - vec({0.3, 0.7})).norm(), 1e-12);
  const VectorXd zero = VectorXd::Zero(2);
  const VectorXd c = scsr1::assemble_p(f, vec({0}), PerpCase::scale_g_by_inv_gamma, zero,
                                       f.project_gradient(zero), 1.0);
  EXPECT_EQ(c, zero);
}

TEST(Solve, PerpendicularEigenvectorBranch) {
  // γ < 0 and g in range(P∥): the step must leave range(P∥) to reach the
  // negative curvature of P⊥.
  oracle::Rng rng(12);
  const auto rep = build::rep_with_spectrum(20, vec({1, 2, 3}), -1.0, rng);
  const auto f = scsr1::factorize(rep);
  const VectorXd g = f.pll_mv(rng.vec(3));
  const double delta = 0.5;
  const auto sol = solve_full(f, g, delta, Norm::p2);
  EXPECT_EQ(sol.w_case, PerpCase::e_i_direction);
  EXPECT_NEAR(sol.sigma_perp, 1.0, 1e-12);
  const double par = f.pll_tmv(sol.p).norm();
  EXPECT_NEAR(std::sqrt(sol.p.squaredNorm() - par * par), delta, 1e-9);
  const auto report = scsr1::check(rep, f, g, delta, sol);
  EXPECT_TRUE(report.meets_bounds(g.norm(), delta));
}

TEST(Solve, ScaleCovariance) {
  oracle::Rng rng(14);
  for (int t = 0; t < 30; ++t) {
    auto rep = build::random_rep(30, 5, rng.uniform(0.5, 8), rng);
    if (!rep) continue;
    const auto f = scsr1::factorize(*rep);
    const VectorXd g = rng.vec(30);
    const double delta = rng.uniform(0.1, 2);
    const double scale = rng.uniform(0.01, 100);
    const auto a = solve_full(f, g, delta, Norm::p2);
    const auto b = solve_full(f, scale * g, scale * delta, Norm::p2);
    if (a.case_tag == CaseTag::hard_case) continue;
    EXPECT_LE((b.p - scale * a.p).norm(), 1e-8 * scale * a.p.norm());
    EXPECT_NEAR(b.sigma_par, a.sigma_par, 1e-8 * std::max(1.0, a.sigma_par));
    EXPECT_NEAR(b.sigma_perp, a.sigma_perp, 1e-8 * std::max(1.0, a.sigma_perp));
  }
}

TEST(Solve, FeasibleAndNonnegativeMultipliers) {
  oracle::Rng rng(16);
  for (int t = 0; t < 100; ++t) {
    auto rep = build::random_rep(rng.integer(7, 40), rng.integer(1, 5),
                                 rng.uniform(-5, 10), rng);
    if (!rep) continue;
    const auto f = scsr1::factorize(*rep);
    const VectorXd g = rng.vec(rep->dim()) * std::pow(10.0, rng.uniform(-4, 2));
    const double delta = std::pow(10.0, rng.uniform(-3, 2));
    for (Norm norm : {Norm::p2, Norm::pinf}) {
      const auto sol = solve_full(f, g, delta, norm);
      EXPECT_LE(scsr1::sc_norm(f, sol.p, norm), delta * (1 + 1e-9));
      EXPECT_GE(sol.sigma_par, 0.0);
      EXPECT_GE(sol.sigma_perp, 0.0);
      if (norm == Norm::p2) {
        EXPECT_LE(sol.v_par.norm(), delta * (1 + 1e-10));
        const auto rpt = scsr1::check(*rep, f, g, delta, sol);
        EXPECT_TRUE(rpt.meets_bounds(g.norm(), delta))
            << "opt1 " << rpt.opt1 << " opt2 " << rpt.opt2;
      } else {
        EXPECT_LE(sol.v_par.cwiseAbs().maxCoeff(), delta * (1 + 1e-10));
      }
    }
  }
}

TEST(ScNorm, ExamplesAndEquivalenceBounds) {
  const auto f = scsr1::factorize(build::diag21());
  EXPECT_EQ(scsr1::sc_norm(f, VectorXd::Zero(2), Norm::p2), 0.0);
  EXPECT_NEAR(scsr1::sc_norm(f, vec({-0.1, -0.1}), Norm::p2), 0.1, 1e-16);

  oracle::Rng rng(18);
  auto rep = build::random_rep(25, 5, 2.0, rng);
  ASSERT_TRUE(rep);
  const auto g = scsr1::factorize(*rep);
  const double k = static_cast<double>(g.rank());
  auto check_bounds = [&](const VectorXd& p) {
    const double two = p.norm();
    const double p2 = scsr1::sc_norm(g, p, Norm::p2);
    const double pinf = scsr1::sc_norm(g, p, Norm::pinf);
    EXPECT_GE(p2, two / std::sqrt(2.0) - 1e-12 * two);
    EXPECT_LE(p2, two + 1e-12 * two);
    EXPECT_GE(pinf, two / std::sqrt(k + 1.0) - 1e-12 * two);
    EXPECT_LE(pinf, two + 1e-12 * two);
  };
  for (int t = 0; t < 200; ++t) check_bounds(rng.vec(25));
  // All m' + 1 pieces of equal size: ‖p‖_{P,∞} = ‖p‖₂/√(m' + 1) exactly.
  const MatrixXd p_par = g.p_par_dense();
  VectorXd w = rng.vec(25);
  w -= p_par * (p_par.transpose() * w);
  w.normalize();
  const VectorXd p = p_par * VectorXd::Ones(g.rank()) + w;
  check_bounds(p);
  EXPECT_NEAR(scsr1::sc_norm(g, p, Norm::pinf), p.norm() / std::sqrt(k + 1.0), 1e-12);
}

TEST(QPar, Value) {
  EXPECT_DOUBLE_EQ(scsr1::q_par(vec({2, -1}), vec({1, 1}), vec({1, 2})), 1 + 2 + 0.5 * (2 - 4));
}

TEST(ParseNames, RoundTrip) {
  EXPECT_EQ(scsr1::parse_norm("p2"), Norm::p2);
  EXPECT_EQ(scsr1::parse_norm("pinf"), Norm::pinf);
  EXPECT_THROW(scsr1::parse_norm("l1"), scsr1::InvalidInput);
  EXPECT_EQ(scsr1::to_string(CaseTag::hard_case), "hard-case");
  EXPECT_EQ(scsr1::to_string(CaseTag::boundary_newton), "boundary-newton");
}

}  // namespace
