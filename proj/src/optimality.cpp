#include "scsr1/optimality.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "scsr1/errors.hpp"

namespace scsr1 {

bool OptimalityReport::meets_bounds(double g_norm, double delta) const {
  return opt1 <= kOpt1RelTol * std::max(1.0, g_norm) &&
         opt2 <= kOpt2RelTol * std::max(1.0, delta) && sigma_par >= 0.0 &&
         sigma_perp >= 0.0 && lam1_plus_sigpar >= -kCurvatureTol &&
         gamma_plus_sigperp >= -kCurvatureTol && feasible_par && feasible_perp;
}

OptimalityReport check(const CompactRep& rep, const SpectralFactors& factors,
                       const VectorXd& g, double delta,
                       const SubproblemSolution& sol) {
  if (g.size() != rep.dim() || sol.p.size() != rep.dim()) {
    throw InvalidInput("check: dimension mismatch");
  }
  OptimalityReport out;
  const VectorXd& p = sol.p;
  const VectorXd pp = factors.pll_tmv(p);
  const double par = pp.norm();
  const double perp = std::sqrt(std::max(0.0, p.squaredNorm() - pp.squaredNorm()));

  VectorXd resid = rep.bmv(p) + sol.sigma_perp * p + g;
  if (factors.rank() > 0) {
    resid += (sol.sigma_par - sol.sigma_perp) * factors.pll_mv(pp);
  }
  out.opt1 = resid.norm();
  out.opt2 = std::abs(sol.sigma_par * (par - delta)) +
             std::abs(sol.sigma_perp * (perp - delta));
  out.sigma_par = sol.sigma_par;
  out.sigma_perp = sol.sigma_perp;
  out.lam1_plus_sigpar =
      factors.rank() > 0 ? factors.lambda()(0) + sol.sigma_par : sol.sigma_par;
  out.gamma_plus_sigperp = factors.gamma() + sol.sigma_perp;
  out.feasible_par = par <= delta * (1.0 + kFeasibilityTol);
  out.feasible_perp = perp <= delta * (1.0 + kFeasibilityTol);
  return out;
}

bool check_pinf(const VectorXd& lambda, const VectorXd& g_par, double delta,
                const VectorXd& v_par) {
  if (lambda.size() != g_par.size() || v_par.size() != g_par.size()) {
    return false;
  }
  const double gtol = kZeroGradTol * g_par.norm();
  const double vtol = 1e-10 * std::max(1.0, delta);
  for (Index i = 0; i < lambda.size(); ++i) {
    const double lam = lambda(i);
    const double g = g_par(i);
    const double v = v_par(i);
    const bool g_zero = std::abs(g) <= gtol;
    const double sgn = g > 0.0 ? 1.0 : -1.0;
    bool ok = false;
    if (lam > kClusterTol && std::abs(g / lam) <= delta) {
      ok = std::abs(v + g / lam) <= vtol;
    } else if (std::abs(lam) <= kClusterTol) {
      ok = g_zero ? std::abs(v) <= delta + vtol : std::abs(v + sgn * delta) <= vtol;
    } else if (g_zero) {
      ok = std::abs(std::abs(v) - delta) <= vtol;
    } else {
      ok = std::abs(v + sgn * delta) <= vtol;
    }
    if (!ok) return false;
  }
  return true;
}

VectorXd dense_trust_region(const MatrixXd& h, const VectorXd& g, double delta) {
  const Index n = h.rows();
  if (n == 0) return VectorXd(0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
  const VectorXd& d = es.eigenvalues();
  const MatrixXd& v = es.eigenvectors();
  const VectorXd gh = v.transpose() * g;
  const double gnorm = g.norm();
  const double d1 = d(0);
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());

  auto x_of = [&](double sigma, bool drop_low) {
    VectorXd x(n);
    for (Index i = 0; i < n; ++i) {
      const bool low = d(i) - d1 <= 1e-9 * scale;
      x(i) = (drop_low && low) ? 0.0 : -gh(i) / (d(i) + sigma);
    }
    return x;
  };

  if (d1 > 1e-9 * scale) {
    const VectorXd x = x_of(0.0, false);
    if (x.norm() <= delta) return v * x;
  }
  double low_weight = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (d(i) - d1 <= 1e-9 * scale) low_weight += gh(i) * gh(i);
  }
  const double lo = std::max(0.0, -d1);
  if (d1 <= 1e-9 * scale && std::sqrt(low_weight) <= 1e-10 * std::max(1.0, gnorm)) {
    VectorXd x = x_of(lo, true);
    const double xn = x.norm();
    if (xn <= delta) {
      if (d1 < -1e-9 * scale) x(0) += std::sqrt(delta * delta - xn * xn);
      return v * x;
    }
  }

  double a = lo;
  double b = lo + gnorm / delta + 1.0;
  while (x_of(b, false).norm() > delta) b = lo + 2.0 * (b - lo);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b || b - a <= 1e-12 * std::max(1.0, std::abs(b)) * 1e-3) break;
    const VectorXd x = x_of(mid, false);
    if (x.allFinite() && x.norm() > delta) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return v * x_of(b, false);
}

OracleSolution oracle_solve_p2(const MatrixXd& b_dense,
                               const MatrixXd& p_par_dense, const VectorXd& g,
                               double delta) {
  const Index n = b_dense.rows();
  const Index k = p_par_dense.cols();
  if (b_dense.cols() != n || p_par_dense.rows() != n || g.size() != n) {
    throw InvalidInput("oracle_solve_p2: dimension mismatch");
  }
  const MatrixXd full_q = Eigen::HouseholderQR<MatrixXd>(p_par_dense)
                              .householderQ() *
                          MatrixXd::Identity(n, n);
  const MatrixXd q_perp = full_q.rightCols(n - k);

  const VectorXd v_par = dense_trust_region(
      p_par_dense.transpose() * b_dense * p_par_dense, p_par_dense.transpose() * g,
      delta);
  const VectorXd v_perp = dense_trust_region(
      q_perp.transpose() * b_dense * q_perp, q_perp.transpose() * g, delta);

  OracleSolution out;
  out.p = VectorXd::Zero(n);
  if (k > 0) out.p += p_par_dense * v_par;
  if (n > k) out.p += q_perp * v_perp;
  out.q = g.dot(out.p) + 0.5 * out.p.dot(b_dense * out.p);
  return out;
}

}  // namespace scsr1
