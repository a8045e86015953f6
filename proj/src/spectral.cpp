#include "scsr1/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "scsr1/dense.hpp"
#include "scsr1/errors.hpp"

namespace scsr1 {

namespace {

MatrixXd select(const MatrixXd& a, const std::vector<Index>& rows,
                const std::vector<Index>& cols) {
  MatrixXd out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = a(rows[i], cols[j]);
    }
  }
  return out;
}

}  // namespace

SpectralFactors factorize(const CompactRep& rep) {
  SpectralFactors f(rep);
  const Index m = rep.size();
  const MatrixXd gram = rep.psi_gram();

  f.kept_.resize(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) f.kept_[static_cast<std::size_t>(j)] = j;
  while (!f.kept_.empty()) {
    try {
      f.r_ = dense::cholesky(select(gram, f.kept_, f.kept_));
      break;
    } catch (const RankDeficient& e) {
      f.kept_.erase(f.kept_.begin() + e.pivot());
    }
  }
  const Index rank = static_cast<Index>(f.kept_.size());
  if (rank == 0) {
    f.r_.resize(0, 0);
    f.u_.resize(0, 0);
    f.reduced_middle_.resize(0, 0);
    f.lambda_.resize(0);
    f.r_mult_ = 0;
    return f;
  }

  // Ψ = Ψ_K T: kept columns map to themselves, a dropped column j to the
  // least-squares coefficients (Ψ_KᵀΨ_K)⁻¹Ψ_KᵀΨⱼ.
  MatrixXd t = MatrixXd::Zero(rank, m);
  std::vector<Index> all(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) all[static_cast<std::size_t>(j)] = j;
  const MatrixXd cross = select(gram, f.kept_, all);
  std::size_t next_kept = 0;
  for (Index j = 0; j < m; ++j) {
    if (next_kept < f.kept_.size() && f.kept_[next_kept] == j) {
      t(static_cast<Index>(next_kept), j) = 1.0;
      ++next_kept;
    } else {
      t.col(j) = dense::solve_upper(
          f.r_, dense::solve_upper_transposed(f.r_, cross.col(j)));
    }
  }
  f.reduced_middle_ = t * rep.middle() * t.transpose();
  f.reduced_middle_ = 0.5 * (f.reduced_middle_ + f.reduced_middle_.transpose());

  MatrixXd core = f.r_ * f.reduced_middle_ * f.r_.transpose();
  core = 0.5 * (core + core.transpose());
  dense::EigResult eig = dense::sym_eig(core);
  f.u_ = std::move(eig.vectors);
  f.lambda_ = eig.values.array() + rep.gamma();

  const double lam1 = f.lambda_(0);
  const double tol = kClusterTol * std::max(1.0, std::abs(lam1));
  f.r_mult_ = 0;
  for (Index i = 0; i < rank; ++i) {
    if (f.lambda_(i) - lam1 <= tol) ++f.r_mult_;
  }
  return f;
}

VectorXd SpectralFactors::gather(const VectorXd& full) const {
  VectorXd out(rank());
  for (Index i = 0; i < rank(); ++i) out(i) = full(kept_[static_cast<std::size_t>(i)]);
  return out;
}

VectorXd SpectralFactors::pll_tmv(const VectorXd& x) const {
  if (x.size() != dim()) throw InvalidInput("pll_tmv: dimension mismatch");
  if (rank() == 0) return VectorXd(0);
  return u_.transpose() *
         dense::solve_upper_transposed(r_, gather(rep_.psi_tmv(x)));
}

VectorXd SpectralFactors::pll_mv(const VectorXd& v) const {
  if (v.size() != rank()) throw InvalidInput("pll_mv: dimension mismatch");
  if (rank() == 0) return VectorXd::Zero(dim());
  const VectorXd c = dense::solve_upper(r_, u_ * v);
  VectorXd full = VectorXd::Zero(rep_.size());
  for (Index i = 0; i < rank(); ++i) full(kept_[static_cast<std::size_t>(i)]) = c(i);
  return rep_.psi_mv(full);
}

ProjectedGradient SpectralFactors::project_gradient(const VectorXd& g) const {
  if (g.size() != dim()) throw InvalidInput("project_gradient: dimension mismatch");
  ProjectedGradient pg;
  pg.g_par = pll_tmv(g);
  const double gg = g.squaredNorm();
  pg.g_norm = std::sqrt(gg);
  const double perp2 = gg - pg.g_par.squaredNorm();
  if (perp2 < 1e-4 * gg) {
    // The difference of squares has lost most of its digits; measure the
    // residual of the projection directly instead.
    pg.g_perp_norm = (g - pll_mv(pg.g_par)).norm();
  } else {
    pg.g_perp_norm = std::sqrt(perp2);
  }
  return pg;
}

double SpectralFactors::eperp_norm(Index i) const {
  if (i < 0 || i >= dim()) throw InvalidInput("eperp_norm: index out of range");
  if (rank() == 0) return 1.0;
  const VectorXd row = u_.transpose() *
                       dense::solve_upper_transposed(r_, gather(rep_.psi_row(i)));
  return std::sqrt(std::max(0.0, 1.0 - row.squaredNorm()));
}

MatrixXd SpectralFactors::p_par_dense() const {
  MatrixXd out(dim(), rank());
  for (Index j = 0; j < rank(); ++j) {
    out.col(j) = pll_mv(VectorXd::Unit(rank(), j));
  }
  return out;
}

}  // namespace scsr1
