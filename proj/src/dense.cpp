#include "scsr1/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scsr1/errors.hpp"

namespace scsr1::dense {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double max_abs(const MatrixXd& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

namespace {

void require_symmetric(const MatrixXd& a, const char* who) {
  if (a.rows() != a.cols()) {
    throw InvalidInput(std::string(who) + ": matrix is not square");
  }
  if (!a.allFinite()) {
    throw InvalidInput(std::string(who) + ": non-finite entry");
  }
  const double scale = max_abs(a);
  if (a.size() > 0 && max_abs(a - a.transpose()) > 1e-10 * scale) {
    throw InvalidInput(std::string(who) + ": matrix is not symmetric");
  }
}

double off_diagonal_norm(const MatrixXd& a) {
  double sum = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

}  // namespace

EigResult sym_eig(const MatrixXd& input) {
  require_symmetric(input, "sym_eig");
  const Index n = input.rows();
  MatrixXd a = 0.5 * (input + input.transpose());
  MatrixXd v = MatrixXd::Identity(n, n);

  const double eps = std::numeric_limits<double>::epsilon();
  const double frob = a.norm();
  constexpr int kMaxSweeps = 60;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= 0.5 * eps * frob) break;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i) < a(j, j); });

  EigResult out{VectorXd(n), MatrixXd(n, n)};
  for (Index j = 0; j < n; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    out.values(j) = a(src, src);
    VectorXd col = v.col(src);
    Index big = 0;
    for (Index i = 1; i < n; ++i) {
      if (std::abs(col(i)) > std::abs(col(big))) big = i;
    }
    if (col(big) < 0.0) col = -col;
    out.vectors.col(j) = col;
  }
  return out;
}

MatrixXd cholesky(const MatrixXd& a) {
  require_symmetric(a, "cholesky");
  const Index n = a.rows();
  MatrixXd r = MatrixXd::Zero(n, n);
  if (n == 0) return r;
  const double max_diag = a.diagonal().maxCoeff();
  for (Index j = 0; j < n; ++j) {
    double d = a(j, j);
    for (Index k = 0; k < j; ++k) d -= r(k, j) * r(k, j);
    if (!(d > kCholeskyRankTol * max_diag)) {
      throw RankDeficient(static_cast<int>(j));
    }
    r(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < n; ++i) {
      double x = a(j, i);
      for (Index k = 0; k < j; ++k) x -= r(k, j) * r(k, i);
      r(j, i) = x / r(j, j);
    }
  }
  return r;
}

SymIndefiniteFactor::SymIndefiniteFactor(const MatrixXd& a,
                                         double singular_tol) {
  require_symmetric(a, "SymIndefiniteFactor");
  const Index n = a.rows();
  MatrixXd w = 0.5 * (a + a.transpose());
  lower_ = MatrixXd::Identity(n, n);
  block_diag_ = MatrixXd::Zero(n, n);
  block_size_.assign(static_cast<std::size_t>(n), 0);
  perm_.resize(static_cast<std::size_t>(n));
  std::iota(perm_.begin(), perm_.end(), Index{0});

  const double anorm = max_abs(w);
  const double tiny = singular_tol * anorm;
  const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;

  auto swap_index = [&](Index k, Index i, Index j) {
    if (i == j) return;
    w.row(i).swap(w.row(j));
    w.col(i).swap(w.col(j));
    std::swap(perm_[static_cast<std::size_t>(i)],
              perm_[static_cast<std::size_t>(j)]);
    for (Index c = 0; c < k; ++c) std::swap(lower_(i, c), lower_(j, c));
  };

  Index k = 0;
  while (k < n) {
    double colmax = 0.0;
    Index r = k;
    for (Index i = k + 1; i < n; ++i) {
      if (std::abs(w(i, k)) > colmax) {
        colmax = std::abs(w(i, k));
        r = i;
      }
    }
    int size = 1;
    if (std::abs(w(k, k)) < alpha * colmax) {
      double rowmax = 0.0;
      for (Index j = k; j < n; ++j) {
        if (j != r) rowmax = std::max(rowmax, std::abs(w(j, r)));
      }
      if (std::abs(w(k, k)) * rowmax >= alpha * colmax * colmax) {
        // 1x1 pivot at k, no interchange
      } else if (std::abs(w(r, r)) >= alpha * rowmax) {
        swap_index(k, k, r);
      } else {
        swap_index(k, k + 1, r);
        size = 2;
      }
    }

    if (size == 1) {
      const double d = w(k, k);
      if (!(std::abs(d) > tiny)) {
        throw SingularMatrix("symmetric matrix is singular to tolerance");
      }
      block_diag_(k, k) = d;
      block_size_[static_cast<std::size_t>(k)] = 1;
      for (Index i = k + 1; i < n; ++i) lower_(i, k) = w(i, k) / d;
      for (Index j = k + 1; j < n; ++j) {
        for (Index i = k + 1; i < n; ++i) {
          w(i, j) -= lower_(i, k) * w(k, j);
        }
      }
    } else {
      const double e11 = w(k, k);
      const double e21 = w(k + 1, k);
      const double e22 = w(k + 1, k + 1);
      const double det = e11 * e22 - e21 * e21;
      // smallest |eigenvalue| of the 2x2 block
      const double mean = 0.5 * (e11 + e22);
      const double rad = std::hypot(0.5 * (e11 - e22), e21);
      const double small = std::min(std::abs(mean - rad), std::abs(mean + rad));
      if (!(small > tiny) || det == 0.0) {
        throw SingularMatrix("symmetric matrix is singular to tolerance");
      }
      block_diag_(k, k) = e11;
      block_diag_(k + 1, k) = e21;
      block_diag_(k, k + 1) = e21;
      block_diag_(k + 1, k + 1) = e22;
      block_size_[static_cast<std::size_t>(k)] = 2;
      for (Index i = k + 2; i < n; ++i) {
        const double c1 = w(i, k);
        const double c2 = w(i, k + 1);
        lower_(i, k) = (c1 * e22 - c2 * e21) / det;
        lower_(i, k + 1) = (c2 * e11 - c1 * e21) / det;
      }
      for (Index j = k + 2; j < n; ++j) {
        for (Index i = k + 2; i < n; ++i) {
          w(i, j) -= lower_(i, k) * w(k, j) + lower_(i, k + 1) * w(k + 1, j);
        }
      }
    }
    k += size;
  }
}

MatrixXd SymIndefiniteFactor::solve(const MatrixXd& b) const {
  const Index n = order();
  if (b.rows() != n) throw InvalidInput("solve: dimension mismatch");
  MatrixXd x(n, b.cols());
  for (Index i = 0; i < n; ++i) x.row(i) = b.row(perm_[static_cast<std::size_t>(i)]);
  x = lower_.triangularView<Eigen::UnitLower>().solve(x);
  Index k = 0;
  while (k < n) {
    if (block_size_[static_cast<std::size_t>(k)] == 1) {
      x.row(k) /= block_diag_(k, k);
      k += 1;
    } else {
      const double e11 = block_diag_(k, k);
      const double e21 = block_diag_(k + 1, k);
      const double e22 = block_diag_(k + 1, k + 1);
      const double det = e11 * e22 - e21 * e21;
      const Eigen::RowVectorXd r1 = x.row(k);
      const Eigen::RowVectorXd r2 = x.row(k + 1);
      x.row(k) = (e22 * r1 - e21 * r2) / det;
      x.row(k + 1) = (e11 * r2 - e21 * r1) / det;
      k += 2;
    }
  }
  x = lower_.transpose().triangularView<Eigen::UnitUpper>().solve(x);
  MatrixXd out(n, b.cols());
  for (Index i = 0; i < n; ++i) out.row(perm_[static_cast<std::size_t>(i)]) = x.row(i);
  return out;
}

VectorXd SymIndefiniteFactor::solve(const VectorXd& b) const {
  return solve(MatrixXd(b)).col(0);
}

int SymIndefiniteFactor::negative_count() const {
  int count = 0;
  Index k = 0;
  while (k < order()) {
    if (block_size_[static_cast<std::size_t>(k)] == 1) {
      if (block_diag_(k, k) < 0.0) ++count;
      k += 1;
    } else {
      const double det = block_diag_(k, k) * block_diag_(k + 1, k + 1) -
                         block_diag_(k + 1, k) * block_diag_(k + 1, k);
      // a 2x2 Bunch–Kaufman block always has det < 0: one eigenvalue each sign
      count += det < 0.0 ? 1 : (block_diag_(k, k) < 0.0 ? 2 : 0);
      k += 2;
    }
  }
  return count;
}

VectorXd solve_sym(const MatrixXd& a, const VectorXd& b) {
  if (b.size() != a.rows()) throw InvalidInput("solve_sym: dimension mismatch");
  return SymIndefiniteFactor(a).solve(b);
}

MatrixXd inverse_sym(const MatrixXd& a) {
  MatrixXd inv = SymIndefiniteFactor(a).solve(
      MatrixXd(MatrixXd::Identity(a.rows(), a.cols())));
  return 0.5 * (inv + inv.transpose());
}

VectorXd solve_upper(const MatrixXd& r, const VectorXd& b) {
  return r.triangularView<Eigen::Upper>().solve(b);
}

VectorXd solve_upper_transposed(const MatrixXd& r, const VectorXd& b) {
  return r.transpose().triangularView<Eigen::Lower>().solve(b);
}

}  // namespace scsr1::dense
