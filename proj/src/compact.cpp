#include "scsr1/compact.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "scsr1/dense.hpp"
#include "scsr1/errors.hpp"

namespace scsr1 {

namespace {

void drop_first(MatrixXd& a) {
  const Index m = a.rows();
  MatrixXd kept = a.bottomRightCorner(m - 1, m - 1);
  a = std::move(kept);
}

MatrixXd grow(const MatrixXd& a) {
  const Index m = a.rows();
  MatrixXd out = MatrixXd::Zero(m + 1, m + 1);
  out.topLeftCorner(m, m) = a;
  return out;
}

double relative_gap(const MatrixXd& stored, const MatrixXd& fresh) {
  const double scale = dense::max_abs(fresh);
  const double gap = dense::max_abs(stored - fresh);
  return scale > 0.0 ? gap / scale : gap;
}

}  // namespace

PairHistory::PairHistory(Index n, double gamma)
    : n_(n),
      gamma_(gamma),
      sts_(0, 0),
      sty_(0, 0),
      yty_(0, 0),
      ptp_(0, 0) {
  if (n < 0) throw InvalidInput("PairHistory: negative dimension");
  if (!std::isfinite(gamma)) throw InvalidInput("PairHistory: gamma not finite");
}

PairHistory PairHistory::from_columns(const MatrixXd& s, const MatrixXd& y,
                                      double gamma) {
  if (s.rows() != y.rows() || s.cols() != y.cols()) {
    throw InvalidInput("from_columns: S and Y shapes differ");
  }
  if (!s.allFinite() || !y.allFinite()) {
    throw InvalidInput("from_columns: non-finite pair data");
  }
  PairHistory h(s.rows(), gamma);
  for (Index j = 0; j < s.cols(); ++j) {
    h.s_.push_back(std::make_shared<const VectorXd>(s.col(j)));
    h.y_.push_back(std::make_shared<const VectorXd>(y.col(j)));
  }
  h.recompute_gram();
  return h;
}

PairHistory PairHistory::with_gamma(double gamma) const {
  if (!std::isfinite(gamma)) throw InvalidInput("with_gamma: gamma not finite");
  PairHistory copy = *this;
  copy.gamma_ = gamma;
  copy.recompute_ptp();
  return copy;
}

MatrixXd PairHistory::s_dense() const {
  MatrixXd out(n_, size());
  for (Index j = 0; j < size(); ++j) out.col(j) = s(j);
  return out;
}

MatrixXd PairHistory::y_dense() const {
  MatrixXd out(n_, size());
  for (Index j = 0; j < size(); ++j) out.col(j) = y(j);
  return out;
}

void PairHistory::recompute_gram() {
  const Index m = size();
  sts_.resize(m, m);
  sty_.resize(m, m);
  yty_.resize(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      sts_(i, j) = s(i).dot(s(j));
      sty_(i, j) = s(i).dot(y(j));
      yty_(i, j) = y(i).dot(y(j));
    }
  }
  recompute_ptp();
}

VectorXd PairHistory::psi_col(Index j) const { return y(j) - gamma_ * s(j); }

void PairHistory::recompute_ptp() {
  const Index m = size();
  ptp_.resize(m, m);
  for (Index j = 0; j < m; ++j) {
    const VectorXd pj = psi_col(j);
    for (Index i = 0; i <= j; ++i) {
      const double v = i == j ? pj.squaredNorm() : psi_col(i).dot(pj);
      ptp_(i, j) = v;
      ptp_(j, i) = v;
    }
  }
}

double PairHistory::gram_drift() const {
  PairHistory fresh = *this;
  fresh.recompute_gram();
  return std::max({relative_gap(sts_, fresh.sts_), relative_gap(sty_, fresh.sty_),
                   relative_gap(yty_, fresh.yty_), relative_gap(ptp_, fresh.ptp_)});
}

MatrixXd sr1_middle_inverse(const PairHistory& pairs) {
  const Index m = pairs.size();
  const double gamma = pairs.gamma();
  MatrixXd k(m, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = j; i < m; ++i) {
      // lower triangle (with diagonal) of SᵀY, mirrored
      const double v = pairs.sty()(i, j) - gamma * pairs.sts()(i, j);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

CompactRep::CompactRep(PairHistory pairs) : pairs_(std::move(pairs)) {
  const Index m = pairs_.size();
  if (m == 0) {
    middle_.resize(0, 0);
    return;
  }
  const MatrixXd k = sr1_middle_inverse(pairs_);
  try {
    middle_ = dense::inverse_sym(k);
  } catch (const SingularMatrix&) {
    throw CompactUndefined("D + L + Lᵀ − γSᵀS is singular");
  }
  const double residual =
      dense::max_abs(middle_ * k - MatrixXd::Identity(m, m));
  if (!middle_.allFinite() || residual > 1e-10) {
    throw CompactUndefined("middle matrix inverse failed verification");
  }
}

CompactRep::CompactRep(PairHistory pairs, MatrixXd middle)
    : pairs_(std::move(pairs)), middle_(std::move(middle)) {
  const Index m = pairs_.size();
  if (middle_.rows() != m || middle_.cols() != m) {
    throw InvalidInput("CompactRep: middle matrix has wrong shape");
  }
  if (!middle_.allFinite()) throw InvalidInput("CompactRep: non-finite middle");
  if (m > 0 && dense::max_abs(middle_ - middle_.transpose()) >
                   1e-10 * dense::max_abs(middle_)) {
    throw InvalidInput("CompactRep: middle matrix is not symmetric");
  }
  middle_ = 0.5 * (middle_ + middle_.transpose());
}

VectorXd CompactRep::psi_tmv(const VectorXd& x) const {
  if (x.size() != dim()) throw InvalidInput("psi_tmv: dimension mismatch");
  const double gamma = pairs_.gamma();
  VectorXd out(size());
  for (Index i = 0; i < size(); ++i) {
    out(i) = (pairs_.y(i) - gamma * pairs_.s(i)).dot(x);
  }
  return out;
}

VectorXd CompactRep::psi_mv(const VectorXd& z) const {
  if (z.size() != size()) throw InvalidInput("psi_mv: dimension mismatch");
  const double gamma = pairs_.gamma();
  VectorXd out = VectorXd::Zero(dim());
  for (Index i = 0; i < size(); ++i) {
    out.noalias() += z(i) * pairs_.y(i) - (gamma * z(i)) * pairs_.s(i);
  }
  return out;
}

VectorXd CompactRep::psi_row(Index i) const {
  if (i < 0 || i >= dim()) throw InvalidInput("psi_row: index out of range");
  const double gamma = pairs_.gamma();
  VectorXd out(size());
  for (Index j = 0; j < size(); ++j) {
    out(j) = pairs_.y(j)(i) - gamma * pairs_.s(j)(i);
  }
  return out;
}

VectorXd CompactRep::bmv(const VectorXd& x) const {
  if (x.size() != dim()) throw InvalidInput("bmv: dimension mismatch");
  VectorXd out = pairs_.gamma() * x;
  if (size() > 0) out += psi_mv(middle_ * psi_tmv(x));
  return out;
}

MatrixXd CompactRep::dense() const {
  const MatrixXd psi = pairs_.y_dense() - pairs_.gamma() * pairs_.s_dense();
  MatrixXd b = psi * middle_ * psi.transpose();
  b.diagonal().array() += pairs_.gamma();
  return b;
}

PairBuffer::PairBuffer(Index n, double gamma, PairBufferOptions options)
    : options_(options), history_(n, gamma) {
  if (options_.max_pairs < 1) throw InvalidInput("PairBuffer: max_pairs < 1");
}

PushStatus PairBuffer::push_pair(const VectorXd& s, const VectorXd& y,
                                 const VectorXd& bs) {
  const Index n = dim();
  if (s.size() != n || y.size() != n || bs.size() != n) {
    throw InvalidInput("push_pair: dimension mismatch");
  }
  if (!s.allFinite() || !y.allFinite() || !bs.allFinite()) {
    throw InvalidInput("push_pair: non-finite data");
  }
  const double snorm = s.norm();
  if (snorm == 0.0) throw InvalidInput("push_pair: s = 0");

  const VectorXd r = y - bs;
  if (std::abs(s.dot(r)) <= options_.reject_tol * snorm * r.norm()) {
    return PushStatus::degenerate_update;
  }

  PairHistory next = history_;
  if (next.size() == options_.max_pairs) {
    next.s_.erase(next.s_.begin());
    next.y_.erase(next.y_.begin());
    drop_first(next.sts_);
    drop_first(next.sty_);
    drop_first(next.yty_);
    drop_first(next.ptp_);
  }
  const Index m = next.size();
  next.sts_ = grow(next.sts_);
  next.sty_ = grow(next.sty_);
  next.yty_ = grow(next.yty_);
  next.ptp_ = grow(next.ptp_);
  const VectorXd psi = y - next.gamma_ * s;
  for (Index j = 0; j < m; ++j) {
    const double ss = s.dot(next.s(j));
    const double yy = y.dot(next.y(j));
    next.sts_(m, j) = ss;
    next.sts_(j, m) = ss;
    next.yty_(m, j) = yy;
    next.yty_(j, m) = yy;
    next.sty_(m, j) = s.dot(next.y(j));
    next.sty_(j, m) = next.s(j).dot(y);
    const double pp = psi.dot(next.psi_col(j));
    next.ptp_(m, j) = pp;
    next.ptp_(j, m) = pp;
  }
  next.ptp_(m, m) = psi.squaredNorm();
  next.sts_(m, m) = s.squaredNorm();
  next.yty_(m, m) = y.squaredNorm();
  next.sty_(m, m) = s.dot(y);
  next.s_.push_back(std::make_shared<const VectorXd>(s));
  next.y_.push_back(std::make_shared<const VectorXd>(y));
  if (options_.recompute_gram) next.recompute_gram();

  try {
    CompactRep probe(next);
  } catch (const CompactUndefined&) {
    return PushStatus::undefined_middle;
  }
  history_ = std::move(next);
  return PushStatus::accepted;
}

PushStatus PairBuffer::push_pair(const VectorXd& s, const VectorXd& y) {
  if (s.size() != dim()) throw InvalidInput("push_pair: dimension mismatch");
  return push_pair(s, y, build().bmv(s));
}

void PairBuffer::set_gamma(double gamma) {
  PairHistory next = history_.with_gamma(gamma);
  CompactRep probe(next);
  history_ = std::move(next);
}

}  // namespace scsr1
