#pragma once

// Limited-memory SR1 pair storage and the compact representation
//
//   B = γI + Ψ M Ψᵀ,   Ψ = Y − γS,   M = (D + L + Lᵀ − γSᵀS)⁻¹,
//
// where SᵀY = L + D + (strict upper part). Ψ is never stored: every product
// with Ψ goes through the S and Y columns. ΨᵀΨ is cached next to SᵀS, SᵀY
// and YᵀY, accumulated from the columns yⱼ − γsⱼ rather than combined from
// the other three, whose cancellation for large γ lands above the Cholesky
// rank tolerance.

#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace scsr1 {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Immutable set of (s, y) pairs, oldest first, together with their Gram
/// matrices and the initial scaling γ. Columns are reference counted, so
/// copying a history costs O(m²) regardless of n.
class PairHistory {
 public:
  PairHistory() = default;
  PairHistory(Index n, double gamma);

  /// Builds a history from dense n×m column blocks; Gram matrices are
  /// computed from scratch.
  static PairHistory from_columns(const MatrixXd& s, const MatrixXd& y,
                                  double gamma);

  Index dim() const { return n_; }
  Index size() const { return static_cast<Index>(s_.size()); }
  double gamma() const { return gamma_; }

  const VectorXd& s(Index i) const { return *s_[static_cast<std::size_t>(i)]; }
  const VectorXd& y(Index i) const { return *y_[static_cast<std::size_t>(i)]; }

  const MatrixXd& sts() const { return sts_; }
  /// (SᵀY)(i,j) = sᵢᵀyⱼ; not symmetric in general.
  const MatrixXd& sty() const { return sty_; }
  const MatrixXd& yty() const { return yty_; }
  /// ΨᵀΨ for the current γ.
  const MatrixXd& ptp() const { return ptp_; }

  /// Same pairs with a different γ. Rebuilds ΨᵀΨ in O(m²n).
  PairHistory with_gamma(double gamma) const;

  MatrixXd s_dense() const;
  MatrixXd y_dense() const;

  /// Largest relative deviation of the cached Gram matrices from a full
  /// recomputation over the stored columns.
  double gram_drift() const;

 private:
  friend class PairBuffer;

  void recompute_gram();
  void recompute_ptp();
  /// yⱼ − γsⱼ.
  VectorXd psi_col(Index j) const;

  Index n_ = 0;
  double gamma_ = 0.0;
  std::vector<std::shared_ptr<const VectorXd>> s_;
  std::vector<std::shared_ptr<const VectorXd>> y_;
  MatrixXd sts_;
  MatrixXd sty_;
  MatrixXd yty_;
  MatrixXd ptp_;
};

/// The compact representation of an L-SR1 matrix. Immutable once built.
class CompactRep {
 public:
  /// Forms M from the Gram matrices in O(m³). Throws CompactUndefined when
  /// D + L + Lᵀ − γSᵀS is singular.
  explicit CompactRep(PairHistory pairs);

  /// Uses a caller-supplied symmetric middle matrix (m×m) instead of the SR1
  /// one. The problem generators and snapshot loader rely on this.
  CompactRep(PairHistory pairs, MatrixXd middle);

  const PairHistory& pairs() const { return pairs_; }
  const MatrixXd& middle() const { return middle_; }
  Index dim() const { return pairs_.dim(); }
  Index size() const { return pairs_.size(); }
  double gamma() const { return pairs_.gamma(); }

  /// B x.
  VectorXd bmv(const VectorXd& x) const;
  /// Ψᵀx = Yᵀx − γSᵀx.
  VectorXd psi_tmv(const VectorXd& x) const;
  /// Ψz = Yz − γSz.
  VectorXd psi_mv(const VectorXd& z) const;
  /// Row i of Ψ, i.e. Ψᵀeᵢ. O(m).
  VectorXd psi_row(Index i) const;
  /// ΨᵀΨ, from the history's cache.
  const MatrixXd& psi_gram() const { return pairs_.ptp(); }

  /// Dense n×n B. Test and debug use only.
  MatrixXd dense() const;

 private:
  PairHistory pairs_;
  MatrixXd middle_;
};

/// D + L + Lᵀ − γSᵀS, the inverse of the SR1 middle matrix.
MatrixXd sr1_middle_inverse(const PairHistory& pairs);

struct PairBufferOptions {
  int max_pairs = 5;
  /// Pair rejected when |sᵀ(y − Bs)| <= reject_tol·‖s‖·‖y − Bs‖.
  double reject_tol = 1e-8;
  /// Recompute all Gram matrices from the columns after every push instead
  /// of the O(mn) incremental update.
  bool recompute_gram = false;
};

enum class PushStatus {
  accepted,
  degenerate_update,  // sᵀ(y − Bs) too small: the SR1 update is undefined
  undefined_middle,   // update defined but M does not exist
};

/// Mutable FIFO store of the m most recent pairs (single writer).
class PairBuffer {
 public:
  PairBuffer(Index n, double gamma, PairBufferOptions options = {});

  /// `bs` must be the current B applied to s. Evicts the oldest pair when
  /// full. Throws InvalidInput on dimension mismatch or s = 0.
  PushStatus push_pair(const VectorXd& s, const VectorXd& y,
                       const VectorXd& bs);
  /// Same, with Bs computed from the current compact representation.
  PushStatus push_pair(const VectorXd& s, const VectorXd& y);

  /// Changes γ for later builds. Existing CompactRep objects keep their own.
  /// Throws CompactUndefined (and keeps the old γ) if M would not exist.
  void set_gamma(double gamma);

  const PairHistory& history() const { return history_; }
  Index dim() const { return history_.dim(); }
  Index size() const { return history_.size(); }
  double gamma() const { return history_.gamma(); }
  int max_pairs() const { return options_.max_pairs; }

  CompactRep build() const { return CompactRep(history_); }

 private:
  PairBufferOptions options_;
  PairHistory history_;
};

/// Compact representation of the current buffer contents.
inline CompactRep build_compact(const PairBuffer& buffer) {
  return buffer.build();
}

}  // namespace scsr1
