#pragma once

// Problem builders for tests. These go through the library; the oracles
// they are checked against live in oracles.hpp.

#include <optional>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "scsr1/compact.hpp"
#include "scsr1/spectral.hpp"

namespace build {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Random history of m pairs; nullopt when the SR1 middle does not exist.
inline std::optional<scsr1::CompactRep> random_rep(Index n, Index m, double gamma,
                                                   oracle::Rng& rng) {
  const MatrixXd s = rng.mat(n, m);
  const MatrixXd y = rng.mat(n, m);
  try {
    return scsr1::CompactRep(scsr1::PairHistory::from_columns(s, y, gamma));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

/// Compact matrix with full-rank Ψ whose nontrivial eigenvalues are exactly
/// `lambda` (length m): M = R⁻¹U diag(λ − γ) UᵀR⁻ᵀ on random pairs.
inline scsr1::CompactRep rep_with_spectrum(Index n, const VectorXd& lambda,
                                           double gamma, oracle::Rng& rng) {
  const Index m = lambda.size();
  while (true) {
    const MatrixXd s = rng.mat(n, m);
    const MatrixXd y = rng.mat(n, m);
    const MatrixXd psi = y - gamma * s;
    Eigen::HouseholderQR<MatrixXd> qr(psi);
    MatrixXd r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    if (r.diagonal().cwiseAbs().minCoeff() < 1e-3) continue;
    // any orthogonal U works; take a random one
    const MatrixXd u = Eigen::HouseholderQR<MatrixXd>(rng.mat(m, m)).householderQ();
    const MatrixXd a = r.triangularView<Eigen::Upper>().solve(u);
    MatrixXd middle = a * (lambda.array() - gamma).matrix().asDiagonal() * a.transpose();
    middle = 0.5 * (middle + middle.transpose());
    return scsr1::CompactRep(scsr1::PairHistory::from_columns(s, y, gamma), middle);
  }
}

/// Pairs whose Ψ = Y − γS has rank `rank` < m: the trailing columns of Ψ are
/// combinations of the leading ones. Uses the SR1 middle of the pairs.
inline std::optional<scsr1::CompactRep> rank_deficient_rep(Index n, Index m,
                                                           Index rank, double gamma,
                                                           oracle::Rng& rng) {
  const MatrixXd s = rng.mat(n, m);
  MatrixXd psi(n, m);
  psi.leftCols(rank) = rng.mat(n, rank);
  psi.rightCols(m - rank) = psi.leftCols(rank) * rng.mat(rank, m - rank);
  const MatrixXd y = psi + gamma * s;
  try {
    return scsr1::CompactRep(scsr1::PairHistory::from_columns(s, y, gamma));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

/// The n = 2 example: s = (1, 0), y = (2, 0), γ = 1, so B = diag(2, 1).
inline scsr1::CompactRep diag21() {
  MatrixXd s(2, 1);
  MatrixXd y(2, 1);
  s << 1, 0;
  y << 2, 0;
  return scsr1::CompactRep(scsr1::PairHistory::from_columns(s, y, 1.0));
}

}  // namespace build
