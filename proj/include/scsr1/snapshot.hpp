#pragma once

// On-disk problem snapshot, one directory per problem:
//
//   header.json   {"format": "scsr1-snapshot", "version": 1, "n", "m",
//                  "gamma", "seed", "delta", "norm", "experiment",
//                  optional "middle" (m·m values, row-major)}
//   S.csv, Y.csv  column-major: line j holds column j (n values)
//   g.csv         one line of n values
//
// Values are written in shortest round-trip form, so a reload is exact.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "scsr1/compact.hpp"
#include "scsr1/harness.hpp"
#include "scsr1/solver.hpp"

namespace scsr1 {

struct Snapshot {
  MatrixXd s;
  MatrixXd y;
  double gamma = 1.0;
  std::optional<MatrixXd> middle;  // absent: the SR1 middle of (S, Y, γ)
  VectorXd g;
  double delta = 1.0;
  Norm norm = Norm::p2;
  std::string experiment;
  std::uint64_t seed = 0;

  CompactRep rep() const;
};

Snapshot make_snapshot(const Problem& problem, const ExperimentSpec& spec);

void save_snapshot(const std::filesystem::path& dir, const Snapshot& snap);

/// Throws InvalidInput on missing files, malformed values or inconsistent
/// sizes.
Snapshot load_snapshot(const std::filesystem::path& dir);

}  // namespace scsr1
