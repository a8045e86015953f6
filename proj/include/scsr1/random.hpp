#pragma once

// Counter-based normal stream. Draw k of stream (seed, id) is
//
//   u_k = splitmix64(key + (k + 1)·0x9e3779b97f4a7c15),
//   key = splitmix64(seed ⊕ splitmix64(id)),
//
// turned into standard normals pairwise by Box–Muller. The sequence depends
// only on (seed, id) and the draw count, so any language with 64-bit
// unsigned arithmetic reproduces it.

#include <cstdint>

#include <Eigen/Dense>

namespace scsr1 {

std::uint64_t splitmix64(std::uint64_t x);

class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t id);

  /// Uniform in (0, 1].
  double uniform();
  double normal();
  Eigen::VectorXd normal_vector(Eigen::Index n);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace scsr1
