#include "scsr1/random.hpp"

#include <cmath>
#include <numbers>

namespace scsr1 {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t id)
    : key_(splitmix64(seed ^ splitmix64(id))) {}

double NormalStream::uniform() {
  ++counter_;
  const std::uint64_t bits = splitmix64(key_ + counter_ * kGolden);
  return 1.0 - static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double NormalStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Eigen::VectorXd NormalStream::normal_vector(Eigen::Index n) {
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = normal();
  return out;
}

}  // namespace scsr1
