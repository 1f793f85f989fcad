// Deterministic random source. mt19937_64 raw output is pinned by the
// standard, and all derived draws below avoid std::*_distribution (whose
// algorithms are implementation-defined), so a seed reproduces the exact
// same stream on any platform.
#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>

namespace selfplay {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1) with 53-bit resolution
  double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // uniform integer in [lo, hi], inclusive
  int next_int(int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("Rng::next_int: empty range");
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_double() * static_cast<double>(span));
  }

  // index draw from a probability vector (assumed normalized)
  template <typename Derived>
  int categorical(const Eigen::MatrixBase<Derived>& probs) {
    const double u = next_double();
    double cum = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
      cum += probs(i);
      if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace selfplay
