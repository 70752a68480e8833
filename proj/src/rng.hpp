#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace afrelay {

// Deterministic random stream keyed by (seed, stream, substream). Streams with
// different keys are statistically independent, so parallel workers can draw
// from `RandomStream(seed, trial_index)` and reproduce a serial run exactly.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0);

  // Independent child stream; the parent is not advanced.
  RandomStream child(std::uint64_t id) const;

  double uniform();
  double normal();
  // Circular complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance = 1.0);
  std::uint32_t bits(int count);

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace afrelay
