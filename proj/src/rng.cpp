#include "rng.hpp"

#include <cmath>

namespace afrelay {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
    : key_(mix64(mix64(mix64(seed) ^ stream) ^ (substream * 0xd1342543de82ef95ULL))),
      engine_(key_) {}

RandomStream RandomStream::child(std::uint64_t id) const {
  return RandomStream(key_, id + 1, 0x5bd1e995ULL);
}

double RandomStream::uniform() { return uniform_(engine_); }

double RandomStream::normal() { return normal_(engine_); }

std::complex<double> RandomStream::complex_normal(double variance) {
  const double s = std::sqrt(0.5 * variance);
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {s * re, s * im};
}

std::uint32_t RandomStream::bits(int count) {
  return static_cast<std::uint32_t>(engine_() >> (64 - count));
}

}  // namespace afrelay
