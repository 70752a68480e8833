#pragma once

#include <vector>

#include "numerics.hpp"
#include "rng.hpp"

namespace afrelay {

// Time-domain MIMO taps of one hop. Tap l has entries with variance tap_powers[l].
struct MultipathChannel {
  std::vector<ComplexMatrix> taps;
  std::vector<double> tap_powers;

  int length() const { return static_cast<int>(taps.size()); }
  int rx() const { return taps.empty() ? 0 : static_cast<int>(taps.front().rows()); }
  int tx() const { return taps.empty() ? 0 : static_cast<int>(taps.front().cols()); }
};

// H_k for k = 0..K-1.
struct SubcarrierChannels {
  std::vector<ComplexMatrix> per_subcarrier;

  int size() const { return static_cast<int>(per_subcarrier.size()); }
};

struct TapRecovery {
  MultipathChannel channel;
  bool projected = false;   // true when the responses were not exactly representable
  double residual = 0.0;    // relative Frobenius misfit of the recovered taps
};

// p_l proportional to exp(-decay * l), l = 0..L-1, normalized to sum 1.
std::vector<double> exponential_profile(int length, double decay = 1.0);

MultipathChannel generate_channel(int rx, int tx, const std::vector<double>& profile, RandomStream& rng);

// H_k = sum_l taps[l] exp(-j 2 pi k l / K).
SubcarrierChannels to_frequency(const MultipathChannel& channel, int subcarriers);

// Least-squares inverse of to_frequency onto `length` taps.
TapRecovery from_frequency(const SubcarrierChannels& responses, int length);

}  // namespace afrelay
