#include "channel.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace afrelay {

namespace {

Complex twiddle(long long k, long long l, int size) {
  const long long e = (k * l) % size;
  return std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(e) / size);
}

}  // namespace

std::vector<double> exponential_profile(int length, double decay) {
  if (length < 1) fail(ErrorKind::kContractViolation, "exponential_profile: length must be >= 1");
  std::vector<double> p(static_cast<std::size_t>(length));
  for (int l = 0; l < length; ++l) p[l] = std::exp(-decay * l);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= total;
  return p;
}

MultipathChannel generate_channel(int rx, int tx, const std::vector<double>& profile, RandomStream& rng) {
  if (rx < 1 || tx < 1) fail(ErrorKind::kContractViolation, "generate_channel: antenna counts must be >= 1");
  if (profile.empty()) fail(ErrorKind::kContractViolation, "generate_channel: empty power-delay profile");
  double total = 0.0;
  for (double p : profile) {
    if (!(p >= 0.0)) fail(ErrorKind::kContractViolation, "generate_channel: negative tap power");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    fail(ErrorKind::kContractViolation, "generate_channel: profile sums to " + std::to_string(total) + ", not 1");

  MultipathChannel ch;
  ch.tap_powers = profile;
  ch.taps.reserve(profile.size());
  for (double p : profile) {
    ComplexMatrix tap(rx, tx);
    for (int j = 0; j < tx; ++j)
      for (int i = 0; i < rx; ++i) tap(i, j) = rng.complex_normal(p);
    ch.taps.push_back(std::move(tap));
  }
  return ch;
}

SubcarrierChannels to_frequency(const MultipathChannel& channel, int subcarriers) {
  const int length = channel.length();
  if (length < 1) fail(ErrorKind::kContractViolation, "to_frequency: channel has no taps");
  if (subcarriers < length)
    fail(ErrorKind::kDimension, "to_frequency: K=" + std::to_string(subcarriers) +
                                    " is smaller than the tap count L=" + std::to_string(length));
  SubcarrierChannels out;
  out.per_subcarrier.reserve(static_cast<std::size_t>(subcarriers));
  for (int k = 0; k < subcarriers; ++k) {
    ComplexMatrix h = ComplexMatrix::Zero(channel.rx(), channel.tx());
    for (int l = 0; l < length; ++l) h += twiddle(k, l, subcarriers) * channel.taps[l];
    out.per_subcarrier.push_back(std::move(h));
  }
  return out;
}

TapRecovery from_frequency(const SubcarrierChannels& responses, int length) {
  const int subcarriers = responses.size();
  if (subcarriers < 1) fail(ErrorKind::kContractViolation, "from_frequency: no subcarriers");
  if (length < 1 || length > subcarriers)
    fail(ErrorKind::kDimension, "from_frequency: need 1 <= L <= K");
  const Eigen::Index rows = responses.per_subcarrier.front().rows();
  const Eigen::Index cols = responses.per_subcarrier.front().cols();

  // The K x L partial DFT has orthogonal columns of squared norm K, so the
  // least-squares taps are a scaled inverse DFT restricted to l < L.
  TapRecovery out;
  out.channel.taps.assign(static_cast<std::size_t>(length), ComplexMatrix::Zero(rows, cols));
  for (int l = 0; l < length; ++l) {
    for (int k = 0; k < subcarriers; ++k)
      out.channel.taps[l] += std::conj(twiddle(k, l, subcarriers)) * responses.per_subcarrier[k];
    out.channel.taps[l] /= static_cast<double>(subcarriers);
  }
  for (const ComplexMatrix& tap : out.channel.taps)
    out.channel.tap_powers.push_back(tap.size() > 0 ? tap.squaredNorm() / static_cast<double>(tap.size()) : 0.0);

  const SubcarrierChannels back = to_frequency(out.channel, subcarriers);
  double misfit = 0.0;
  double norm = 0.0;
  for (int k = 0; k < subcarriers; ++k) {
    misfit += (back.per_subcarrier[k] - responses.per_subcarrier[k]).squaredNorm();
    norm += responses.per_subcarrier[k].squaredNorm();
  }
  out.residual = norm > 0.0 ? std::sqrt(misfit / norm) : std::sqrt(misfit);
  out.projected = out.residual > 1e-8;
  return out;
}

}  // namespace afrelay
