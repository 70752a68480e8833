#include <sstream>

#include "channel.hpp"
#include "csv_io.hpp"
#include "doctest.h"
#include "errors.hpp"
#include "support.hpp"

using namespace afrelay;

namespace {

MultipathChannel random_taps(int rx, int tx, int taps, RandomStream& rng) {
  MultipathChannel ch;
  for (int l = 0; l < taps; ++l) {
    ch.taps.push_back(testing::gaussian(rx, tx, rng));
    ch.tap_powers.push_back(1.0 / taps);
  }
  return ch;
}

}  // namespace

TEST_CASE("single-tap unit profile has unit entry variance") {
  RandomStream rng(11);
  double acc = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) acc += std::norm(generate_channel(1, 1, {1.0}, rng).taps[0](0, 0));
  CHECK(acc / draws == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("zero-power taps are identically zero") {
  RandomStream rng(12);
  const MultipathChannel ch = generate_channel(2, 2, {1.0, 0.0, 0.0}, rng);
  REQUIRE(ch.length() == 3);
  CHECK(ch.taps[1].norm() == 0.0);
  CHECK(ch.taps[2].norm() == 0.0);
  CHECK(ch.taps[0].norm() > 0.0);
}

TEST_CASE("exponential profile") {
  double norm = 0.0;
  for (int l = 0; l < 5; ++l) norm += std::exp(-static_cast<double>(l));
  const std::vector<double> p = exponential_profile(5);
  REQUIRE(p.size() == 5);
  CHECK(p[0] == doctest::Approx(1.0 / norm).epsilon(1e-12));
  CHECK(p[0] == doctest::Approx(0.63641).epsilon(1e-5));
  double sum = 0.0;
  for (double v : p) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  for (int l = 1; l < 5; ++l) CHECK(p[l] / p[l - 1] == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("to_frequency examples") {
  RandomStream rng(13);
  const ComplexMatrix a = testing::gaussian(2, 3, rng);
  MultipathChannel flat;
  flat.taps = {a};
  flat.tap_powers = {1.0};
  const SubcarrierChannels f = to_frequency(flat, 6);
  for (const auto& h : f.per_subcarrier) CHECK(max_abs_diff(h, a) < 1e-15);

  MultipathChannel two;
  two.taps = {ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)};
  two.tap_powers = {0.5, 0.5};
  const SubcarrierChannels g = to_frequency(two, 2);
  CHECK(max_abs_diff(g.per_subcarrier[0], 2.0 * ComplexMatrix::Identity(2, 2)) < 1e-14);
  CHECK(g.per_subcarrier[1].norm() < 1e-14);

  try {
    to_frequency(random_taps(2, 2, 5, rng), 4);
    FAIL("K < L accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDimension);
  }
}

TEST_CASE("stacked responses equal sqrt(K) times the partial DFT of the stacked taps") {
  RandomStream rng(14);
  const int k = 8, taps = 3, rx = 2, tx = 2;
  const MultipathChannel ch = random_taps(rx, tx, taps, rng);
  const SubcarrierChannels f = to_frequency(ch, k);
  ComplexMatrix stacked_taps(taps * rx, tx);
  for (int l = 0; l < taps; ++l) stacked_taps.block(l * rx, 0, rx, tx) = ch.taps[l];
  const ComplexMatrix partial = dft_matrix(k).leftCols(taps);
  const ComplexMatrix expected = std::sqrt(static_cast<double>(k)) * kron(partial, ComplexMatrix::Identity(rx, rx)) *
                                 stacked_taps;
  for (int i = 0; i < k; ++i) CHECK(max_abs_diff(f.per_subcarrier[i], expected.block(i * rx, 0, rx, tx)) < 1e-10);
}

TEST_CASE("round trips through from_frequency") {
  RandomStream rng(15);
  const MultipathChannel ch = random_taps(2, 2, 2, rng);
  const TapRecovery back = from_frequency(to_frequency(ch, 4), 2);
  CHECK_FALSE(back.projected);
  for (int l = 0; l < 2; ++l) CHECK(max_abs_diff(back.channel.taps[l], ch.taps[l]) < 1e-10);

  const MultipathChannel wide = random_taps(3, 2, 5, rng);
  const TapRecovery wide_back = from_frequency(to_frequency(wide, 16), 5);
  for (int l = 0; l < 5; ++l) CHECK(max_abs_diff(wide_back.channel.taps[l], wide.taps[l]) < 1e-10);

  const ComplexMatrix a = testing::gaussian(2, 2, rng);
  SubcarrierChannels flat;
  flat.per_subcarrier.assign(8, a);
  const TapRecovery t = from_frequency(flat, 3);
  CHECK(max_abs_diff(t.channel.taps[0], a) < 1e-12);
  CHECK(t.channel.taps[1].norm() < 1e-12);
  CHECK(t.channel.taps[2].norm() < 1e-12);
  CHECK_FALSE(t.projected);

  // Responses of a 4-tap channel cannot be represented by 2 taps.
  const TapRecovery lossy = from_frequency(to_frequency(random_taps(2, 2, 4, rng), 8), 2);
  CHECK(lossy.projected);
  CHECK(lossy.residual > 1e-3);
}

TEST_CASE("circular convolution is diagonalized per subcarrier") {
  // Time-domain block-circulant channel applied to a cyclic block equals the
  // per-subcarrier responses applied in the (unitary) frequency domain.
  RandomStream rng(16);
  const int k = 8, taps = 3, rx = 2, tx = 3;
  const MultipathChannel ch = random_taps(rx, tx, taps, rng);
  const ComplexMatrix x = testing::gaussian(tx, k, rng);  // column t is the transmit vector at time t
  ComplexMatrix y = ComplexMatrix::Zero(rx, k);
  for (int t = 0; t < k; ++t)
    for (int l = 0; l < taps; ++l) y.col(t) += ch.taps[l] * x.col(((t - l) % k + k) % k);

  const ComplexMatrix f = dft_matrix(k);
  const ComplexMatrix x_freq = x * f.transpose();
  const ComplexMatrix y_freq = y * f.transpose();
  const SubcarrierChannels h = to_frequency(ch, k);
  for (int i = 0; i < k; ++i) CHECK((y_freq.col(i) - h.per_subcarrier[i] * x_freq.col(i)).norm() < 1e-9);
}

TEST_CASE("subcarrier responses have unit average entry power") {
  RandomStream rng(17);
  const std::vector<double> profile = exponential_profile(5);
  double acc = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const SubcarrierChannels f = to_frequency(generate_channel(2, 2, profile, rng), 8);
    acc += f.per_subcarrier[i % 8].squaredNorm() / 4.0;
  }
  CHECK(acc / draws == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("channel CSV round trip") {
  RandomStream rng(18);
  const MultipathChannel ch = generate_channel(3, 2, exponential_profile(4), rng);
  std::stringstream ss;
  write_channel_csv(ss, ch);
  const std::string text = ss.str();
  CHECK(text.rfind("tap,power,rows,cols,re_0,im_0,", 0) == 0);
  const MultipathChannel back = read_channel_csv(ss);
  REQUIRE(back.length() == 4);
  for (int l = 0; l < 4; ++l) {
    CHECK((back.taps[l].array() == ch.taps[l].array()).all());
    CHECK(back.tap_powers[l] == ch.tap_powers[l]);
  }
}
