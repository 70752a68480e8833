#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "checks.hpp"
#include "csv_io.hpp"
#include "doctest.h"
#include "errors.hpp"

using namespace afrelay;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

ErrorKind read_kind(const std::string& text) {
  std::istringstream in(text);
  try {
    read_series_csv(in);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kContractViolation;
}

}  // namespace

TEST_CASE("number formatting reads back exactly") {
  RandomStream rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng.uniform() * 200) - 100);
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(200.0) == "200");
  CHECK(format_double(std::nan("")) == "nan");
  const std::string tiny = format_double(std::numeric_limits<double>::denorm_min());
  double parsed = 0.0;
  std::from_chars(tiny.data(), tiny.data() + tiny.size(), parsed);
  CHECK(parsed == std::numeric_limits<double>::denorm_min());
}

TEST_CASE("series round trip") {
  std::vector<MetricSeries> series(2);
  series[0].axis = series[1].axis = "er_n2_db";
  series[0].label = "robust|sigma_e2=0.01";
  series[1].label = "naive|sigma_e2=0.01";
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < 3; ++i) {
      SweepPoint p;
      p.value = 5.0 * i;
      p.mse_mean = 0.1 / (i + 1 + s) + 1e-17;
      p.mse_stderr = 1.0 / 3.0;
      p.ber_mean = 0.01 * i;
      p.ber_stderr = 2e-4;
      p.trials = 100 - i;
      series[s].points.push_back(p);
    }
  std::ostringstream out;
  write_series_csv(out, series);
  const auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == kSeriesHeader);
  CHECK(lines[1] == "er_n2_db,0,0.10000000000000002,0.3333333333333333,0,2e-04,100,robust|sigma_e2=0.01");

  std::istringstream in(out.str());
  const auto back = read_series_csv(in);
  REQUIRE(back.size() == 2);
  for (int s = 0; s < 2; ++s) {
    CHECK(back[s].label == series[s].label);
    CHECK(back[s].axis == series[s].axis);
    REQUIRE(back[s].points.size() == 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(back[s].points[i].value == series[s].points[i].value);
      CHECK(back[s].points[i].mse_mean == series[s].points[i].mse_mean);
      CHECK(back[s].points[i].mse_stderr == series[s].points[i].mse_stderr);
      CHECK(back[s].points[i].ber_mean == series[s].points[i].ber_mean);
      CHECK(back[s].points[i].trials == series[s].points[i].trials);
    }
  }
}

TEST_CASE("reading tolerates CRLF and reordered columns") {
  const std::string text =
      "variant,axis,value,mse_mean,mse_stderr,ber_mean,ber_stderr,trials\r\n"
      "hsa,alpha,0.2,1.5,0.1,0,0,10\r\n";
  std::istringstream in(text);
  const auto s = read_series_csv(in);
  REQUIRE(s.size() == 1);
  CHECK(s[0].label == "hsa");
  CHECK(s[0].axis == "alpha");
  CHECK(s[0].points[0].mse_mean == 1.5);
}

TEST_CASE("malformed series files are I/O errors") {
  CHECK(read_kind("") == ErrorKind::kIo);
  CHECK(read_kind("axis,value\n") == ErrorKind::kIo);
  CHECK(read_kind(std::string(kSeriesHeader) + "\nx,1,2\n") == ErrorKind::kIo);
  CHECK(read_kind(std::string(kSeriesHeader) + "\nx,one,2,3,4,5,6,v\n") == ErrorKind::kIo);
  std::istringstream in("axis,value,mse_mean\n");
  try {
    read_series_csv(in);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("mse_stderr") != std::string::npos);
  }
}

TEST_CASE("channel round trip") {
  RandomStream rng(8);
  const MultipathChannel ch = generate_channel(2, 3, exponential_profile(4), rng);
  std::ostringstream out;
  write_channel_csv(out, ch);
  CHECK(lines_of(out.str())[0].rfind("tap,power,rows,cols,re_0,im_0", 0) == 0);
  std::istringstream in(out.str());
  const MultipathChannel back = read_channel_csv(in);
  REQUIRE(back.length() == 4);
  for (int l = 0; l < 4; ++l) {
    CHECK(back.tap_powers[l] == ch.tap_powers[l]);
    CHECK(back.taps[l] == ch.taps[l]);
  }
  std::istringstream bad("tap,power,rows,cols\n0,1,2,2,1,0\n");
  CHECK_THROWS_AS(read_channel_csv(bad), Error);
}

TEST_CASE("solution and moments layouts") {
  RandomStream rng(9);
  InstanceSpec spec;
  spec.subcarriers = 4;
  spec.taps = 2;
  const Instance inst = random_instance(spec, rng);
  const TransceiverSolution sol = solve(inst.inputs, inst.p_r, Variant::kRobust);
  std::ostringstream out;
  write_solution_csv(out, sol);
  const auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == kSolutionHeader);
  CHECK(lines[1].rfind("0,", 0) == 0);
  // Two active modes give one ';' in each lambda list.
  if (sol.subcarriers[0].active_modes == 2)
    CHECK(std::count(lines[1].begin(), lines[1].end(), ';') == 2);

  std::ostringstream m;
  write_moments_csv(m, inst.moments);
  const auto ml = lines_of(m.str());
  CHECK(ml[0] == kMomentsHeader);
  const std::size_t phi_entries = inst.moments.phi.size();
  const std::size_t psi_entries = 4 * inst.moments.psi[0].size();
  CHECK(ml.size() == 1 + phi_entries + psi_entries);
  CHECK(ml[1].rfind("phi,-1,0,0,", 0) == 0);
  CHECK(ml[1 + phi_entries].rfind("psi,0,0,0,", 0) == 0);
  CHECK(ml.back().rfind("psi,3,", 0) == 0);
}

TEST_CASE("unwritable path is an I/O error") {
  try {
    write_text_file("/nonexistent-dir/out.csv", "x");
    FAIL("write succeeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIo);
  }
}
