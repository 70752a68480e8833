#include <cmath>

#include "config.hpp"
#include "doctest.h"
#include "montecarlo.hpp"

using namespace afrelay;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.subcarriers = 8;
  c.taps = 3;
  c.trials = 40;
  c.symbols_per_trial = 4;
  c.seed = 99;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("pairwise sum and paired differences") {
  std::vector<double> v;
  double naive = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    v.push_back(1.0 / i);
    naive += 1.0 / i;
  }
  CHECK(pairwise_sum(v) == doctest::Approx(naive).epsilon(1e-14));
  CHECK(pairwise_sum({}) == 0.0);

  const double nan = std::nan("");
  const PairedDifference d = paired_difference({3.0, 5.0, nan, 4.0}, {1.0, 2.0, 9.0, 2.0});
  CHECK(d.count == 3);
  CHECK(d.mean == doctest::Approx((2.0 + 3.0 + 2.0) / 3.0));
  // Sample sd of {2, 3, 2} is 1/sqrt(3); stderr divides by sqrt(3).
  CHECK(d.stderr_ == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("noiseless perfect-CSI limit decodes everything") {
  ExperimentConfig c = small_config();
  c.sigma_e2 = 0.0;
  c.es_n1_db = 90.0;
  c.er_n2_db = 90.0;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const TrialResult r = run_trial(c, t);
    CHECK(r.feasible);
    CHECK(r.mse < 1e-4);
    CHECK(r.bit_errors == 0);
    CHECK(r.bits == static_cast<std::uint64_t>(2 * c.n_s * c.subcarriers * c.symbols_per_trial));
  }
}

TEST_CASE("a zero equalizer leaves exactly the symbol energy") {
  ExperimentConfig c = small_config();
  TrialOptions o;
  o.zero_equalizer = true;
  for (std::uint64_t t = 0; t < 5; ++t) {
    const TrialResult r = run_trial(c, t, o);
    CHECK(r.mse == doctest::Approx(static_cast<double>(c.n_s)).epsilon(1e-12));
    CHECK(r.analytic_mse == doctest::Approx(static_cast<double>(c.n_s)).epsilon(1e-12));
  }
}

TEST_CASE("a single-point sweep aggregates the individual trials") {
  ExperimentConfig c = small_config();
  c.trials = 12;
  const MetricSeries s = sweep(c, "robust");
  REQUIRE(s.points.size() == 1);
  CHECK(s.axis == "er_n2_db");
  CHECK(s.points[0].value == c.er_n2_db);
  double mse = 0.0, ber = 0.0;
  for (int t = 0; t < c.trials; ++t) {
    const TrialResult r = run_trial(c, t);
    mse += r.mse;
    ber += static_cast<double>(r.bit_errors) / static_cast<double>(r.bits);
    CHECK(s.points[0].mse_samples[t] == r.mse);
  }
  CHECK(s.points[0].trials == c.trials);
  CHECK(s.points[0].mse_mean == doctest::Approx(mse / c.trials).epsilon(1e-13));
  CHECK(s.points[0].ber_mean == doctest::Approx(ber / c.trials).epsilon(1e-13));
}

TEST_CASE("sweeps are identical for any number of workers") {
  ExperimentConfig c = small_config();
  c.trials = 16;
  c.sweep_axis = "sigma_e2";
  c.sweep_values = {0.002, 0.02};
  const MetricSeries a = sweep(c);
  c.threads = 3;
  const MetricSeries b = sweep(c);
  REQUIRE(a.points.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(a.points[i].value == c.sweep_values[i]);
    CHECK(a.points[i].mse_mean == b.points[i].mse_mean);
    CHECK(a.points[i].ber_mean == b.points[i].ber_mean);
    CHECK(a.points[i].mse_stderr == b.points[i].mse_stderr);
  }
  CHECK(a.points[1].mse_mean > a.points[0].mse_mean);
}

TEST_CASE("empirical MSE agrees with the analytic prediction") {
  for (const double alpha : {0.0, 0.4}) {
    ExperimentConfig c = small_config();
    c.trials = 300;
    c.symbols_per_trial = 16;
    c.alpha = alpha;
    c.sigma_e2 = 0.01;
    c.er_n2_db = 15.0;
    const MetricSeries s = sweep(c);
    const SweepPoint& p = s.points[0];
    const PairedDifference d = paired_difference(p.mse_samples, p.analytic_samples);
    INFO("alpha " << alpha << " empirical " << p.mse_mean << " analytic " << p.analytic_mean << " diff "
                  << d.mean << " +- " << d.stderr_);
    CHECK(std::abs(d.mean) <= 3.0 * d.stderr_);
  }
}

TEST_CASE("figure runs produce one series per preset entry") {
  const FigurePreset p = figure_preset(6, {{"subcarriers", "8"}, {"taps", "3"}, {"trials", "4"}, {"threads", "1"}});
  const std::vector<MetricSeries> out = run_figure(p);
  REQUIRE(out.size() == 3);
  CHECK(out[0].label == "hsa|sigma_e2=0.1");
  for (const auto& s : out) {
    CHECK(s.axis == "er_n2_db");
    CHECK(s.points.size() == p.values.size());
  }
}
