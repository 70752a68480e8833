#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "channel.hpp"
#include "config.hpp"
#include "estimation.hpp"
#include "msemodel.hpp"
#include "solver.hpp"

namespace afrelay {

struct TrialOptions {
  bool zero_equalizer = false;  // diagnostic: replace every G_k by 0
};

struct TrialResult {
  bool feasible = true;
  double mse = 0.0;           // (1/K) sum_k mean over symbols of ||G y - s||^2
  double analytic_mse = 0.0;  // (1/K) total analytic MSE of the deployed design
  std::uint64_t bit_errors = 0;
  std::uint64_t bits = 0;
  Variant applied = Variant::kUncorrelated;
};

// One trial's random channel state: true channels and the link the designer sees.
struct TrialDraw {
  SubcarrierChannels truth_sr;
  SubcarrierChannels truth_rd;
  LinkInputs estimated;  // estimates with the true error moments
};

// Holds everything that is fixed across the trials of one configuration.
// `run` is const and thread-safe; trial t always draws from the stream keyed
// by (seed, t), so results do not depend on scheduling.
class TrialEngine {
 public:
  explicit TrialEngine(const ExperimentConfig& config);

  TrialDraw draw(std::uint64_t trial) const;
  // The design a trial deploys: solve() and, for the naive variant, the fit
  // to the relay budget under the true receive covariance.
  TransceiverSolution design(const LinkInputs& estimated) const;
  TrialResult run(std::uint64_t trial, const TrialOptions& options = {}) const;

  const ExperimentConfig& config() const { return config_; }
  const ErrorMoments& moments_sr() const { return moments_sr_; }
  const ErrorMoments& moments_rd() const { return moments_rd_; }
  double relay_budget() const { return relay_budget_; }
  double sigma_n1_2() const { return sigma_n1_2_; }

 private:
  ExperimentConfig config_;
  std::vector<double> profile_;
  ErrorMoments moments_sr_;
  ErrorMoments moments_rd_;
  double relay_budget_ = 0.0;
  double sigma_n1_2_ = 0.0;
};

TrialResult run_trial(const ExperimentConfig& config, std::uint64_t trial, const TrialOptions& options = {});

struct SweepPoint {
  double value = 0.0;
  double mse_mean = 0.0;
  double mse_stderr = 0.0;
  double ber_mean = 0.0;
  double ber_stderr = 0.0;
  double analytic_mean = 0.0;
  double analytic_stderr = 0.0;
  int trials = 0;      // feasible trials aggregated
  int infeasible = 0;  // excluded trials
  // Per-trial values indexed by trial number; NaN marks an excluded trial.
  std::vector<double> mse_samples;
  std::vector<double> ber_samples;
  std::vector<double> analytic_samples;
};

struct MetricSeries {
  std::string axis;
  std::string label;
  std::vector<SweepPoint> points;
};

// Worker count: `requested` if > 0, else AFRELAY_THREADS, else hardware concurrency.
int resolve_threads(int requested);

// Runs config.trials trials at each value of config.sweep_axis (or the single
// configured point when sweep_values is empty).
MetricSeries sweep(const ExperimentConfig& config, const std::string& label = "", const TrialOptions& options = {});

std::vector<MetricSeries> run_figure(const FigurePreset& preset);

// Mean of a - b over trials feasible in both and its standard error.
struct PairedDifference {
  double mean = 0.0;
  double stderr_ = 0.0;
  int count = 0;
};
PairedDifference paired_difference(const std::vector<double>& a, const std::vector<double>& b);

// Sum in a fixed binary-tree order.
double pairwise_sum(const std::vector<double>& values);

}  // namespace afrelay
