#include "montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "errors.hpp"
#include "training.hpp"

namespace afrelay {

namespace {

enum StreamId : std::uint64_t { kChannelSr = 1, kChannelRd = 2, kErrorSr = 3, kErrorRd = 4, kData = 5 };

Complex qpsk(bool b0, bool b1) {
  const double a = 1.0 / std::sqrt(2.0);
  return {b0 ? -a : a, b1 ? -a : a};
}

double mean_of(const std::vector<double>& v) { return v.empty() ? 0.0 : pairwise_sum(v) / v.size(); }

double stderr_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  return std::sqrt(pairwise_sum(sq) / (v.size() - 1) / v.size());
}

}  // namespace

double pairwise_sum(const std::vector<double>& values) {
  // Iterative bottom-up tree so the grouping depends only on the length.
  if (values.empty()) return 0.0;
  std::vector<double> level = values;
  while (level.size() > 1) {
    std::vector<double> next((level.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = 2 * i + 1 < level.size() ? level[2 * i] + level[2 * i + 1] : level[2 * i];
    level.swap(next);
  }
  return level.front();
}

PairedDifference paired_difference(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) fail(ErrorKind::kDimension, "paired_difference: sample vectors differ in length");
  std::vector<double> d;
  d.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::isfinite(a[i]) && std::isfinite(b[i])) d.push_back(a[i] - b[i]);
  PairedDifference out;
  out.count = static_cast<int>(d.size());
  out.mean = mean_of(d);
  out.stderr_ = stderr_of(d, out.mean);
  return out;
}

TrialEngine::TrialEngine(const ExperimentConfig& config) : config_(config) {
  validate_config(config_);
  profile_ = exponential_profile(config_.taps, config_.pdp_decay);
  const int training = effective_training_length(config_);
  const TapPriors priors = config_.estimator == "lmmse" ? TapPriors(profile_) : TapPriors{};
  moments_sr_ = error_moments(build_gram(training, config_.taps, config_.n_s, config_.alpha), priors,
                              config_.sigma_e2, config_.subcarriers);
  moments_rd_ = error_moments(build_gram(training, config_.taps, config_.n_r, config_.alpha), priors,
                              config_.sigma_e2, config_.subcarriers);
  relay_budget_ = relay_power_budget(config_);
  sigma_n1_2_ = first_hop_noise(config_);
}

TrialDraw TrialEngine::draw(std::uint64_t trial) const {
  const RandomStream root(config_.seed, trial);
  RandomStream ch_sr = root.child(kChannelSr);
  RandomStream ch_rd = root.child(kChannelRd);
  RandomStream err_sr = root.child(kErrorSr);
  RandomStream err_rd = root.child(kErrorRd);
  const int k_count = config_.subcarriers;

  const MultipathChannel sr = generate_channel(config_.m_r, config_.n_s, profile_, ch_sr);
  const MultipathChannel rd = generate_channel(config_.m_d, config_.n_r, profile_, ch_rd);
  const ChannelEstimate est_sr = sample_estimate(sr, moments_sr_, k_count, err_sr);
  const ChannelEstimate est_rd = sample_estimate(rd, moments_rd_, k_count, err_rd);

  TrialDraw out;
  out.truth_sr = to_frequency(sr, k_count);
  out.truth_rd = to_frequency(rd, k_count);
  out.estimated.sigma_n1_2 = sigma_n1_2_;
  out.estimated.sigma_n2_2 = kSecondHopNoise;
  out.estimated.links.resize(k_count);
  for (int k = 0; k < k_count; ++k) {
    auto& link = out.estimated.links[k];
    link.h_sr = est_sr.estimated.per_subcarrier[k];
    link.h_rd = est_rd.estimated.per_subcarrier[k];
    link.r_s = ComplexMatrix::Identity(config_.n_s, config_.n_s);
    link.psi_sr = moments_sr_.psi[k];
    link.psi_rd = moments_rd_.psi[k];
  }
  return out;
}

TransceiverSolution TrialEngine::design(const LinkInputs& estimated) const {
  TransceiverSolution sol = solve(estimated, relay_budget_, config_.variant, config_.threshold);
  if (config_.variant == Variant::kNaive) sol = fit_power_budget(sol, estimated);
  return sol;
}

TrialResult TrialEngine::run(std::uint64_t trial, const TrialOptions& options) const {
  const TrialDraw d = draw(trial);
  TrialResult result;
  TransceiverSolution sol;
  try {
    sol = design(d.estimated);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInfeasible) throw;
    result.feasible = false;
    return result;
  }
  result.applied = sol.applied;
  if (options.zero_equalizer)
    for (auto& sc : sol.subcarriers) sc.g.setZero();

  const int k_count = config_.subcarriers;
  result.analytic_mse = total_mse(sol.precoders(), sol.equalizers(), d.estimated) / k_count;

  RandomStream data = RandomStream(config_.seed, trial).child(kData);
  const double n1 = sigma_n1_2_;
  const double n2 = kSecondHopNoise;
  std::vector<double> per_carrier(static_cast<std::size_t>(k_count));
  ComplexVector s(config_.n_s), v1(config_.m_r), v2(config_.m_d);
  std::vector<bool> b(static_cast<std::size_t>(2 * config_.n_s));
  for (int k = 0; k < k_count; ++k) {
    const ComplexMatrix& f = sol.subcarriers[k].f;
    const ComplexMatrix& g = sol.subcarriers[k].g;
    const ComplexMatrix& h_sr = d.truth_sr.per_subcarrier[k];
    const ComplexMatrix& h_rd = d.truth_rd.per_subcarrier[k];
    double err = 0.0;
    for (int t = 0; t < config_.symbols_per_trial; ++t) {
      for (int i = 0; i < config_.n_s; ++i) {
        const std::uint32_t bits = data.bits(2);
        b[2 * i] = bits & 1u;
        b[2 * i + 1] = (bits >> 1) & 1u;
        s(i) = qpsk(b[2 * i], b[2 * i + 1]);
      }
      for (int i = 0; i < config_.m_r; ++i) v1(i) = data.complex_normal(n1);
      for (int i = 0; i < config_.m_d; ++i) v2(i) = data.complex_normal(n2);
      const ComplexVector relay_out = f * (h_sr * s + v1);
      const ComplexVector estimate = g * (h_rd * relay_out + v2);
      err += (estimate - s).squaredNorm();
      for (int i = 0; i < config_.n_s; ++i) {
        result.bit_errors += (estimate(i).real() < 0.0) != b[2 * i];
        result.bit_errors += (estimate(i).imag() < 0.0) != b[2 * i + 1];
      }
      result.bits += 2u * static_cast<std::uint64_t>(config_.n_s);
    }
    per_carrier[k] = err / config_.symbols_per_trial;
  }
  result.mse = pairwise_sum(per_carrier) / k_count;
  return result;
}

TrialResult run_trial(const ExperimentConfig& config, std::uint64_t trial, const TrialOptions& options) {
  return TrialEngine(config).run(trial, options);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("AFRELAY_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

std::vector<TrialResult> run_trials(const TrialEngine& engine, int trials, int threads, const TrialOptions& options) {
  std::vector<TrialResult> results(static_cast<std::size_t>(trials));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(trials));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) {
      try {
        results[t] = engine.run(static_cast<std::uint64_t>(t), options);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min(threads, trials));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

SweepPoint aggregate(double value, const std::vector<TrialResult>& results) {
  SweepPoint p;
  p.value = value;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> mse, ber, analytic;
  for (const auto& r : results) {
    if (!r.feasible) {
      ++p.infeasible;
      p.mse_samples.push_back(nan);
      p.ber_samples.push_back(nan);
      p.analytic_samples.push_back(nan);
      continue;
    }
    const double e = r.bits ? static_cast<double>(r.bit_errors) / static_cast<double>(r.bits) : 0.0;
    p.mse_samples.push_back(r.mse);
    p.ber_samples.push_back(e);
    p.analytic_samples.push_back(r.analytic_mse);
    mse.push_back(r.mse);
    ber.push_back(e);
    analytic.push_back(r.analytic_mse);
  }
  p.trials = static_cast<int>(mse.size());
  p.mse_mean = mean_of(mse);
  p.mse_stderr = stderr_of(mse, p.mse_mean);
  p.ber_mean = mean_of(ber);
  p.ber_stderr = stderr_of(ber, p.ber_mean);
  p.analytic_mean = mean_of(analytic);
  p.analytic_stderr = stderr_of(analytic, p.analytic_mean);
  return p;
}

}  // namespace

MetricSeries sweep(const ExperimentConfig& config, const std::string& label, const TrialOptions& options) {
  validate_config(config);
  MetricSeries series;
  series.axis = config.sweep_axis;
  series.label = label.empty() ? std::string(variant_name(config.variant)) : label;
  std::vector<double> values = config.sweep_values;
  if (values.empty()) values.push_back(std::stod(get_config_value(config, config.sweep_axis)));
  const int threads = resolve_threads(config.threads);
  for (double v : values) {
    ExperimentConfig point = config;
    if (config.sweep_axis == "er_n2_db")
      point.er_n2_db = v;
    else if (config.sweep_axis == "sigma_e2")
      point.sigma_e2 = v;
    else if (config.sweep_axis == "alpha")
      point.alpha = v;
    else
      fail(ErrorKind::kValidation, "sweep axis must be er_n2_db, sigma_e2 or alpha");
    const TrialEngine engine(point);
    series.points.push_back(aggregate(v, run_trials(engine, point.trials, threads, options)));
  }
  return series;
}

std::vector<MetricSeries> run_figure(const FigurePreset& preset) {
  std::vector<MetricSeries> out;
  out.reserve(preset.series.size());
  for (const auto& s : preset.series) out.push_back(sweep(s.config, s.label));
  return out;
}

}  // namespace afrelay
