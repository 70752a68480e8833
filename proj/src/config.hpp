#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "solver.hpp"

namespace afrelay {

// One experiment. Keys in the flat text format share these field names.
struct ExperimentConfig {
  int n_s = 2;
  int m_r = 2;
  int n_r = 2;
  int m_d = 2;
  int subcarriers = 64;
  int taps = 5;
  double pdp_decay = 1.0;
  int training_length = 0;  // 0: max(subcarriers, taps * max(n_s, n_r))
  double es_n1_db = 30.0;
  double er_n2_db = 20.0;
  double sigma_e2 = 0.01;
  double alpha = 0.0;
  std::string estimator = "ml";  // "ml" or "lmmse" (priors from the power-delay profile)
  Variant variant = Variant::kRobust;
  double threshold = kDefaultThreshold;
  int trials = 500;
  std::uint64_t seed = 1;
  int symbols_per_trial = 8;
  int threads = 0;  // 0: AFRELAY_THREADS, else hardware concurrency
  std::string sweep_axis = "er_n2_db";
  std::vector<double> sweep_values;  // empty: a single point at the scalar value
};

std::vector<std::string> config_keys();

// Throws kUnknownKey for an unrecognized key and kValidation for a malformed value.
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);
std::string get_config_value(const ExperimentConfig& config, const std::string& key);

// Parses `key = value` lines; '#' starts a comment. Throws kIo when unreadable.
void load_config_file(ExperimentConfig& config, const std::string& path);
void parse_config_text(ExperimentConfig& config, const std::string& text, const std::string& origin = "<text>");

// Throws kValidation naming the first violated invariant.
void validate_config(const ExperimentConfig& config);

int effective_training_length(const ExperimentConfig& config);
// P_r = 10^(E_r/N_2 / 10) K M_D with sigma_n2^2 = 1.
double relay_power_budget(const ExperimentConfig& config);
// sigma_n1^2 = N_S / (M_R 10^(E_s/N_1 / 10)) for unit-power streams.
double first_hop_noise(const ExperimentConfig& config);
inline constexpr double kSecondHopNoise = 1.0;

struct SeriesSpec {
  std::string label;  // "variant|key=value"
  ExperimentConfig config;
};

struct FigurePreset {
  int number = 0;
  std::string metric;  // "mse" or "ber"
  std::string axis;
  std::vector<double> values;
  std::vector<SeriesSpec> series;
};

std::vector<int> figure_numbers();
// Throws kValidation for an unknown figure number. `overrides` are applied
// to every series after the preset values, so subcarriers and trials can be
// scaled down.
FigurePreset figure_preset(int number, const std::map<std::string, std::string>& overrides = {});

}  // namespace afrelay
