#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "errors.hpp"

namespace afrelay {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(value))
    fail(ErrorKind::kValidation, "config key '" + key + "': '" + text + "' is not a finite number");
  return value;
}

long long parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long value = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    fail(ErrorKind::kValidation, "config key '" + key + "': '" + text + "' is not an integer");
  return value;
}

int parse_int(const std::string& key, const std::string& text) {
  const long long v = parse_integer(key, text);
  if (v < -1000000000LL || v > 1000000000LL) fail(ErrorKind::kValidation, "config key '" + key + "' is out of range");
  return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find(':');
    if (first == std::string::npos) {
      out.push_back(parse_double(key, item));
      continue;
    }
    // start:step:stop, inclusive of stop up to rounding.
    const auto second = item.find(':', first + 1);
    if (second == std::string::npos)
      fail(ErrorKind::kValidation, "config key '" + key + "': range '" + trim(item) + "' must be start:step:stop");
    const double start = parse_double(key, item.substr(0, first));
    const double step = parse_double(key, item.substr(first + 1, second - first - 1));
    const double stop = parse_double(key, item.substr(second + 1));
    if (!(step > 0.0) || stop < start)
      fail(ErrorKind::kValidation, "config key '" + key + "': range '" + trim(item) + "' needs step > 0 and stop >= start");
    const long long count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 100000) fail(ErrorKind::kValidation, "config key '" + key + "': range has too many points");
    for (long long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  }
  return out;
}

struct KeyHandler {
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
KeyHandler int_key(T ExperimentConfig::*field) {
  return {[field](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*field = parse_int(k, v); },
          [field](const ExperimentConfig& c) { return std::to_string(c.*field); }};
}

KeyHandler double_key(double ExperimentConfig::*field) {
  return {[field](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*field = parse_double(k, v); },
          [field](const ExperimentConfig& c) { return format_number(c.*field); }};
}

const std::map<std::string, KeyHandler>& handlers() {
  static const std::map<std::string, KeyHandler> table = {
      {"n_s", int_key(&ExperimentConfig::n_s)},
      {"m_r", int_key(&ExperimentConfig::m_r)},
      {"n_r", int_key(&ExperimentConfig::n_r)},
      {"m_d", int_key(&ExperimentConfig::m_d)},
      {"subcarriers", int_key(&ExperimentConfig::subcarriers)},
      {"taps", int_key(&ExperimentConfig::taps)},
      {"pdp_decay", double_key(&ExperimentConfig::pdp_decay)},
      {"training_length", int_key(&ExperimentConfig::training_length)},
      {"es_n1_db", double_key(&ExperimentConfig::es_n1_db)},
      {"er_n2_db", double_key(&ExperimentConfig::er_n2_db)},
      {"sigma_e2", double_key(&ExperimentConfig::sigma_e2)},
      {"alpha", double_key(&ExperimentConfig::alpha)},
      {"estimator",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          const std::string t = trim(v);
          if (t != "ml" && t != "lmmse")
            fail(ErrorKind::kValidation, "config key '" + k + "': expected ml or lmmse, got '" + t + "'");
          c.estimator = t;
        },
        [](const ExperimentConfig& c) { return c.estimator; }}},
      {"variant",
       {[](ExperimentConfig& c, const std::string&, const std::string& v) { c.variant = parse_variant(trim(v)); },
        [](const ExperimentConfig& c) { return std::string(variant_name(c.variant)); }}},
      {"threshold", double_key(&ExperimentConfig::threshold)},
      {"trials", int_key(&ExperimentConfig::trials)},
      {"seed",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          const std::string t = trim(v);
          if (!t.empty() && t[0] == '-') fail(ErrorKind::kValidation, "config key 'seed' must be >= 0");
          std::uint64_t s = 0;
          const auto res = std::from_chars(t.data(), t.data() + t.size(), s);
          if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
            fail(ErrorKind::kValidation, "config key '" + k + "': '" + v + "' is not an unsigned integer");
          c.seed = s;
        },
        [](const ExperimentConfig& c) { return std::to_string(c.seed); }}},
      {"symbols_per_trial", int_key(&ExperimentConfig::symbols_per_trial)},
      {"threads", int_key(&ExperimentConfig::threads)},
      {"sweep_axis",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          const std::string t = trim(v);
          if (t != "er_n2_db" && t != "sigma_e2" && t != "alpha")
            fail(ErrorKind::kValidation, "config key '" + k + "': axis must be er_n2_db, sigma_e2 or alpha");
          c.sweep_axis = t;
        },
        [](const ExperimentConfig& c) { return c.sweep_axis; }}},
      {"sweep_values",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sweep_values = parse_list(k, v); },
        [](const ExperimentConfig& c) {
          std::string out;
          for (std::size_t i = 0; i < c.sweep_values.size(); ++i)
            out += (i ? "," : "") + format_number(c.sweep_values[i]);
          return out;
        }}},
  };
  return table;
}

const KeyHandler& handler_for(const std::string& key) {
  const auto& table = handlers();
  const auto it = table.find(key);
  if (it == table.end()) fail(ErrorKind::kUnknownKey, "unknown config key '" + key + "'");
  return it->second;
}

std::vector<double> range(double first, double last, double step) {
  std::vector<double> out;
  for (double v = first; v <= last + 1e-9; v += step) out.push_back(v);
  return out;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : handlers()) keys.push_back(k);
  return keys;
}

void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  handler_for(trim(key)).set(config, trim(key), value);
}

std::string get_config_value(const ExperimentConfig& config, const std::string& key) {
  return handler_for(trim(key)).get(config);
}

void parse_config_text(ExperimentConfig& config, const std::string& text, const std::string& origin) {
  std::stringstream ss(text);
  std::string line;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::kValidation, origin + ":" + std::to_string(number) + ": expected key = value");
    try {
      set_config_value(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      fail(e.kind(), origin + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void load_config_file(ExperimentConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  parse_config_text(config, buffer.str(), path);
}

int effective_training_length(const ExperimentConfig& c) {
  if (c.training_length > 0) return c.training_length;
  return std::max(c.subcarriers, c.taps * std::max(c.n_s, c.n_r));
}

void validate_config(const ExperimentConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::kValidation, "invalid config: " + what);
  };
  require(c.n_s >= 1, "n_s >= 1");
  require(c.m_r >= c.n_s, "m_r >= n_s");
  require(c.n_r >= c.n_s, "n_r >= n_s");
  require(c.m_d >= c.n_s, "m_d >= n_s");
  require(c.taps >= 1, "taps >= 1");
  require(c.subcarriers >= c.taps, "subcarriers >= taps");
  require(c.pdp_decay >= 0.0, "pdp_decay >= 0");
  require(c.training_length >= 0, "training_length >= 0");
  require(effective_training_length(c) >= c.taps * std::max(c.n_s, c.n_r),
          "training_length >= taps * max(n_s, n_r) (training must identify every tap)");
  require(c.sigma_e2 >= 0.0, "sigma_e2 >= 0");
  require(c.alpha >= 0.0 && c.alpha < 1.0, "0 <= alpha < 1");
  require(c.threshold >= 0.0, "threshold >= 0");
  require(c.trials >= 1, "trials >= 1");
  require(c.symbols_per_trial >= 1, "symbols_per_trial >= 1");
  require(c.threads >= 0, "threads >= 0");
  for (double v : c.sweep_values) {
    if (c.sweep_axis == "sigma_e2") require(v >= 0.0, "sigma_e2 sweep values >= 0");
    if (c.sweep_axis == "alpha") require(v >= 0.0 && v < 1.0, "alpha sweep values in [0, 1)");
  }
}

double relay_power_budget(const ExperimentConfig& c) {
  return std::pow(10.0, c.er_n2_db / 10.0) * c.subcarriers * c.m_d * kSecondHopNoise;
}

double first_hop_noise(const ExperimentConfig& c) {
  return static_cast<double>(c.n_s) / (c.m_r * std::pow(10.0, c.es_n1_db / 10.0));
}

std::vector<int> figure_numbers() { return {2, 3, 4, 5, 6}; }

FigurePreset figure_preset(int number, const std::map<std::string, std::string>& overrides) {
  FigurePreset p;
  p.number = number;
  ExperimentConfig base;
  base.n_s = base.m_r = base.n_r = base.m_d = 2;
  base.subcarriers = 64;
  base.taps = 5;
  base.es_n1_db = 30.0;
  base.threshold = kDefaultThreshold;
  base.trials = 500;

  auto add = [&](Variant v, const std::string& key, double value, const ExperimentConfig& cfg) {
    SeriesSpec s;
    s.config = cfg;
    s.config.variant = v;
    set_config_value(s.config, key, format_number(value));
    s.label = std::string(variant_name(v)) + "|" + key + "=" + format_number(value);
    p.series.push_back(s);
  };

  const std::vector<double> snr_axis = range(0.0, 30.0, 5.0);
  const std::vector<double> error_levels = {0.002, 0.005, 0.01};
  switch (number) {
    case 2:
    case 3:
    case 5: {
      p.metric = number == 5 ? "ber" : "mse";
      base.alpha = number == 2 ? 0.0 : (number == 3 ? 0.4 : 0.5);
      p.axis = "er_n2_db";
      p.values = snr_axis;
      for (double e : error_levels)
        for (Variant v : {Variant::kRobust, Variant::kNaive}) add(v, "sigma_e2", e, base);
      break;
    }
    case 4: {
      p.metric = "mse";
      base.er_n2_db = 25.0;
      p.axis = "alpha";
      p.values = {0.0, 0.2, 0.4, 0.6};
      for (Variant v : {Variant::kRobust, Variant::kNaive}) add(v, "sigma_e2", 0.01, base);
      break;
    }
    case 6: {
      p.metric = "mse";
      base.alpha = 0.4;
      p.axis = "er_n2_db";
      p.values = snr_axis;
      for (Variant v : {Variant::kHsa, Variant::kSpa, Variant::kSwitched}) add(v, "sigma_e2", 0.1, base);
      break;
    }
    default:
      fail(ErrorKind::kValidation, "no preset for figure " + std::to_string(number) + " (available: 2, 3, 4, 5, 6)");
  }

  for (auto& s : p.series) {
    for (const auto& [k, v] : overrides) set_config_value(s.config, k, v);
    s.config.sweep_axis = p.axis;
    s.config.sweep_values = p.values;
    validate_config(s.config);
  }
  return p;
}

}  // namespace afrelay
