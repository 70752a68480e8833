#include "afrelay/afrelay.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <algorithm>
#include <map>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "checks.hpp"
#include "config.hpp"
#include "csv_io.hpp"
#include "errors.hpp"
#include "montecarlo.hpp"
#include "solver.hpp"

struct afr_config {
  afrelay::ExperimentConfig value;
};

struct afr_solution {
  afrelay::TransceiverSolution solution;
  afrelay::LinkInputs actual;
  double analytic_mse = 0.0;
  double power_residual = 0.0;
};

struct afr_series {
  std::vector<afrelay::MetricSeries> series;
  std::string metric;
};

struct afr_check_report {
  std::vector<afrelay::CheckItem> items;
};

namespace {

thread_local std::string last_error;

afr_status status_of(afrelay::ErrorKind kind) {
  using afrelay::ErrorKind;
  switch (kind) {
    case ErrorKind::kContractViolation: return AFR_ERR_INVALID_ARGUMENT;
    case ErrorKind::kDimension: return AFR_ERR_DIMENSION;
    case ErrorKind::kNumericalFailure: return AFR_ERR_NUMERICAL;
    case ErrorKind::kSingular: return AFR_ERR_SINGULAR;
    case ErrorKind::kIdentifiability: return AFR_ERR_IDENTIFIABILITY;
    case ErrorKind::kInfeasible: return AFR_ERR_INFEASIBLE;
    case ErrorKind::kValidation: return AFR_ERR_VALIDATION;
    case ErrorKind::kUnknownKey: return AFR_ERR_UNKNOWN_KEY;
    case ErrorKind::kIo: return AFR_ERR_IO;
  }
  return AFR_ERR_INTERNAL;
}

afr_status set_error(afr_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs `body` and converts any exception into a status plus a thread-local message.
template <class F>
afr_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const afrelay::Error& e) {
    return set_error(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(AFR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(AFR_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(AFR_ERR_INTERNAL, "unknown exception");
  }
}

afr_status null_argument(const char* what) { return set_error(AFR_ERR_INVALID_ARGUMENT, std::string(what) + " is null"); }

afr_status copy_out(const std::string& text, char* buffer, size_t capacity, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (buffer == nullptr && capacity == 0) return AFR_OK;
  if (buffer == nullptr) return null_argument("buffer");
  if (capacity < text.size() + 1)
    return set_error(AFR_ERR_BUFFER_TOO_SMALL, "buffer holds " + std::to_string(capacity) + " bytes, " +
                                                   std::to_string(text.size() + 1) + " needed");
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  return AFR_OK;
}

const std::vector<std::string>& key_names() {
  static const std::vector<std::string> keys = afrelay::config_keys();
  return keys;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> suites = afrelay::check_suites();
  return suites;
}

void copy_name(char (&dst)[16], const char* src) {
  std::strncpy(dst, src, sizeof dst - 1);
  dst[sizeof dst - 1] = '\0';
}

}  // namespace

extern "C" {

int afr_abi_version(void) { return AFR_ABI_VERSION; }
int afr_csv_schema_version(void) { return AFR_CSV_SCHEMA_VERSION; }

const char* afr_status_name(afr_status status) {
  switch (status) {
    case AFR_OK: return "ok";
    case AFR_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case AFR_ERR_DIMENSION: return "dimension";
    case AFR_ERR_NUMERICAL: return "numerical";
    case AFR_ERR_SINGULAR: return "singular";
    case AFR_ERR_IDENTIFIABILITY: return "identifiability";
    case AFR_ERR_INFEASIBLE: return "infeasible";
    case AFR_ERR_VALIDATION: return "validation";
    case AFR_ERR_UNKNOWN_KEY: return "unknown_key";
    case AFR_ERR_IO: return "io";
    case AFR_ERR_BUFFER_TOO_SMALL: return "buffer_too_small";
    case AFR_ERR_INTERNAL: return "internal";
  }
  return "unrecognized_status";
}

const char* afr_last_error(void) { return last_error.c_str(); }

afr_status afr_config_create(afr_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new afr_config();
    return AFR_OK;
  });
}

void afr_config_destroy(afr_config* config) { delete config; }

afr_status afr_config_copy(const afr_config* config, afr_config** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new afr_config(*config);
    return AFR_OK;
  });
}

afr_status afr_config_set(afr_config* config, const char* key, const char* value) {
  if (!config) return null_argument("config");
  if (!key) return null_argument("key");
  if (!value) return null_argument("value");
  return guarded([&] {
    afrelay::set_config_value(config->value, key, value);
    return AFR_OK;
  });
}

afr_status afr_config_get(const afr_config* config, const char* key, char* buffer, size_t capacity, size_t* needed) {
  if (!config) return null_argument("config");
  if (!key) return null_argument("key");
  return guarded([&] { return copy_out(afrelay::get_config_value(config->value, key), buffer, capacity, needed); });
}

afr_status afr_config_parse(afr_config* config, const char* text) {
  if (!config) return null_argument("config");
  if (!text) return null_argument("text");
  return guarded([&] {
    afrelay::parse_config_text(config->value, text);
    return AFR_OK;
  });
}

afr_status afr_config_load(afr_config* config, const char* path) {
  if (!config) return null_argument("config");
  if (!path) return null_argument("path");
  return guarded([&] {
    afrelay::load_config_file(config->value, path);
    return AFR_OK;
  });
}

afr_status afr_config_validate(const afr_config* config) {
  if (!config) return null_argument("config");
  return guarded([&] {
    afrelay::validate_config(config->value);
    return AFR_OK;
  });
}

size_t afr_config_key_count(void) { return key_names().size(); }

const char* afr_config_key_name(size_t index) {
  return index < key_names().size() ? key_names()[index].c_str() : nullptr;
}

afr_status afr_solve(const afr_config* config, uint64_t trial, afr_solution** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    const afrelay::TrialEngine engine(config->value);
    const afrelay::TrialDraw draw = engine.draw(trial);
    auto handle = std::make_unique<afr_solution>();
    handle->solution = engine.design(draw.estimated);
    handle->actual = draw.estimated;
    handle->analytic_mse =
        afrelay::total_mse(handle->solution.precoders(), handle->solution.equalizers(), draw.estimated);
    const afrelay::KktReport rep = afrelay::kkt_residuals(handle->solution, draw.estimated);
    handle->power_residual = std::max(rep.slackness, rep.total_slackness);
    *out = handle.release();
    return AFR_OK;
  });
}

void afr_solution_destroy(afr_solution* solution) { delete solution; }

afr_status afr_solution_info_get(const afr_solution* solution, afr_solution_info* out) {
  if (!solution) return null_argument("solution");
  if (!out) return null_argument("out");
  const auto& s = solution->solution;
  std::memset(out, 0, sizeof *out);
  out->subcarriers = s.size();
  out->total_power = s.total_power;
  for (const auto& sc : s.subcarriers) out->power_sum += sc.power;
  out->gamma = s.gamma;
  copy_name(out->requested, afrelay::variant_name(s.requested));
  copy_name(out->applied, afrelay::variant_name(s.applied));
  out->hsa_votes = s.hsa_votes;
  out->spa_votes = s.spa_votes;
  out->analytic_mse = solution->analytic_mse;
  out->power_residual = solution->power_residual;
  return AFR_OK;
}

afr_status afr_solution_subcarrier(const afr_solution* solution, int subcarrier, afr_subcarrier_summary* out) {
  if (!solution) return null_argument("solution");
  if (!out) return null_argument("out");
  if (subcarrier < 0 || subcarrier >= solution->solution.size())
    return set_error(AFR_ERR_INVALID_ARGUMENT, "subcarrier index " + std::to_string(subcarrier) + " out of range");
  const auto& sc = solution->solution.subcarriers[static_cast<size_t>(subcarrier)];
  out->power = sc.power;
  out->gamma = sc.gamma;
  out->eta = sc.eta;
  out->active_modes = sc.active_modes;
  return AFR_OK;
}

afr_status afr_solution_csv(const afr_solution* solution, char* buffer, size_t capacity, size_t* needed) {
  if (!solution) return null_argument("solution");
  return guarded([&] {
    std::ostringstream os;
    afrelay::write_solution_csv(os, solution->solution);
    return copy_out(os.str(), buffer, capacity, needed);
  });
}

afr_status afr_solution_write_csv(const afr_solution* solution, const char* path) {
  if (!solution) return null_argument("solution");
  if (!path) return null_argument("path");
  return guarded([&] {
    std::ostringstream os;
    afrelay::write_solution_csv(os, solution->solution);
    afrelay::write_text_file(path, os.str());
    return AFR_OK;
  });
}

afr_status afr_moments_write_csv(const afr_config* config, const char* hop, const char* path) {
  if (!config) return null_argument("config");
  if (!hop) return null_argument("hop");
  if (!path) return null_argument("path");
  return guarded([&] {
    const std::string which = hop;
    if (which != "sr" && which != "rd")
      afrelay::fail(afrelay::ErrorKind::kValidation, "hop must be 'sr' or 'rd', got '" + which + "'");
    const afrelay::TrialEngine engine(config->value);
    std::ostringstream os;
    afrelay::write_moments_csv(os, which == "sr" ? engine.moments_sr() : engine.moments_rd());
    afrelay::write_text_file(path, os.str());
    return AFR_OK;
  });
}

afr_status afr_sweep(const afr_config* config, afr_series** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    auto handle = std::make_unique<afr_series>();
    handle->series.push_back(afrelay::sweep(config->value, afrelay::variant_name(config->value.variant)));
    *out = handle.release();
    return AFR_OK;
  });
}

afr_status afr_figure(int number, const char* const* keys, const char* const* values, size_t count,
                      afr_series** out) {
  if (!out) return null_argument("out");
  if (count > 0 && (!keys || !values)) return null_argument("override arrays");
  return guarded([&] {
    std::map<std::string, std::string> overrides;
    for (size_t i = 0; i < count; ++i) {
      if (!keys[i] || !values[i]) return null_argument("override entry");
      overrides[keys[i]] = values[i];
    }
    const afrelay::FigurePreset preset = afrelay::figure_preset(number, overrides);
    auto handle = std::make_unique<afr_series>();
    handle->series = afrelay::run_figure(preset);
    handle->metric = preset.metric;
    *out = handle.release();
    return AFR_OK;
  });
}

void afr_series_destroy(afr_series* series) { delete series; }

const char* afr_series_metric(const afr_series* series) { return series ? series->metric.c_str() : nullptr; }

size_t afr_series_count(const afr_series* series) { return series ? series->series.size() : 0; }

const char* afr_series_label(const afr_series* series, size_t index) {
  return series && index < series->series.size() ? series->series[index].label.c_str() : nullptr;
}

const char* afr_series_axis(const afr_series* series, size_t index) {
  return series && index < series->series.size() ? series->series[index].axis.c_str() : nullptr;
}

size_t afr_series_points(const afr_series* series, size_t index) {
  return series && index < series->series.size() ? series->series[index].points.size() : 0;
}

afr_status afr_series_point(const afr_series* series, size_t index, size_t point, afr_point* out) {
  if (!series) return null_argument("series");
  if (!out) return null_argument("out");
  if (index >= series->series.size() || point >= series->series[index].points.size())
    return set_error(AFR_ERR_INVALID_ARGUMENT, "series/point index out of range");
  const auto& p = series->series[index].points[point];
  out->value = p.value;
  out->mse_mean = p.mse_mean;
  out->mse_stderr = p.mse_stderr;
  out->ber_mean = p.ber_mean;
  out->ber_stderr = p.ber_stderr;
  out->analytic_mean = p.analytic_mean;
  out->analytic_stderr = p.analytic_stderr;
  out->trials = p.trials;
  out->infeasible = p.infeasible;
  return AFR_OK;
}

afr_status afr_series_csv(const afr_series* series, char* buffer, size_t capacity, size_t* needed) {
  if (!series) return null_argument("series");
  return guarded([&] {
    std::ostringstream os;
    afrelay::write_series_csv(os, series->series);
    return copy_out(os.str(), buffer, capacity, needed);
  });
}

afr_status afr_series_write_csv(const afr_series* series, const char* path) {
  if (!series) return null_argument("series");
  if (!path) return null_argument("path");
  return guarded([&] {
    std::ostringstream os;
    afrelay::write_series_csv(os, series->series);
    afrelay::write_text_file(path, os.str());
    return AFR_OK;
  });
}

size_t afr_check_suite_count(void) { return suite_names().size(); }

const char* afr_check_suite_name(size_t index) {
  return index < suite_names().size() ? suite_names()[index].c_str() : nullptr;
}

afr_status afr_check_run(const char* suite, uint64_t seed, afr_check_report** out) {
  if (!suite) return null_argument("suite");
  if (!out) return null_argument("out");
  return guarded([&] {
    afrelay::CheckOptions options;
    if (seed != 0) options.seed = seed;
    auto handle = std::make_unique<afr_check_report>();
    handle->items = afrelay::run_checks(suite, options);
    *out = handle.release();
    return AFR_OK;
  });
}

void afr_check_destroy(afr_check_report* report) { delete report; }

size_t afr_check_count(const afr_check_report* report) { return report ? report->items.size() : 0; }

afr_status afr_check_item_get(const afr_check_report* report, size_t index, afr_check_item* out) {
  if (!report) return null_argument("report");
  if (!out) return null_argument("out");
  if (index >= report->items.size()) return set_error(AFR_ERR_INVALID_ARGUMENT, "check index out of range");
  const auto& c = report->items[index];
  out->name = c.name.c_str();
  out->measured = c.measured;
  out->tolerance = c.tolerance;
  out->passed = c.passed ? 1 : 0;
  out->detail = c.detail.c_str();
  return AFR_OK;
}

int afr_check_all_passed(const afr_check_report* report) {
  if (!report) return 0;
  for (const auto& c : report->items)
    if (!c.passed) return 0;
  return 1;
}

}  // extern "C"
