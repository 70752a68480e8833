// Command-line front end. Talks to the library only through afrelay/afrelay.h.
#include <afrelay/afrelay.h>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct Failure {
  afr_status status;
  std::string message;
};

void ok(afr_status status, const std::string& context) {
  if (status != AFR_OK) throw Failure{status, context + ": " + afr_last_error()};
}

bool is_usage_status(afr_status s) {
  return s == AFR_ERR_VALIDATION || s == AFR_ERR_UNKNOWN_KEY || s == AFR_ERR_INVALID_ARGUMENT;
}

struct ConfigHandle {
  afr_config* ptr = nullptr;
  ConfigHandle() { ok(afr_config_create(&ptr), "config"); }
  ~ConfigHandle() { afr_config_destroy(ptr); }
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
};

struct SeriesHandle {
  afr_series* ptr = nullptr;
  ~SeriesHandle() { afr_series_destroy(ptr); }
};

// Options shared by every verb. Flags override values from --config.
struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<int> subcarriers;
  std::optional<int> trials;
  std::optional<long long> seed;
  std::optional<int> threads;
  std::string variant;
  bool flat = false;
  std::string out;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--set", sets, "override a configuration key, key=value (repeatable)");
    cmd->add_option("--K", subcarriers, "number of subcarriers");
    cmd->add_option("--trials", trials, "Monte Carlo trials per point");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--threads", threads, "worker threads (0: AFRELAY_THREADS or hardware)");
    cmd->add_option("--variant", variant, "uncorrelated | hsa | spa | switched | naive | robust");
    cmd->add_flag("--flat", flat, "single-tap channels");
    cmd->add_option("--out", out, "output CSV path (stdout when omitted)");
  }

  // Key/value pairs in application order, after any config file.
  std::vector<std::pair<std::string, std::string>> overrides() const {
    std::vector<std::pair<std::string, std::string>> kv;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw Failure{AFR_ERR_VALIDATION, "--set expects key=value, got '" + s + "'"};
      kv.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (subcarriers) kv.emplace_back("subcarriers", std::to_string(*subcarriers));
    if (trials) kv.emplace_back("trials", std::to_string(*trials));
    if (seed) kv.emplace_back("seed", std::to_string(*seed));
    if (threads) kv.emplace_back("threads", std::to_string(*threads));
    if (!variant.empty()) kv.emplace_back("variant", variant);
    if (flat) kv.emplace_back("taps", "1");
    return kv;
  }

  void apply(afr_config* cfg) const {
    if (!config_path.empty()) ok(afr_config_load(cfg, config_path.c_str()), "--config");
    for (const auto& [k, v] : overrides()) ok(afr_config_set(cfg, k.c_str(), v.c_str()), "--set " + k);
    ok(afr_config_validate(cfg), "configuration");
  }
};

void emit_series(const afr_series* series, const std::string& out) {
  if (out.empty()) {
    size_t needed = 0;
    ok(afr_series_csv(series, nullptr, 0, &needed), "csv");
    std::string s(needed, '\0');
    ok(afr_series_csv(series, s.data(), s.size(), &needed), "csv");
    s.resize(needed - 1);
    std::fwrite(s.data(), 1, s.size(), stdout);
  } else {
    ok(afr_series_write_csv(series, out.c_str()), "write " + out);
  }
}

// Human-readable digest on stderr, so stdout stays pure CSV.
void summarize(const afr_series* series, const std::string& metric) {
  for (size_t i = 0; i < afr_series_count(series); ++i) {
    std::fprintf(stderr, "%s  (%s)\n", afr_series_label(series, i), afr_series_axis(series, i));
    for (size_t j = 0; j < afr_series_points(series, i); ++j) {
      afr_point p{};
      ok(afr_series_point(series, i, j, &p), "point");
      const double mean = metric == "ber" ? p.ber_mean : p.mse_mean;
      const double se = metric == "ber" ? p.ber_stderr : p.mse_stderr;
      std::fprintf(stderr, "  %10g  %s=%.6g +/- %.2g  trials=%d%s\n", p.value, metric.c_str(), mean, se, p.trials,
                   p.infeasible ? ("  infeasible=" + std::to_string(p.infeasible)).c_str() : "");
    }
  }
}

int run_solve(const Common& common, unsigned long long trial, const std::string& csv) {
  ConfigHandle cfg;
  common.apply(cfg.ptr);
  afr_solution* sol = nullptr;
  ok(afr_solve(cfg.ptr, trial, &sol), "solve");
  struct Guard {
    afr_solution* s;
    ~Guard() { afr_solution_destroy(s); }
  } guard{sol};

  afr_solution_info info{};
  ok(afr_solution_info_get(sol, &info), "solve");
  std::printf("variant      %s (applied %s, votes hsa=%d spa=%d)\n", info.requested, info.applied, info.hsa_votes,
              info.spa_votes);
  std::printf("P_r          %.12g\n", info.total_power);
  std::printf("sum P_r,k    %.12g\n", info.power_sum);
  std::printf("gamma        %.12g\n", info.gamma);
  std::printf("total MSE    %.12g (analytic, true error moments)\n", info.analytic_mse);
  std::printf("power check  %.3g (max relative gap to budget)\n", info.power_residual);
  std::printf("%4s %18s %14s %14s %6s\n", "k", "P_r,k", "gamma_k", "eta_k", "modes");
  for (int k = 0; k < info.subcarriers; ++k) {
    afr_subcarrier_summary s{};
    ok(afr_solution_subcarrier(sol, k, &s), "solve");
    std::printf("%4d %18.12g %14.6g %14.6g %6d\n", k, s.power, s.gamma, s.eta, s.active_modes);
  }
  if (!csv.empty()) ok(afr_solution_write_csv(sol, csv.c_str()), "write " + csv);
  return kExitOk;
}

int run_sweep(const Common& common, const std::string& metric, const std::string& axis, const std::string& values) {
  ConfigHandle cfg;
  if (!common.config_path.empty()) ok(afr_config_load(cfg.ptr, common.config_path.c_str()), "--config");
  if (!axis.empty()) ok(afr_config_set(cfg.ptr, "sweep_axis", axis.c_str()), "--axis");
  if (!values.empty()) ok(afr_config_set(cfg.ptr, "sweep_values", values.c_str()), "--values");
  for (const auto& [k, v] : common.overrides()) ok(afr_config_set(cfg.ptr, k.c_str(), v.c_str()), "--set " + k);
  ok(afr_config_validate(cfg.ptr), "configuration");
  SeriesHandle series;
  ok(afr_sweep(cfg.ptr, &series.ptr), "sweep");
  emit_series(series.ptr, common.out);
  summarize(series.ptr, metric);
  return kExitOk;
}

int run_check(const std::string& suite, const Common& common, const std::string& moments_prefix) {
  afr_check_report* report = nullptr;
  const unsigned long long seed = common.seed ? static_cast<unsigned long long>(*common.seed) : 0;
  ok(afr_check_run(suite.c_str(), seed, &report), "check");
  struct Guard {
    afr_check_report* r;
    ~Guard() { afr_check_destroy(r); }
  } guard{report};
  for (size_t i = 0; i < afr_check_count(report); ++i) {
    afr_check_item item{};
    ok(afr_check_item_get(report, i, &item), "check");
    if (std::isinf(item.tolerance))
      std::printf("INFO %-48s measured=%.3g  %s\n", item.name, item.measured, item.detail);
    else
      std::printf("%s %-48s measured=%.3g tolerance=%.3g  %s\n", item.passed ? "PASS" : "FAIL", item.name,
                  item.measured, item.tolerance, item.detail);
  }
  if (!moments_prefix.empty()) {
    ConfigHandle cfg;
    common.apply(cfg.ptr);
    for (const char* hop : {"sr", "rd"}) {
      const std::string path = moments_prefix + "_" + hop + ".csv";
      ok(afr_moments_write_csv(cfg.ptr, hop, path.c_str()), "moments");
      std::printf("wrote %s\n", path.c_str());
    }
  }
  const bool passed = afr_check_all_passed(report) != 0;
  std::printf("%s\n", passed ? "all checks passed" : "some checks FAILED");
  return passed ? kExitOk : kExitCheckFailed;
}

int run_fig(int number, const Common& common) {
  if (!common.config_path.empty())
    throw Failure{AFR_ERR_VALIDATION, "fig uses its preset; pass overrides with --set instead of --config"};
  std::vector<std::string> keys, values;
  for (const auto& [k, v] : common.overrides()) {
    keys.push_back(k);
    values.push_back(v);
  }
  std::vector<const char*> kp, vp;
  for (size_t i = 0; i < keys.size(); ++i) {
    kp.push_back(keys[i].c_str());
    vp.push_back(values[i].c_str());
  }
  SeriesHandle series;
  ok(afr_figure(number, kp.data(), vp.data(), kp.size(), &series.ptr), "fig " + std::to_string(number));
  emit_series(series.ptr, common.out);
  summarize(series.ptr, afr_series_metric(series.ptr));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust AF MIMO-OFDM relay transceiver design and simulation"};
  app.require_subcommand(1);

  Common solve_opts, mse_opts, ber_opts, check_opts, fig_opts;
  unsigned long long trial = 0;
  std::string solution_csv;
  auto* solve_cmd = app.add_subcommand("solve", "design F_k, G_k for one channel draw and print the per-subcarrier summary");
  solve_opts.attach(solve_cmd);
  solve_cmd->add_option("--trial", trial, "which random channel draw to design for");
  solve_cmd->add_option("--csv", solution_csv, "also write the solution CSV here");

  std::string mse_axis, mse_values, ber_axis, ber_values;
  auto* mse_cmd = app.add_subcommand("sweep-mse", "Monte Carlo sweep, MSE focus; writes the series CSV");
  mse_opts.attach(mse_cmd);
  mse_cmd->add_option("--axis", mse_axis, "er_n2_db | sigma_e2 | alpha");
  mse_cmd->add_option("--values", mse_values, "comma list or start:step:stop");
  auto* ber_cmd = app.add_subcommand("sweep-ber", "Monte Carlo sweep, BER focus; writes the series CSV");
  ber_opts.attach(ber_cmd);
  ber_cmd->add_option("--axis", ber_axis, "er_n2_db | sigma_e2 | alpha");
  ber_cmd->add_option("--values", ber_values, "comma list or start:step:stop");

  std::string suite = "all";
  std::string moments_prefix;
  auto* check_cmd = app.add_subcommand("check", "run the oracle suite; exit 1 when any check fails");
  check_opts.attach(check_cmd);
  check_cmd->add_option("--suite", suite, "all | trace | estimation | mse | kkt | diagonal | reductions | bound");
  check_cmd->add_option("--moments-out", moments_prefix, "write <prefix>_sr.csv and <prefix>_rd.csv error moments");

  int figure = 0;
  auto* fig_cmd = app.add_subcommand("fig", "run a figure preset (2..6) and write its series CSV");
  fig_opts.attach(fig_cmd);
  fig_cmd->add_option("number", figure, "figure number")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve_cmd) return run_solve(solve_opts, trial, solution_csv);
    if (*mse_cmd) return run_sweep(mse_opts, "mse", mse_axis, mse_values);
    if (*ber_cmd) return run_sweep(ber_opts, "ber", ber_axis, ber_values);
    if (*check_cmd) return run_check(suite, check_opts, moments_prefix);
    if (*fig_cmd) return run_fig(figure, fig_opts);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error (%s): %s\n", afr_status_name(f.status), f.message.c_str());
    return is_usage_status(f.status) ? kExitUsage : kExitRuntime;
  }
  return kExitUsage;
}
