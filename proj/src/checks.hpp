#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "estimation.hpp"
#include "msemodel.hpp"
#include "rng.hpp"

namespace afrelay {

struct CheckItem {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

// Sample sizes of the oracle suite. The defaults are the sizes at which the
// stated tolerances are meant to hold.
struct CheckOptions {
  std::uint64_t seed = 20240601;
  int trace_pairs = 10;
  int trace_samples = 100000;
  int estimation_trials = 10000;
  int mse_trials = 100000;
  int kkt_instances = 20;
  int diagonal_instances = 10;
  int perturbations = 100;
  int bound_instances = 20;
};

// Random link description used by the oracle suite: N antennas at every node,
// unit-power streams and error moments from an ML estimator with training
// correlation alpha.
struct InstanceSpec {
  int subcarriers = 8;
  int taps = 3;
  int antennas = 2;
  double alpha = 0.0;
  double sigma_e2 = 0.01;
  double es_n1_db = 30.0;
  double er_n2_db = 20.0;
};

struct Instance {
  LinkInputs inputs;  // channels read as estimates, R_s = I
  ErrorMoments moments;  // shared by both hops
  double p_r = 0.0;
};

Instance random_instance(const InstanceSpec& spec, RandomStream& rng);

// "trace", "estimation", "mse", "kkt", "diagonal", "reductions", "bound".
std::vector<std::string> check_suites();

// `suite` may also be "all". Throws kValidation for an unknown suite.
std::vector<CheckItem> run_checks(const std::string& suite, const CheckOptions& options = {});

}  // namespace afrelay
