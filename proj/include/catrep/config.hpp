#pragma once

// Run configuration: a JSON document with sections device, catqubit, grape,
// transducer, link, chain, comparators and output. Values carry their unit
// in the key: *_hz keys are ordinary frequencies (converted with 2 pi),
// *_s seconds, *_km kilometres. Unknown keys are rejected.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "catrep/device.hpp"
#include "catrep/pipeline.hpp"
#include "catrep/repeater.hpp"
#include "catrep/transducer.hpp"

namespace catrep {

/// Validation failure; the message starts with the offending key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct DeviceRowConfig {
  std::string label;
  double omega_c_hz = 0.0, omega_q_hz = 0.0, K_q_hz = 0.0, g_hz = 0.0, kappa_c_hz = 0.0, gamma_hz = 0.0;
};

struct DeviceConfig {
  std::vector<DeviceRowConfig> rows;
  double alpha = 1.4142135623730951;
};

struct CatRowConfig {
  std::string label;
  double K_hz = 0.0;
  double K_over_kappa = 0.0;
  double ex_ratio = 10.0;
  double ec_ratio = 15.0;
};

struct CatQubitConfig {
  std::vector<CatRowConfig> rows;
  double alpha = 1.4142135623730951;
  int dim = 20;
  int two_mode_dim = 14;
  double two_mode_rel_tol = 1e-7;
};

struct GrapeConfig {
  double total_time_K = 0.5;
  int n_segments = 64;
  double bound_ratio = 5.0;
  int dim = 30;
  int max_iters = 500;
  double convergence_tol = 1e-7;
  int window = 10;
  int lbfgs_memory = 10;
  int restarts = 0;
  double restart_noise = 0.05;
  std::uint64_t seed = 1;
};

struct TransducerConfig {
  double g_ens_hz = 34e6;
  double delta_ns_hz = 10e6;
  double gamma1_hz = 160.0;
  double gamma2_hz = 100e3;
  double kappa_mw_hz = 10.0;
  int n_bins = 201;
  double echo_efficiency = 0.85;
  double coupling_efficiency = 0.95;
  std::string lineshape = "lorentzian";
  std::string grid = "quantile";
  bool check_convergence = true;
};

struct LinkConfig {
  double L0_km = 50.0;
  double L_att_km = 22.0;
  double p = 0.8;
  double eta_o = 0.9;
  double T_o_s = 0.0;  // 0: derive from operation durations
  double c_fiber_km_s = 2e5;
  bool p0_two_round = false;
  double transduction_time_s = 1e-6;
  double transduction_fidelity = 0.9995;
};

struct ChainConfig {
  std::vector<int> n_values{0, 1, 2, 3};
  std::vector<int> m_values{1, 200};
  double p_swap = 0.9;
  std::vector<std::string> policies{"cat", "fock", "transfer"};
  double transfer_lifetime_s = 10.0;
  std::string figure_row = "1e5";  // hardware row for figure6 and the headline crossover
  int figure_n = 3;
  double crossover_lo_km = 1.0;
  double crossover_hi_km = 3000.0;
  long long mc_trials = 100000;
  std::uint64_t mc_seed = 7;
};

struct ComparatorConfig {
  double direct_source_hz = 1e9;
  bool direct_detector_weighting = false;
  DlczParams dlcz;
  ReParams re;
};

struct OutputConfig {
  std::string dir = "out";
  std::string format = "csv";  // csv | json
  double L_min_km = 100.0;
  double L_max_km = 1000.0;
  int figure_points = 91;
};

struct RunConfig {
  DeviceConfig device;
  CatQubitConfig catqubit;
  GrapeConfig grape;
  TransducerConfig transducer;
  LinkConfig link;
  ChainConfig chain;
  ComparatorConfig comparators;
  OutputConfig output;
};

/// Defaults: three hardware rows at K/kappa = 1e3, 1e4, 1e5 and matching
/// device rows.
RunConfig default_config();

/// Parses and validates JSON text layered over the defaults.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

/// Checks ranges and cross-field constraints; throws ConfigError.
void validate(const RunConfig& config);

/// Canonical JSON (sorted keys, 2-space indent, trailing newline).
std::string dump_config(const RunConfig& config);

// -- conversions to module parameters --------------------------------------------

std::vector<DeviceParams> device_params(const RunConfig& config);
std::vector<HardwareRow> hardware_rows(const RunConfig& config);
GrapeSettings grape_settings(const RunConfig& config);
PipelineOptions pipeline_options(const RunConfig& config);
TransducerParams transducer_params(const RunConfig& config);
LinkParams link_params(const RunConfig& config);
std::vector<StoragePolicy> storage_policies(const RunConfig& config);

/// Toolkit version string embedded in every report.
const char* toolkit_version();

}  // namespace catrep
