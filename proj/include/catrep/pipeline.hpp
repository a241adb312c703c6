#pragma once

// Glue from hardware rows (K, kappa, drive ratios) to the per-operation
// fidelities and durations the repeater budget consumes.

#include <string>
#include <vector>

#include "catrep/catqubit.hpp"
#include "catrep/pulseopt.hpp"
#include "catrep/repeater.hpp"

namespace catrep {

struct HardwareRow {
  std::string label;
  double K = 0.0;      // rad/s
  double kappa = 0.0;  // 1/s
  DriveRatios ratios;
};

/// GRAPE drive/undrive pulses in units where K = 1.
struct GrapeSettings {
  double total_time_K = 0.5;  // K T
  int n_segments = 64;
  double bound_ratio = 5.0;   // amplitude bound in units of E_p0
  int dim = 30;
  GrapeOptions options;
};

struct DrivePulses {
  PulseSchedule drive, undrive;      // dimensionless (K = 1)
  GrapeResult drive_result, undrive_result;
};

/// The dimensionless vacuum -> even cat problem (or its reverse).
GrapeProblem drive_problem(const GrapeSettings& settings, double alpha, bool undrive);

DrivePulses optimize_drive_pulses(const GrapeSettings& settings, double alpha);

struct PipelineOptions {
  double alpha = 1.4142135623730951;
  int dim = 20;
  TwoModeOptions two_mode;
  double transduction_fidelity = 0.9995;
  double transduction_time_s = 1e-6;
  double transfer_lifetime_s = 10.0;
};

struct RowModel {
  NodeModel node;
  std::vector<GateReportRow> gates;  // gate_report rows
  GateReportRow x_pi;
  double kappa_eff_residual = 0.0;
};

/// Runs the gate table, the X_pi gate and the kappa_eff fit for one row.
RowModel simulate_row(const HardwareRow& row, const DrivePulses& pulses, const PipelineOptions& options = {});

}  // namespace catrep
