#include "catrep/pipeline.hpp"

#include <cmath>
#include <numbers>

#include "catrep/device.hpp"

namespace catrep {

GrapeProblem drive_problem(const GrapeSettings& settings, double alpha, bool undrive) {
  GrapeProblem prob;
  prob.params.K = 1.0;
  prob.params.alpha = alpha;
  prob.params.dim = settings.dim;
  prob.total_time = settings.total_time_K;
  prob.n_segments = settings.n_segments;
  prob.amplitude_bound = settings.bound_ratio * prob.params.ep0();
  const QState vac = fock(0, settings.dim);
  const QState cat = cat_state(alpha, Parity::even, settings.dim);
  prob.initial = undrive ? cat : vac;
  prob.target = undrive ? vac : cat;
  return prob;
}

DrivePulses optimize_drive_pulses(const GrapeSettings& settings, double alpha) {
  DrivePulses out;
  const GrapeProblem fwd = drive_problem(settings, alpha, false);
  out.drive_result = grape_optimize(fwd, grape_initial_guess(fwd, false), settings.options);
  const GrapeProblem rev = drive_problem(settings, alpha, true);
  out.undrive_result = grape_optimize(rev, grape_initial_guess(rev, true), settings.options);
  out.drive = out.drive_result.pulse;
  out.undrive = out.undrive_result.pulse;
  return out;
}

RowModel simulate_row(const HardwareRow& row, const DrivePulses& pulses, const PipelineOptions& options) {
  CatQubitParams p;
  p.K = row.K;
  p.kappa = row.kappa;
  p.alpha = options.alpha;
  p.dim = options.dim;
  p.validate();

  RowModel out;
  out.gates = gate_report(p, row.ratios, pulses.drive.scaled(row.K), pulses.undrive.scaled(row.K), options.two_mode);
  out.x_pi = gate_x(p, std::numbers::pi, p.ep0() / row.ratios.ex_ratio).row;
  out.x_pi.operation = "X_pi";

  NodeModel& node = out.node;
  node.label = row.label;
  for (const auto& g : out.gates) {
    node.fidelity[g.operation] = g.fidelity;
    node.duration_s[g.operation] = g.duration_s;
  }
  node.fidelity["X_pi"] = out.x_pi.fidelity;
  node.duration_s["X_pi"] = out.x_pi.duration_s;
  node.fidelity["transduction"] = options.transduction_fidelity;
  node.duration_s["transduction"] = options.transduction_time_s;
  node.kappa = row.kappa;
  node.transfer_lifetime_s = options.transfer_lifetime_s;
  if (row.kappa > 0.0) {
    const KappaEffResult ke = kappa_eff(row.K, row.kappa, options.alpha, options.dim);
    node.kappa_eff = ke.kappa_eff;
    out.kappa_eff_residual = ke.residual;
  }
  return out;
}

}  // namespace catrep
