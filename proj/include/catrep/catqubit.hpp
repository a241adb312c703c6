#pragma once

// Kerr-cat qubits: two-photon driven Kerr cavities whose even/odd cat states
// |C+>, |C-> are the logical |0>, |1>. Covers state preparation (driving
// and undriving), X/Z/G gates, the CNOT sequence and gate tables.

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "catrep/dynamics.hpp"
#include "catrep/qcore.hpp"

namespace catrep {

struct CatQubitParams {
  double K = 1.0;      // Kerr rate, rad/s
  double kappa = 0.0;  // single-photon loss, 1/s
  double alpha = 1.4142135623730951;
  int dim = 20;

  double ep0() const { return K * alpha * alpha; }
  void validate() const;
};

/// Raised when evolution pushes population into the top of the truncation.
class TruncationOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-photon drive envelopes E_p(t) (on a^dag^2 + a^2) and E_perp(t) (on
/// i(a^dag^2 - a^2)) over [0, duration]. Either closed form or piecewise
/// constant on equal segments.
class PulseSchedule {
 public:
  using Envelope = std::function<double(double)>;

  static PulseSchedule closed_form(double duration, Envelope ep, Envelope ep_perp = {});
  static PulseSchedule piecewise(double duration, std::vector<double> ep, std::vector<double> ep_perp);

  double duration() const { return duration_; }
  double ep(double t) const;
  double ep_perp(double t) const;
  /// E_p + i E_perp: the coefficient of a^dag^2.
  cplx envelope(double t) const { return {ep(t), ep_perp(t)}; }

  bool is_piecewise() const { return !seg_ep_.empty(); }
  int n_segments() const { return static_cast<int>(seg_ep_.size()); }
  const std::vector<double>& segments_ep() const { return seg_ep_; }
  const std::vector<double>& segments_ep_perp() const { return seg_perp_; }
  /// Interior segment edges (empty for closed-form pulses).
  std::vector<double> breakpoints() const;

  /// t -> duration - t.
  PulseSchedule reversed() const;
  /// Midpoint sampling onto n equal segments.
  PulseSchedule resampled(int n) const;
  /// Converts a pulse in units of 1/K (time) and K (amplitude) to SI.
  PulseSchedule scaled(double K) const;

  /// Columns t_start, t_end, E_p, E_p_perp; closed forms are resampled.
  void write_csv(std::ostream& os, int n_for_closed_form = 200) const;

 private:
  double duration_ = 0.0;
  Envelope ep_, perp_;
  std::vector<double> seg_ep_, seg_perp_;
};

/// E_p(t) = E_p0 (1 - exp(-(t/tau)^4)) on [0, 1.3 tau].
PulseSchedule adiabatic_drive_pulse(const CatQubitParams& params, double tau);

// -- Hamiltonians and logical states ---------------------------------------------

QOperator kerr_term(int dim, double K);                 // -K a^dag^2 a^2
std::vector<QOperator> two_photon_controls(int dim);    // a^dag^2 + a^2, i(a^dag^2 - a^2)
QOperator static_cat_hamiltonian(const CatQubitParams& p, int dim);  // H0 at E_p = E_p0
TimeDependentHamiltonian drive_hamiltonian(const CatQubitParams& p, const PulseSchedule& pulse, int dim);

/// c0 |C+> + c1 |C->.
QState logical_state(const CatQubitParams& p, cplx c0, cplx c1, int dim);

struct StageResult {
  QState state;
  double fidelity = 0.0;
};

/// Fock |0>,|1> (or superposition) -> parity-matched cat under the pulse
/// with loss sqrt(kappa) a. Throws TruncationOverflow if the top two Fock
/// levels hold more than 1e-6.
StageResult drive(const CatQubitParams& p, const PulseSchedule& pulse, const QState& input);
/// Cat -> Fock under the (already time-reversed or optimized) pulse.
StageResult undrive(const CatQubitParams& p, const PulseSchedule& pulse, const QState& input);

// -- gates ----------------------------------------------------------------------

struct GateReportRow {
  std::string operation;
  double K = 0.0;
  double kappa = 0.0;
  double duration_s = 0.0;
  double duration_Kt = 0.0;
  double fidelity = 0.0;
};

struct GateResult {
  GateReportRow row;
  /// State fidelity per probe input (six logical probes).
  std::vector<double> probe_fidelities;
  /// Largest population outside the logical subspace over the probes.
  double leakage = 0.0;
  bool leakage_flag = false;  // leakage > 5%
  /// For G only: fidelity of |00> against ((1+i)|00> + (1-i)|11>)/2.
  double bell_fidelity = 0.0;
};

struct TwoModeOptions {
  int dim = 14;  // per cavity
  double rel_tol = 1e-7;
};

double x_gate_time(const CatQubitParams& p, double theta, double ex);
double z_gate_time(const CatQubitParams& p, double theta);
double g_gate_time(const CatQubitParams& p, double theta, double ec);

/// X_theta = exp(-i theta sigma_x / 2) via a single-photon drive E_x. A
/// negative theta flips the drive sign.
GateResult gate_x(const CatQubitParams& p, double theta, double ex);
/// Z_theta (up to global phase) by free Kerr evolution for (theta mod 2pi)/K.
GateResult gate_z(const CatQubitParams& p, double theta);
/// G_theta = exp(-i theta/2 X (x) X) from linear coupling E_c.
GateResult gate_g(const CatQubitParams& p, double theta, double ec, const TwoModeOptions& opt = {});
/// CNOT (control 1, target 2) from the seven-stage X/Z/G sequence.
GateResult cnot(const CatQubitParams& p, double ex, double ec, const TwoModeOptions& opt = {});

struct DriveRatios {
  double ex_ratio = 10.0;  // E_x = E_p0 / ex_ratio
  double ec_ratio = 15.0;  // E_c = E_p0 / ec_ratio
};

/// Rows: drive, undrive, X_pi/2, Z_pi/2, G_pi/2, CNOT.
std::vector<GateReportRow> gate_report(const CatQubitParams& p, const DriveRatios& ratios,
                                       const PulseSchedule& drive_pulse,
                                       const PulseSchedule& undrive_pulse,
                                       const TwoModeOptions& opt = {});

void write_gate_report_csv(std::ostream& os, const std::vector<GateReportRow>& rows);

// -- elementary-link protocol ---------------------------------------------------

enum class DetectorKind { number_resolving, threshold };

struct HeraldBranch {
  std::string pattern;  // e.g. "D1" or "D1,D2"
  bool same_detector = false;
  double probability = 0.0;
  QState state;  // stationary pair (a, c), logical qubits
};

struct ProtocolOutcome {
  std::vector<HeraldBranch> branches;
  double success_probability = 0.0;
};

/// Heralded entanglement between two stationary cat qubits with ideal
/// logical gates and exact two-mode photonics (Fock dim 3). Loss is applied
/// per arm before the beamsplitter. With two_steps the qubits are flipped and
/// a second round is heralded.
ProtocolOutcome simulate_link_protocol(double loss_per_arm, DetectorKind detectors,
                                       bool two_steps = true);

}  // namespace catrep
