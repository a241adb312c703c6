#pragma once

// Effective cavity parameters inherited from a weakly anharmonic
// superconducting qubit (SQ) placed inside the cavity.

#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace catrep {

struct DeviceParams {
  double omega_c = 0.0;  // rad/s
  double omega_q = 0.0;  // rad/s
  double K_q = 0.0;      // SQ anharmonicity, rad/s
  double g = 0.0;        // rad/s
  double kappa_c = 0.0;  // bare cavity decay, 1/s
  double gamma = 0.0;    // SQ decay, 1/s

  double delta() const { return omega_q - omega_c; }
  /// Throws DispersiveRegimeError unless g/|Delta| < 0.3 and rates are >= 0.
  void validate() const;
};

class DispersiveRegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KerrOptions {
  int cavity_levels = 12;
  int qubit_levels = 5;
  bool convergence_check = true;  // re-run with two more levels in each mode
};

struct KerrEstimate {
  double K = 0.0;          // rad/s
  double offset = 0.0;     // fitted spacing at i = 0, rad/s (rotating frame)
  double residual = 0.0;   // rms of the spacing fit, rad/s
  double convergence_change = 0.0;  // relative change of K at +2 levels
};

/// Diagonalizes H = Delta b^dag b - K_q b^dag^2 b^2 + g (a^dag b + a b^dag)
/// (frame rotating at omega_c), labels the dressed |i,0> by optimal
/// assignment to bare states and fits spacing_i = offset - 2 K i, i = 0..4.
KerrEstimate dispersive_kerr(const DeviceParams& p, const KerrOptions& options = {});

/// (1 - (g/Delta)^2) kappa_c + (g/Delta)^2 gamma.
double purcell_kappa(double kappa_c, double gamma, double g, double delta);

struct KappaEffResult {
  double kappa_eff = 0.0;  // 1/s
  double residual = 0.0;   // relative rms residual of the log fit
  bool flagged = false;    // residual above 5%
};

/// Fits the decay of |<C+|rho|C->| for (|C+> + i|C->)/sqrt2 evolving under
/// the driven Kerr Hamiltonian (E_p = K alpha^2) with loss kappa.
KappaEffResult kappa_eff(double K, double kappa, double alpha, int dim = 20);

struct DeviceRow {
  double kappa_c = 0.0, gamma = 0.0, g = 0.0, delta = 0.0, K_q = 0.0;
  double K = 0.0, kappa = 0.0, kappa_eff = 0.0;
};

std::vector<DeviceRow> device_table(const std::vector<DeviceParams>& rows, double alpha = 1.4142135623730951);
void write_device_csv(std::ostream& os, const std::vector<DeviceRow>& rows);

}  // namespace catrep
