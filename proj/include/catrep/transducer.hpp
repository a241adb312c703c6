#pragma once

// Microwave cavity -> inhomogeneously broadened spin ensemble transfer in
// the single-excitation subspace, and the overall transduction budget.

#include <stdexcept>

namespace catrep {

enum class Lineshape { lorentzian, gaussian };

/// How the lineshape is cut into bins. Quantile bins carry equal weight and
/// reach far into the tails; uniform bins cover +-10 FWHM with weights
/// sampled from the lineshape.
enum class BinGrid { quantile, uniform };

struct TransducerParams {
  double g_ens = 0.0;     // collective coupling, rad/s
  double delta_ns = 0.0;  // inhomogeneous FWHM, rad/s
  double gamma1 = 0.0;    // spin decay, 1/s
  double gamma2 = 0.0;    // homogeneous linewidth (FWHM), 1/s
  double kappa_mw = 0.0;  // cavity decay, 1/s
  int n_bins = 201;       // odd
  double echo_efficiency = 0.85;
  double coupling_efficiency = 0.95;
  Lineshape lineshape = Lineshape::lorentzian;
  BinGrid grid = BinGrid::quantile;

  void validate() const;
};

class DiscretizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TransferResult {
  double eta = 0.0;                 // spin population at T_S
  double cavity_population = 0.0;
  double lost_population = 0.0;     // decayed to the ground state
  double transfer_time = 0.0;       // pi / (2 g_ens)
  double refined_eta = 0.0;         // with 2 n_bins - 1 bins (if checked)
};

/// Evolves one cavity excitation for T_S = pi/(2 g_ens). With
/// check_convergence, re-runs with 2 n_bins - 1 bins and throws
/// DiscretizationError if eta moves by more than 0.1 percentage points.
TransferResult spin_transfer(const TransducerParams& p, bool check_convergence = true);

double spin_transfer_efficiency(const TransducerParams& p);

/// eta * echo_efficiency * coupling_efficiency.
double transduction_budget(const TransducerParams& p);

}  // namespace catrep
