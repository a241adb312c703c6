#pragma once

// Open-system time evolution: Lindblad master equation with time-dependent
// Hamiltonians, integrated with an adaptive Dormand-Prince 5(4) scheme, plus
// exact superoperator propagation for small time-independent problems.

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "catrep/qcore.hpp"

namespace catrep {

/// H(t) = static_part + sum_k coeff_k(t) * op_k. The caller supplies a
/// Hermitian combination (e.g. separate terms for a^2 and a^dag^2).
struct DriveTerm {
  QOperator op;
  std::function<cplx(double)> coeff;
};

struct TimeDependentHamiltonian {
  QOperator static_part;
  std::vector<DriveTerm> drives;
  double t0 = 0.0;
  double t1 = 0.0;
  /// Times where coefficients may jump (piecewise-constant pulses). The
  /// integrator never steps across one.
  std::vector<double> breakpoints;

  Matrix at(double t) const;
};

struct CollapseOp {
  QOperator op;
  double rate = 0.0;  // 1/s; the dissipator uses sqrt(rate) * op
};

struct NamedObservable {
  std::string name;
  QOperator op;
};

struct EvolveOptions {
  int n_samples = 2;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double min_step = 1e-14;  // relative to the span length
  std::vector<NamedObservable> observables;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<QState> states;
  std::vector<std::string> observable_names;
  /// expectations[k][i] = <observable k> at times[i] (real part)
  std::vector<std::vector<double>> expectations;

  const QState& final_state() const { return states.back(); }
  void write_csv(std::ostream& os) const;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what + " at t = " + std::to_string(time)), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Integrates d rho/dt = -i[H(t), rho] + sum_j rate_j D[L_j] rho.
/// A pure initial state with no collapse operators is evolved as a state
/// vector; otherwise the density matrix is evolved.
Trajectory evolve(const TimeDependentHamiltonian& h, std::span<const CollapseOp> collapse,
                  const QState& rho0, const EvolveOptions& options = {});

/// Two modes of equal dimension d with time-independent Hamiltonian
///   H = H_0 (x) 1 + 1 (x) H_1 + sum_k g_k A_k (x) B_k
/// and local collapse operators. Integrated in the interaction picture of
/// the local Hamiltonians, so only the coupling and dissipation set the step
/// size. Intended for weak couplings between strongly driven modes.
struct CoupledModes {
  struct Coupling {
    cplx g;
    QOperator a;  // acts on mode 0
    QOperator b;  // acts on mode 1
  };
  std::array<QOperator, 2> local_h;
  std::vector<Coupling> couplings;
  std::array<std::vector<CollapseOp>, 2> local_collapse;
};

/// Evolves a state on dims (d, d) for `duration`. The coupling sum must be
/// Hermitian. Returns the lab-frame final state (pure when the input is pure
/// and there is no loss).
QState evolve_coupled(const CoupledModes& problem, const QState& rho0, double duration,
                      const EvolveOptions& options = {});

/// Dense Liouvillian acting on column-stacked density matrices.
Matrix liouvillian(const Matrix& h, std::span<const CollapseOp> collapse);

/// exp(L t) for a time-independent Liouvillian. Suitable for single modes
/// (superoperator dimension d^2).
class ChannelPropagator {
 public:
  ChannelPropagator(const QOperator& h, std::span<const CollapseOp> collapse, double dt);

  int dim() const { return dim_; }
  double step() const { return dt_; }
  const Matrix& superoperator() const { return superop_; }

  /// Applies the channel to a single-mode density matrix.
  Matrix apply(const Matrix& rho) const;
  /// Applies the channel to subsystem `which` of a two-mode density matrix
  /// with local dimensions (d, d).
  Matrix apply_on_mode(const Matrix& rho, int which) const;

 private:
  int dim_;
  double dt_;
  Matrix superop_;
};

struct DecayFit {
  double rate = 0.0;      // 1/s
  double intercept = 0.0; // log-amplitude at t = 0
  double residual = 0.0;  // rms of the log-space residual
};

/// Least-squares fit of log(values) against t. Needs at least 8 samples
/// and strictly positive values.
DecayFit fit_exponential_decay(std::span<const double> times, std::span<const double> values);

}  // namespace catrep
