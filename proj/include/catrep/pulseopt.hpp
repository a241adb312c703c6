#pragma once

// GRAPE for the two quadratures of the two-photon drive. Optimizes the
// lossless state-transfer fidelity |<target|U(T)|initial>|^2 over
// piecewise-constant amplitudes; loss is scored afterwards with evaluate_pulse.

#include <cstdint>
#include <vector>

#include "catrep/catqubit.hpp"

namespace catrep {

struct GrapeProblem {
  CatQubitParams params;  // K sets the Kerr term; dim is taken from the states
  QState initial;
  QState target;
  double total_time = 0.0;       // s
  int n_segments = 64;
  double amplitude_bound = 0.0;  // rad/s, applied to each quadrature

  void validate() const;
  int dim() const { return initial.size(); }
};

struct GrapeOptions {
  int max_iters = 500;
  double convergence_tol = 1e-7;  // fidelity gain over `window` iterations
  int window = 10;
  int lbfgs_memory = 10;
  int restarts = 0;               // extra runs from perturbed initial guesses
  double restart_noise = 0.05;    // relative to the bound
  std::uint64_t seed = 1;
};

struct GrapeResult {
  PulseSchedule pulse;
  double fidelity = 0.0;
  double initial_fidelity = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // fidelity after each accepted iteration
};

struct GrapeEvaluation {
  double fidelity = 0.0;
  std::vector<double> grad_ep;    // dF/dE_p per segment
  std::vector<double> grad_perp;  // dF/dE_perp per segment
};

/// Exact fidelity and gradient for given segment amplitudes (rad/s).
GrapeEvaluation grape_evaluate(const GrapeProblem& problem, const std::vector<double>& ep,
                               const std::vector<double>& ep_perp);

/// Adiabatic pulse resampled on the problem grid with 1.3 tau = total_time,
/// clipped to the bound.
PulseSchedule grape_initial_guess(const GrapeProblem& problem, bool time_reversed);

GrapeResult grape_optimize(const GrapeProblem& problem, const PulseSchedule& initial_guess,
                           const GrapeOptions& options = {});

/// Re-scores a pulse with the Lindblad integrator at loss rate kappa.
double evaluate_pulse(const GrapeProblem& problem, const PulseSchedule& pulse, double kappa);

}  // namespace catrep
