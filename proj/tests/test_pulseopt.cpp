#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "catrep/pipeline.hpp"
#include "catrep/pulseopt.hpp"

using namespace catrep;

namespace {

GrapeProblem small_problem(int dim = 12, int segments = 8) {
  GrapeProblem p;
  p.params.K = 1.0;
  p.params.dim = dim;
  p.initial = fock(0, dim);
  p.target = cat_state(std::sqrt(2.0), Parity::even, dim);
  p.total_time = 0.5;
  p.n_segments = segments;
  p.amplitude_bound = 10.0;
  return p;
}

PulseSchedule zero_pulse(const GrapeProblem& p) {
  return PulseSchedule::piecewise(p.total_time, std::vector<double>(p.n_segments, 0.0),
                                  std::vector<double>(p.n_segments, 0.0));
}

}  // namespace

TEST(GrapeEvaluate, VacuumIsAFixedPointOfTheKerrTerm) {
  GrapeProblem p = small_problem();
  p.target = p.initial;
  const GrapeResult r = grape_optimize(p, zero_pulse(p));
  EXPECT_NEAR(r.initial_fidelity, 1.0, 1e-14);
  EXPECT_NEAR(r.fidelity, 1.0, 1e-14);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_TRUE(r.converged);
}

TEST(GrapeEvaluate, GradientMatchesCentralDifferences) {
  const GrapeProblem p = small_problem();
  const std::size_t n = static_cast<std::size_t>(p.n_segments);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> a(n), b(n);
    for (std::size_t k = 0; k < n; ++k) {
      a[k] = 2.0 + u(rng);
      b[k] = u(rng);
    }
    const GrapeEvaluation e = grape_evaluate(p, a, b);
    double diff2 = 0.0, norm2 = 0.0;
    for (int which = 0; which < 2; ++which)
      for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> ap = a, am = a, bp = b, bm = b;
        if (which == 0) {
          ap[k] += h;
          am[k] -= h;
        } else {
          bp[k] += h;
          bm[k] -= h;
        }
        const double fd = (grape_evaluate(p, ap, bp).fidelity - grape_evaluate(p, am, bm).fidelity) / (2.0 * h);
        const double an = which == 0 ? e.grad_ep[k] : e.grad_perp[k];
        diff2 += (fd - an) * (fd - an);
        norm2 += an * an;
      }
    EXPECT_LT(std::sqrt(diff2 / norm2), 1e-4) << "perturbation " << trial;
  }
}

TEST(GrapeEvaluate, RejectsMalformedProblems) {
  GrapeProblem p = small_problem();
  const std::vector<double> z(8, 0.0);
  p.n_segments = 3;
  EXPECT_THROW(grape_evaluate(p, {0, 0, 0}, {0, 0, 0}), std::invalid_argument);
  p = small_problem();
  p.total_time = 0.0;
  EXPECT_THROW(grape_evaluate(p, z, z), std::invalid_argument);
  p = small_problem();
  p.amplitude_bound = -1.0;
  EXPECT_THROW(grape_evaluate(p, z, z), std::invalid_argument);
  p = small_problem();
  EXPECT_THROW(grape_evaluate(p, std::vector<double>(7, 0.0), z), std::invalid_argument);
}

TEST(GrapeOptimize, RespectsBoundAndNeverGoesBackwards) {
  GrapeProblem p = small_problem(16, 16);
  p.amplitude_bound = 2.5;  // tight enough that the optimum presses against it
  GrapeOptions o;
  o.max_iters = 60;
  const GrapeResult r = grape_optimize(p, grape_initial_guess(p, false), o);
  for (double v : r.pulse.segments_ep()) EXPECT_LE(std::abs(v), p.amplitude_bound);
  for (double v : r.pulse.segments_ep_perp()) EXPECT_LE(std::abs(v), p.amplitude_bound);
  ASSERT_FALSE(r.trace.empty());
  EXPECT_GE(r.trace.front(), r.initial_fidelity);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GE(r.trace[i], r.trace[i - 1]);
  EXPECT_DOUBLE_EQ(r.fidelity, r.trace.back());
}

TEST(GrapeOptimize, ZeroIterationsReturnsTheInitialGuess) {
  const GrapeProblem p = small_problem(16, 16);
  GrapeOptions o;
  o.max_iters = 0;
  const PulseSchedule guess = grape_initial_guess(p, false);
  const GrapeResult r = grape_optimize(p, guess, o);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_DOUBLE_EQ(r.fidelity, r.initial_fidelity);
  for (int k = 0; k < p.n_segments; ++k) EXPECT_NEAR(r.pulse.segments_ep()[k], guess.segments_ep()[k], 1e-12);
  EXPECT_NEAR(r.fidelity, grape_evaluate(p, guess.segments_ep(), guess.segments_ep_perp()).fidelity, 1e-15);
}

TEST(GrapeOptimize, RestartsAreSeedDeterministic) {
  const GrapeProblem p = small_problem(12, 8);
  GrapeOptions o;
  o.max_iters = 20;
  o.restarts = 2;
  o.seed = 99;
  const GrapeResult a = grape_optimize(p, grape_initial_guess(p, false), o);
  const GrapeResult b = grape_optimize(p, grape_initial_guess(p, false), o);
  EXPECT_EQ(a.pulse.segments_ep(), b.pulse.segments_ep());
  EXPECT_EQ(a.fidelity, b.fidelity);
}

TEST(GrapeOptimize, InitialGuessMustMatchTheGrid) {
  const GrapeProblem p = small_problem(12, 8);
  EXPECT_THROW(grape_optimize(p, adiabatic_drive_pulse(p.params, 0.4)), std::invalid_argument);
}

TEST(EvaluatePulse, ZeroPulseOnVacuum) {
  GrapeProblem p = small_problem();
  p.target = p.initial;
  EXPECT_NEAR(evaluate_pulse(p, zero_pulse(p), 0.0), 1.0, 1e-10);
  EXPECT_THROW(evaluate_pulse(p, zero_pulse(p), -1.0), std::invalid_argument);
}

class DefaultGrape : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { pulses_ = new DrivePulses(optimize_drive_pulses(GrapeSettings{}, std::sqrt(2.0))); }
  static void TearDownTestSuite() {
    delete pulses_;
    pulses_ = nullptr;
  }
  static DrivePulses* pulses_;
};
DrivePulses* DefaultGrape::pulses_ = nullptr;

TEST_F(DefaultGrape, DriveAndUndriveReachTheBar) {
  EXPECT_GE(pulses_->drive_result.fidelity, 0.999);
  EXPECT_GE(pulses_->undrive_result.fidelity, 0.999);
  EXPECT_NEAR(pulses_->drive.duration(), 0.5, 1e-15);
}

TEST_F(DefaultGrape, IntegratorAgreesWithPropagatorAndLossHurts) {
  const GrapeProblem p = drive_problem(GrapeSettings{}, std::sqrt(2.0), false);
  const double f0 = evaluate_pulse(p, pulses_->drive, 0.0);
  EXPECT_NEAR(f0, pulses_->drive_result.fidelity, 1e-6);
  const double f3 = evaluate_pulse(p, pulses_->drive, 1e-3);
  const double f2 = evaluate_pulse(p, pulses_->drive, 1e-2);
  EXPECT_LT(f3, f0);
  EXPECT_LT(f2, f3);
}

TEST_F(DefaultGrape, UndriveIntegratorAgreement) {
  const GrapeProblem p = drive_problem(GrapeSettings{}, std::sqrt(2.0), true);
  EXPECT_NEAR(evaluate_pulse(p, pulses_->undrive, 0.0), pulses_->undrive_result.fidelity, 1e-6);
}
