// Acceptance run: one PASS/FAIL line per criterion, computed from the
// default configuration. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "catrep/catqubit.hpp"
#include "catrep/config.hpp"
#include "catrep/device.hpp"
#include "catrep/dynamics.hpp"
#include "catrep/pipeline.hpp"
#include "catrep/pulseopt.hpp"
#include "catrep/qcore.hpp"
#include "catrep/repeater.hpp"
#include "catrep/transducer.hpp"

using namespace catrep;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) ok = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << what << (cond ? "" : " [out of tolerance]");
  }
  void near(double value, double target, double tol, const std::string& name) {
    std::ostringstream s;
    s.precision(6);
    s << name << "=" << value << " (target " << target << " +- " << tol << ")";
    expect(std::abs(value - target) <= tol, s.str());
  }
  void within_rel(double value, double target, double rel, const std::string& name) {
    near(value, target, rel * std::abs(target), name);
  }
  void at_least(double value, double bound, const std::string& name) {
    std::ostringstream s;
    s.precision(6);
    s << name << "=" << value << " (>= " << bound << ")";
    expect(value >= bound, s.str());
  }
  void at_most(double value, double bound, const std::string& name) {
    std::ostringstream s;
    s.precision(6);
    s << name << "=" << value << " (<= " << bound << ")";
    expect(value <= bound, s.str());
  }
  void time_limit(double seconds, double limit, const std::string& name) {
    std::ostringstream s;
    s.precision(3);
    s << name << " " << seconds << " s (< " << limit << " s)";
    expect(seconds < limit, s.str());
  }
};

int failures = 0;

void report(const std::string& id, const std::string& title, const Check& c) {
  if (!c.ok) ++failures;
  std::cout << (c.ok ? "PASS" : "FAIL") << "  " << id << "  " << title << ": " << c.detail.str() << std::endl;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return seconds_since(t0);
}

const RowModel& row_named(const std::vector<RowModel>& rows, const std::string& label) {
  for (const auto& r : rows)
    if (r.node.label == label) return r;
  throw std::runtime_error("missing row " + label);
}

// Best F_tot over policies, each evaluated at its own crossover.
RateFidelityReport best_at_crossover(const NodeModel& node, int n, int m, const RunConfig& c,
                                     const std::vector<StoragePolicy>& policies) {
  const LinkParams link = link_params(c);
  const ChainParams chain = ChainParams::uniform(n, m, c.chain.p_swap);
  RateFidelityReport best;
  bool first = true;
  for (StoragePolicy pol : policies) {
    try {
      const double L = chain_crossover(node, chain, link, pol, c.chain.crossover_lo_km, c.chain.crossover_hi_km,
                                       c.comparators.direct_source_hz);
      RateFidelityReport r = evaluate_chain(node, chain, link, L, pol, c.comparators.direct_source_hz);
      if (first || r.F_tot > best.F_tot) best = std::move(r);
      first = false;
    } catch (const NoCrossover&) {
    }
  }
  if (first) throw NoCrossover("no policy crosses direct transmission");
  return best;
}

std::string describe(const RateFidelityReport& r) {
  std::ostringstream s;
  s.precision(5);
  s << "row " << r.label << " n=" << r.n << " m=" << r.m << " policy " << r.policy;
  return s.str();
}

}  // namespace

int main() {
  const RunConfig cfg = default_config();
  std::cout.setf(std::ios::fixed, std::ios::floatfield);
  std::cout.unsetf(std::ios::floatfield);

  // 1. Closed-form reproductions.
  {
    Check c;
    const double t = timed([&] {
      const LinkParams link;
      c.near(p0(link), 0.0333819803216, 1e-13, "P0(50 km)");
      LinkParams l;
      l.p = 1.0;
      l.eta_o = 1.0;
      l.L_att_km = 50.0 / std::log(5.0);
      l.T_o_s = 0.05e-3;
      c.near(mean_time(ChainParams::uniform(1, 1, 0.9), l), 5.00e-3, 1e-12, "<T>(n=1)");
      c.near(final_fidelity(0.99, 0.99, 1, 0.95), 0.92178405, 1e-12, "F_tot");
      c.near(residual_coherence({StoragePolicy::fock, 0.1, 0.4, 10.0}, 1.0), 0.904837418, 1e-9, "C_R");
      c.within_rel(direct_transmission_rate(244.0), 1.53e4, 0.02, "direct(244 km)");
      OperationMap f;
      for (const char* op : {"drive", "undrive", "X_pi/2", "X_pi", "CNOT", "transduction"}) f[op] = 0.999;
      c.near(elementary_fidelity(f, StoragePolicy::cat), 0.978229467289, 1e-12, "F_elem(0.999^22)");
    });
    c.time_limit(t, 1.0, "runtime");
    report("1", "closed-form rate and fidelity expressions", c);
  }

  // Gate simulations feeding the chain: GRAPE pulses plus the two hardware rows used below.
  std::vector<RowModel> rows;
  DrivePulses pulses;
  const double t_pipeline = timed([&] {
    pulses = optimize_drive_pulses(grape_settings(cfg), cfg.catqubit.alpha);
    const PipelineOptions opts = pipeline_options(cfg);
    for (const auto& row : hardware_rows(cfg)) {
      if (row.label != "1e4" && row.label != "1e5") continue;
      RowModel m = simulate_row(row, pulses, opts);
      m.node.T_o_override_s = cfg.link.T_o_s;
      rows.push_back(std::move(m));
    }
  });
  const NodeModel& n4 = row_named(rows, "1e4").node;
  const NodeModel& n5 = row_named(rows, "1e5").node;
  const std::vector<StoragePolicy> all = storage_policies(cfg);

  // 2 and 3. Headline crossovers and the fidelities there.
  {
    Check c2, c3;
    RateFidelityReport r1, r200;
    const double t = timed([&] {
      r1 = best_at_crossover(n5, 3, 1, cfg, all);
      r200 = best_at_crossover(n5, 3, 200, cfg, all);
    });
    c2.within_rel(r1.L_km, 387.0, 0.15, "L*(m=1) km");
    c2.within_rel(r200.L_km, 244.0, 0.15, "L*(m=200) km");
    c2.expect(true, describe(r1) + ", T_o " + std::to_string(n5.T_o(storage_policy_from_string(r1.policy)) * 1e6) + " us");
    c2.time_limit(t, 10.0, "runtime");
    report("2", "crossover points, n=3, K/kappa=1e5", c2);

    c3.near(r1.F_tot, 0.91, 0.03, "F_tot(m=1)");
    c3.near(r200.F_tot, 0.92, 0.03, "F_tot(m=200)");
    c3.expect(true, describe(r200));
    c3.time_limit(t_pipeline + t, 300.0, "runtime incl. gate simulations");
    report("3", "final fidelities at the crossovers", c3);
  }

  // 4. Supplement scenarios.
  {
    Check c;
    const std::vector<StoragePolicy> same_cavity{StoragePolicy::cat, StoragePolicy::fock};
    const RateFidelityReport a = best_at_crossover(n4, 2, 200, cfg, same_cavity);
    const RateFidelityReport b = best_at_crossover(n5, 2, 200, cfg, same_cavity);
    c.within_rel(a.L_km, 291.0, 0.15, "L*(1e4,n=2,m=200) km");
    c.near(a.F_tot, 0.6531, 0.05, "F_tot(1e4,n=2,m=200)");
    c.within_rel(b.L_km, 292.0, 0.15, "L*(1e5,n=2,m=200) km");
    c.near(b.F_tot, 0.9401, 0.05, "F_tot(1e5,n=2,m=200)");
    const RateFidelityReport d1 = best_at_crossover(n5, 1, 1, cfg, same_cavity);
    const RateFidelityReport d200 = best_at_crossover(n5, 1, 200, cfg, same_cavity);
    c.within_rel(d1.L_km, 700.0, 0.15, "L*(1e5,n=1,m=1) km");
    c.within_rel(d200.L_km, 450.0, 0.15, "L*(1e5,n=1,m=200) km");
    report("4", "supplement scenario crossovers and fidelities", c);
  }

  // 5. Gate-dynamics anchors.
  {
    Check c;
    double f_adiabatic = 0.0;
    const double t_ad = timed([&] {
      CatQubitParams p;
      for (const auto& row : hardware_rows(cfg))
        if (row.label == "1e3") {
          p.K = row.K;
          p.kappa = row.kappa;
        }
      p.alpha = cfg.catqubit.alpha;
      p.dim = cfg.catqubit.dim;
      const PulseSchedule pulse = adiabatic_drive_pulse(p, 6.5 / (1.3 * p.K));
      f_adiabatic = drive(p, pulse, fock(0, p.dim)).fidelity;
    });
    c.near(f_adiabatic, 0.9962, 0.002, "adiabatic drive at 1e3, K T=6.5");
    c.at_least(pulses.drive_result.fidelity, 0.999, "GRAPE drive T=0.5/K");
    c.at_least(pulses.undrive_result.fidelity, 0.999, "GRAPE undrive T=0.5/K");
    c.time_limit(t_ad, 600.0, "adiabatic runtime");
    GrapeResult again;
    const double t_grape = timed([&] {
      const GrapeProblem prob = drive_problem(grape_settings(cfg), cfg.catqubit.alpha, false);
      again = grape_optimize(prob, grape_initial_guess(prob, false), grape_settings(cfg).options);
    });
    c.time_limit(t_grape, 600.0, "GRAPE runtime");
    report("5", "gate-dynamics anchors", c);
  }

  // 6. Transduction anchor.
  {
    Check c;
    TransferResult r;
    const double t = timed([&] { r = spin_transfer(transducer_params(cfg), true); });
    c.near(r.eta, 0.9904, 0.005, "eta");
    c.time_limit(t, 60.0, "runtime with convergence check");
    report("6", "spin transfer efficiency", c);
  }

  // 7. Device anchors.
  {
    Check c;
    const KappaEffResult ke = kappa_eff(1.0, 1e-3, std::sqrt(2.0), cfg.catqubit.dim);
    c.near(ke.kappa_eff / 1e-3, 4.0, 0.4, "kappa_eff/kappa");
    DeviceParams d;
    d.omega_c = kTwoPi * 8e9;
    d.omega_q = kTwoPi * 9e9;
    d.K_q = kTwoPi * 200e6;
    const auto kerr_at = [&](double r) {
      DeviceParams q = d;
      q.g = r * q.delta();
      return dispersive_kerr(q).K;
    };
    c.near(kerr_at(0.05) / kerr_at(0.025), 16.0, 4.0, "K(0.05)/K(0.025)");
    const DeviceParams row = device_params(cfg).at(1);
    const double k1 = purcell_kappa(row.kappa_c, row.gamma, row.g, row.delta());
    const double k10 = purcell_kappa(10.0 * row.kappa_c, row.gamma, row.g, row.delta());
    c.at_most(k10 / k1 - 1.0, 0.05, "kappa shift under 10x kappa_c at 1e4");
    report("7", "device anchors", c);
  }

  // 8. Monte-Carlo oracle.
  {
    Check c;
    LinkParams link = link_params(cfg);
    link.T_o_s = 5e-5;
    int inside = 0;
    const double t = timed([&] {
      const ChainParams c0 = ChainParams::uniform(0, 1, cfg.chain.p_swap);
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const MonteCarloResult r = monte_carlo_time(c0, link, 100000, seed);
        if (std::abs(r.mean_s - mean_time(c0, link)) < 3.0 * r.standard_error_s) ++inside;
      }
    });
    c.expect(inside == 10, "n=0 within 3 sigma for " + std::to_string(inside) + "/10 seeds");
    for (int n = 1; n <= 3; ++n) {
      const ChainParams ch = ChainParams::uniform(n, 1, cfg.chain.p_swap);
      const MonteCarloResult r = monte_carlo_time(ch, link, 100000, cfg.chain.mc_seed);
      c.near(mean_time(ch, link) / r.mean_s, 1.0, 0.25, "analytic/MC n=" + std::to_string(n));
    }
    c.time_limit(t / 10.0, 60.0, "1e5 trials");
    report("8", "Monte-Carlo waiting-time oracle", c);
  }

  // 9. Protocol verifier.
  {
    Check c;
    const auto bell = [](const HeraldBranch& b) {
      Vector v = Vector::Zero(4);
      v(1) = 1.0 / std::sqrt(2.0);
      v(2) = (b.same_detector ? 1.0 : -1.0) / std::sqrt(2.0);
      return state_fidelity(b.state, QState::pure({2, 2}, v));
    };
    const ProtocolOutcome lossless = simulate_link_protocol(0.0, DetectorKind::threshold);
    c.near(lossless.success_probability, 0.5, 1e-15, "P_success");
    double worst = 1.0;
    for (double loss : {0.0, 0.5, 0.9})
      for (const auto& b : simulate_link_protocol(loss, DetectorKind::threshold).branches)
        worst = std::min(worst, bell(b));
    c.near(worst, 1.0, 1e-9, "worst heralded Bell fidelity over loss {0,0.5,0.9}");
    report("9", "two-step heralding protocol", c);
  }

  // 10. Property suites.
  {
    Check c;
    const double t = timed([&] {
      // qcore
      const int d = 20;
      const Vector e = cat_state(std::sqrt(2.0), Parity::even, d).vector();
      const Vector o = cat_state(std::sqrt(2.0), Parity::odd, d).vector();
      c.expect(std::abs(e.norm() - 1.0) < 1e-10 && std::abs(o.norm() - 1.0) < 1e-10, "cat normalization");
      c.expect(std::abs(e.dot(o)) < 1e-10, "cat orthogonality");
      const Matrix a = annihilation(d).matrix();
      const Matrix comm = a * a.adjoint() - a.adjoint() * a;
      c.expect((comm.topLeftCorner(d - 1, d - 1) - Matrix::Identity(d - 1, d - 1)).norm() < 1e-12,
               "[a, a^dag] = 1 below truncation");

      // dynamics
      const int dd = 12;
      TimeDependentHamiltonian h;
      const QOperator A = annihilation(dd), Ad = creation(dd);
      h.static_part = cplx(-1.0) * (Ad * Ad * A * A) + cplx(2.0) * (Ad * Ad + A * A);
      h.t1 = 2.0;
      const std::vector<CollapseOp> loss{{A, 0.1}};
      EvolveOptions eo;
      eo.n_samples = 9;
      const Trajectory tr = evolve(h, loss, fock(0, dd).to_mixed(), eo);
      bool physical = true;
      for (const auto& s : tr.states) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s.density() + s.density().adjoint()));
        physical = physical && std::abs(s.trace() - 1.0) < 1e-8 && es.eigenvalues().minCoeff() > -1e-7;
      }
      c.expect(physical, "Lindblad trace and positivity");
      const auto run_tol = [&](double tol) {
        EvolveOptions x;
        x.rel_tol = tol;
        x.abs_tol = tol * 1e-2;
        return evolve(h, loss, fock(0, dd).to_mixed(), x).final_state().density();
      };
      c.expect((run_tol(1e-8) - run_tol(5e-9)).norm() < 1e-7, "tolerance halving converged");

      // GRAPE gradient
      GrapeProblem gp;
      gp.params.dim = 12;
      gp.initial = fock(0, 12);
      gp.target = cat_state(std::sqrt(2.0), Parity::even, 12);
      gp.total_time = 0.5;
      gp.n_segments = 8;
      gp.amplitude_bound = 10.0;
      std::mt19937_64 rng(17);
      std::uniform_real_distribution<double> u(-3.0, 3.0);
      double worst_rel = 0.0;
      for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> ep(8), pp(8);
        for (int k = 0; k < 8; ++k) {
          ep[k] = 2.0 + u(rng);
          pp[k] = u(rng);
        }
        const GrapeEvaluation g = grape_evaluate(gp, ep, pp);
        double diff2 = 0.0, norm2 = 0.0;
        const double step = 1e-5;
        for (int k = 0; k < 8; ++k)
          for (int which = 0; which < 2; ++which) {
            auto& v = which == 0 ? ep : pp;
            const double keep = v[k];
            v[k] = keep + step;
            const double fp = grape_evaluate(gp, ep, pp).fidelity;
            v[k] = keep - step;
            const double fm = grape_evaluate(gp, ep, pp).fidelity;
            v[k] = keep;
            const double an = which == 0 ? g.grad_ep[k] : g.grad_perp[k];
            const double fd = (fp - fm) / (2.0 * step);
            diff2 += (fd - an) * (fd - an);
            norm2 += an * an;
          }
        worst_rel = std::max(worst_rel, std::sqrt(diff2 / norm2));
      }
      std::ostringstream gs;
      gs << "GRAPE gradient vs finite differences rel " << worst_rel;
      c.expect(worst_rel < 1e-4, gs.str());

      // multiplexing
      const LinkParams link;
      bool linear = true;
      for (int n = 0; n <= 3; ++n) {
        const double one = distribution_rate(ChainParams::uniform(n, 1, 0.9), link);
        linear = linear && std::abs(distribution_rate(ChainParams::uniform(n, 200, 0.9), link) - 200.0 * one) <=
                               1e-15 * 200.0 * one;
      }
      c.expect(linear, "multiplexing linearity");

      // determinism
      const auto render = [&] {
        std::ostringstream os;
        std::vector<RateFidelityReport> reps;
        for (int n = 0; n <= 3; ++n) reps.push_back(evaluate_chain(n5, ChainParams::uniform(n, 200, 0.9), link, 50.0 * (1 << n), StoragePolicy::cat));
        write_reports_csv(os, reps);
        const MonteCarloResult mc = monte_carlo_time(ChainParams::uniform(2, 1, 0.9), link, 20000, 3);
        os << mc.mean_s << "," << mc.standard_error_s;
        return os.str();
      };
      c.expect(render() == render(), "byte-identical reruns");
    });
    c.time_limit(t, 120.0, "runtime");
    report("10", "property suites", c);
  }

  // Comparator ordering.
  {
    Check c;
    const auto pts = figure6(n5, cfg.chain.figure_n, link_params(cfg), cfg.chain.p_swap, cfg.comparators.dlcz,
                             cfg.comparators.re, 300.0, 800.0, 51, 200, cfg.comparators.direct_source_hz);
    int ordered = 0;
    for (const auto& p : pts)
      if (p.cat_m200 > p.dlcz_m200 && p.cat_m200 > p.re_m200 && p.cat_m1 > p.dlcz_m1 && p.cat_m1 > p.re_m1) ++ordered;
    c.expect(ordered == static_cast<int>(pts.size()),
             "cat above DLCZ and RE at " + std::to_string(ordered) + "/" + std::to_string(pts.size()) +
                 " lengths in [300, 800] km (m=1 and m=200)");
    report("C", "comparator ordering", c);
  }

  std::cout << (failures == 0 ? "all acceptance criteria met" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
