#pragma once

// Entanglement-distribution rates and fidelities for nested repeater chains:
// the analytic waiting-time formula, a Monte-Carlo oracle for it, the
// fidelity budget, storage coherence, comparator schemes and crossover search.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace catrep {

struct LinkParams {
  double L0_km = 50.0;
  double L_att_km = 22.0;
  double p = 0.8;              // emission and transduction probability
  double eta_o = 0.9;          // optical detection efficiency
  double T_o_s = 0.0;          // local operation time per attempt
  double c_fiber_km_s = 2e5;
  /// Use 1/2 eta_t (p eta_o)^2 instead of 1/2 eta_t p eta_o^2.
  bool p0_two_round = false;

  void validate() const;
};

enum class StoragePolicy { cat, fock, transfer };

std::string to_string(StoragePolicy policy);
StoragePolicy storage_policy_from_string(const std::string& name);

struct ChainParams {
  int n = 0;                           // nesting level
  int m = 1;                           // multiplexing
  std::vector<double> swap_probability;  // P_1..P_n

  /// All levels share P_i = p_swap.
  static ChainParams uniform(int n, int m, double p_swap);
  void validate() const;
};

/// Storage decoherence inputs for the residual coherence.
struct StorageParams {
  StoragePolicy policy = StoragePolicy::cat;
  double kappa = 0.0;          // Fock-basis decay, 1/s
  double kappa_eff = 0.0;      // cat coherence decay, 1/s
  double lifetime_s = 10.0;    // long-lived cavity (transfer policy)
};

struct RateFidelityReport {
  std::string label;
  int n = 0;
  int m = 1;
  std::string policy;
  double L_km = 0.0;
  double P0 = 0.0;
  double mean_time_s = 0.0;
  double rate_hz = 0.0;
  double C_R = 1.0;
  double F_elem = 1.0;
  double F_swap = 1.0;
  double F_tot = 1.0;
  double direct_rate_hz = 0.0;
  bool beats_direct = false;  // rate above direct transmission at L
};

// -- rates --------------------------------------------------------------------

/// 1/2 e^{-L0/L_att} p eta_o^2 (or the two-round variant).
double p0(const LinkParams& link);

/// (3/2)^n (L0/c + T_o) / (P0 P1 ... Pn) for one channel set.
double mean_time(const ChainParams& chain, const LinkParams& link);

/// m / mean_time.
double distribution_rate(const ChainParams& chain, const LinkParams& link);

struct MonteCarloResult {
  double mean_s = 0.0;
  double standard_error_s = 0.0;
  long long trials = 0;
};

/// Brute-force waiting time: geometric attempts per link, hierarchical swaps
/// that wait for both children and, on failure, regenerate both. Trials are
/// split into fixed chunks with independent seeded streams, so the result
/// depends only on (trials, seed).
MonteCarloResult monte_carlo_time(const ChainParams& chain, const LinkParams& link, long long trials,
                                  std::uint64_t seed);

/// source_rate e^{-L/L_att}, optionally times eta_o^2.
double direct_transmission_rate(double L_km, double source_rate_hz = 1e9, double L_att_km = 22.0,
                                double eta_o = 1.0);

// -- fidelity budget ------------------------------------------------------------

/// cat: e^{-kappa_eff T}; fock: e^{-kappa T}; transfer: e^{-T/lifetime}.
double residual_coherence(const StorageParams& storage, double T_s);

/// Per-operation fidelities keyed by "drive", "undrive", "X_pi/2", "X_pi",
/// "Z_pi/2", "CNOT", "transduction".
using OperationMap = std::map<std::string, double>;

class MissingOperation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation counts for one elementary link under a storage policy.
OperationMap elementary_inventory(StoragePolicy policy);

/// Product over the inventory of F_op^count.
double elementary_fidelity(const OperationMap& fidelities, StoragePolicy policy);

/// CNOT and Hadamard (Z X Z) at the sender, X_pi Z_pi at the receiver.
double swap_fidelity(const OperationMap& fidelities);

/// F_elem^l F_swap^{l-1} C_R with l = 2^n.
double final_fidelity(double F_elem, double F_swap, int n, double C_R);

/// Local operation time per attempt: the link inventory weighted by
/// operation durations, in seconds.
double operation_time(const OperationMap& durations_s, StoragePolicy policy);

// -- node model and scheme evaluation -------------------------------------------

/// Everything a chain evaluation needs about one K/kappa hardware row.
struct NodeModel {
  std::string label;
  OperationMap fidelity;
  OperationMap duration_s;
  double kappa = 0.0;
  double kappa_eff = 0.0;
  double transfer_lifetime_s = 10.0;
  /// Overrides the inventory-derived T_o when > 0.
  double T_o_override_s = 0.0;

  double T_o(StoragePolicy policy) const;
  StorageParams storage(StoragePolicy policy) const;
};

/// Full pipeline at total length L = 2^n L0. The waiting time entering C_R
/// is the per-channel-set time divided by m, i.e. the inverse total rate.
RateFidelityReport evaluate_chain(const NodeModel& node, const ChainParams& chain, LinkParams link,
                                  double L_total_km, StoragePolicy policy, double direct_source_hz = 1e9);

/// Best F_tot over the given policies (ties keep the earlier policy).
RateFidelityReport evaluate_best(const NodeModel& node, const ChainParams& chain, const LinkParams& link,
                                 double L_total_km, const std::vector<StoragePolicy>& policies,
                                 double direct_source_hz = 1e9);

// -- comparators ------------------------------------------------------------------

struct DlczParams {
  double p_gen = 0.01;
  double eta_mem = 0.9;
  double eta_d = 0.9;
  double fidelity_ceiling = 0.75;
};

struct ReParams {
  double p = 0.8;
  double eta_o = 0.9;
  double T_o_s = 1e-4;
  double p_swap = 0.9;
  double fidelity_ceiling = 0.80;
};

/// Simplified DLCZ: P0 = min(1, 2 p_gen eta_mem eta_d e^{-L0/(2 L_att)}),
/// P_i = eta_mem^2 / 2, no operation time. F_tot holds the ceiling.
RateFidelityReport dlcz_rate(const DlczParams& params, int n, int m, double L_total_km,
                             double L_att_km = 22.0, double c_fiber_km_s = 2e5);

/// Single-ion scheme: P0 = 1/2 e^{-L0/L_att} (p eta_o)^2 with T_o and P_i
/// from params. F_tot holds the ceiling.
RateFidelityReport re_rate(const ReParams& params, int n, int m, double L_total_km, double L_att_km = 22.0,
                           double c_fiber_km_s = 2e5);

// -- crossover -------------------------------------------------------------------

class NoCrossover : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using RateCurve = std::function<double(double L_km)>;

/// Bisection for scheme(L) = reference(L) in [lo, hi]; refines until the
/// bracket is below 0.1 km and the relative rate mismatch is below 1e-3.
double crossover(const RateCurve& scheme, const RateCurve& reference, double lo_km, double hi_km);

/// Crossover of the cat chain against direct transmission for one policy.
double chain_crossover(const NodeModel& node, const ChainParams& chain, const LinkParams& link,
                       StoragePolicy policy, double lo_km = 50.0, double hi_km = 2000.0,
                       double direct_source_hz = 1e9);

// -- scenario tables and figure data ----------------------------------------------

struct Scenario {
  int n = 0;
  int m = 1;
  std::vector<StoragePolicy> policies{StoragePolicy::cat, StoragePolicy::fock, StoragePolicy::transfer};
  /// Evaluate at the crossover (per policy) instead of at L0.
  bool at_crossover = false;
};

/// One report per (node, scenario), keeping the best policy. Fixed-length
/// scenarios use 2^n link.L0_km; crossovers are searched in [lo, hi].
std::vector<RateFidelityReport> scenario_table(const std::vector<NodeModel>& nodes,
                                               const std::vector<Scenario>& scenarios, const ChainParams& base_chain,
                                               const LinkParams& link, double direct_source_hz = 1e9,
                                               double lo_km = 1.0, double hi_km = 3000.0);

void write_reports_csv(std::ostream& os, const std::vector<RateFidelityReport>& reports);

struct Figure6Point {
  double L_km = 0.0;
  double direct = 0.0;
  double cat_m200 = 0.0, re_m200 = 0.0, cat_m1 = 0.0, re_m1 = 0.0, dlcz_m200 = 0.0, dlcz_m1 = 0.0;
};

/// Curves A-G over [L_min, L_max] with `points` samples.
std::vector<Figure6Point> figure6(const NodeModel& node, int n, const LinkParams& link, double p_swap,
                                  const DlczParams& dlcz, const ReParams& re, double L_min_km = 100.0,
                                  double L_max_km = 1000.0, int points = 91, int m_multiplexed = 200,
                                  double direct_source_hz = 1e9);

void write_figure6_csv(std::ostream& os, const std::vector<Figure6Point>& points);

}  // namespace catrep
