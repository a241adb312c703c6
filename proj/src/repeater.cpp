#include "catrep/repeater.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <thread>

#include "catrep/csv.hpp"

namespace catrep {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void LinkParams::validate() const {
  if (!(L0_km > 0.0) || !(L_att_km > 0.0) || !(c_fiber_km_s > 0.0))
    throw std::invalid_argument("link lengths and fiber speed must be positive");
  if (!in_unit(p) || !in_unit(eta_o)) throw std::invalid_argument("link probabilities must lie in [0, 1]");
  if (!(T_o_s >= 0.0)) throw std::invalid_argument("T_o must be non-negative");
}

std::string to_string(StoragePolicy policy) {
  switch (policy) {
    case StoragePolicy::cat: return "cat";
    case StoragePolicy::fock: return "fock";
    case StoragePolicy::transfer: return "transfer";
  }
  return "cat";
}

StoragePolicy storage_policy_from_string(const std::string& name) {
  if (name == "cat") return StoragePolicy::cat;
  if (name == "fock") return StoragePolicy::fock;
  if (name == "transfer") return StoragePolicy::transfer;
  throw std::invalid_argument("unknown storage policy '" + name + "'");
}

ChainParams ChainParams::uniform(int n, int m, double p_swap) {
  ChainParams c;
  c.n = n;
  c.m = m;
  c.swap_probability.assign(static_cast<std::size_t>(std::max(n, 0)), p_swap);
  return c;
}

void ChainParams::validate() const {
  if (n < 0) throw std::invalid_argument("nesting level must be non-negative");
  if (m < 1) throw std::invalid_argument("multiplexing must be at least 1");
  if (swap_probability.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("need one swap probability per nesting level");
  for (double p : swap_probability)
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("swap probabilities must lie in (0, 1]");
}

// -- rates --------------------------------------------------------------------

double p0(const LinkParams& link) {
  link.validate();
  const double eta_t = std::exp(-link.L0_km / link.L_att_km);
  if (link.p0_two_round) return 0.5 * eta_t * (link.p * link.eta_o) * (link.p * link.eta_o);
  return 0.5 * eta_t * link.p * link.eta_o * link.eta_o;
}

double mean_time(const ChainParams& chain, const LinkParams& link) {
  chain.validate();
  double prob = p0(link);
  for (double p : chain.swap_probability) prob *= p;
  return std::pow(1.5, chain.n) * (link.L0_km / link.c_fiber_km_s + link.T_o_s) / prob;
}

double distribution_rate(const ChainParams& chain, const LinkParams& link) {
  return chain.m / mean_time(chain, link);
}

namespace {

class ChainSampler {
 public:
  ChainSampler(const ChainParams& chain, const LinkParams& link)
      : chain_(chain), attempt_(link.L0_km / link.c_fiber_km_s + link.T_o_s), link_(p0(link)) {}

  double sample(int level, std::mt19937_64& rng) {
    if (level == 0) return attempt_ * static_cast<double>(link_(rng) + 1);
    const double p = chain_.swap_probability[static_cast<std::size_t>(level - 1)];
    double total = 0.0;
    for (;;) {
      const double a = sample(level - 1, rng);
      const double b = sample(level - 1, rng);
      total += std::max(a, b);
      if (uniform_(rng) < p) return total;
    }
  }

 private:
  const ChainParams& chain_;
  double attempt_;
  std::geometric_distribution<long long> link_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace

MonteCarloResult monte_carlo_time(const ChainParams& chain, const LinkParams& link, long long trials,
                                  std::uint64_t seed) {
  chain.validate();
  link.validate();
  if (trials < 10000) throw std::invalid_argument("Monte-Carlo needs at least 10000 trials");
  if (!(p0(link) > 0.0)) throw std::invalid_argument("link success probability is zero");

  constexpr int kChunks = 16;
  struct Sums {
    long double s = 0.0L, s2 = 0.0L;
  };
  std::vector<Sums> sums(kChunks);
  auto run_chunk = [&](int c) {
    const long long count = trials / kChunks + (c < trials % kChunks ? 1 : 0);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(c)};
    std::mt19937_64 rng(seq);
    ChainSampler sampler(chain, link);
    for (long long i = 0; i < count; ++i) {
      const long double t = sampler.sample(chain.n, rng);
      sums[static_cast<std::size_t>(c)].s += t;
      sums[static_cast<std::size_t>(c)].s2 += t * t;
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(kChunks, std::thread::hardware_concurrency()));
  if (workers == 1) {
    for (int c = 0; c < kChunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int c = static_cast<int>(w); c < kChunks; c += static_cast<int>(workers)) run_chunk(c);
      });
    for (auto& t : pool) t.join();
  }
  long double s = 0.0L, s2 = 0.0L;
  for (const auto& x : sums) {
    s += x.s;
    s2 += x.s2;
  }
  const long double n = static_cast<long double>(trials);
  const long double mean = s / n;
  const long double var = trials > 1 ? std::max(0.0L, (s2 - n * mean * mean) / (n - 1)) : 0.0L;
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n)), trials};
}

double direct_transmission_rate(double L_km, double source_rate_hz, double L_att_km, double eta_o) {
  if (!(L_km >= 0.0)) throw std::invalid_argument("distance must be non-negative");
  if (!(L_att_km > 0.0)) throw std::invalid_argument("attenuation length must be positive");
  return source_rate_hz * std::exp(-L_km / L_att_km) * eta_o * eta_o;
}

// -- fidelity budget ------------------------------------------------------------

double residual_coherence(const StorageParams& storage, double T_s) {
  if (!(T_s >= 0.0)) throw std::invalid_argument("waiting time must be non-negative");
  switch (storage.policy) {
    case StoragePolicy::cat: return std::exp(-storage.kappa_eff * T_s);
    case StoragePolicy::fock: return std::exp(-storage.kappa * T_s);
    case StoragePolicy::transfer:
      if (!(storage.lifetime_s > 0.0)) throw std::invalid_argument("storage lifetime must be positive");
      return std::exp(-T_s / storage.lifetime_s);
  }
  return 1.0;
}

OperationMap elementary_inventory(StoragePolicy policy) {
  OperationMap inv{{"drive", 6}, {"X_pi/2", 2}, {"CNOT", 4}, {"undrive", 4}, {"transduction", 4}, {"X_pi", 2}};
  if (policy != StoragePolicy::cat) {
    inv["drive"] += 4;
    inv["undrive"] += 4;
  }
  return inv;
}

namespace {

double lookup(const OperationMap& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw MissingOperation("missing value for operation '" + key + "'");
  return it->second;
}

}  // namespace

double elementary_fidelity(const OperationMap& fidelities, StoragePolicy policy) {
  double f = 1.0;
  for (const auto& [op, count] : elementary_inventory(policy)) {
    const double v = lookup(fidelities, op);
    if (!in_unit(v)) throw std::invalid_argument("fidelity for '" + op + "' outside [0, 1]");
    f *= std::pow(v, count);
  }
  return f;
}

double swap_fidelity(const OperationMap& fidelities) {
  const double z = lookup(fidelities, "Z_pi/2");
  return lookup(fidelities, "CNOT") * z * z * lookup(fidelities, "X_pi/2") * lookup(fidelities, "X_pi") * z * z;
}

double final_fidelity(double F_elem, double F_swap, int n, double C_R) {
  if (!in_unit(F_elem) || !in_unit(F_swap) || !in_unit(C_R))
    throw std::invalid_argument("fidelity inputs must lie in [0, 1]");
  if (n < 0) throw std::invalid_argument("nesting level must be non-negative");
  const double l = std::ldexp(1.0, n);
  return std::pow(F_elem, l) * std::pow(F_swap, l - 1.0) * C_R;
}

double operation_time(const OperationMap& durations_s, StoragePolicy policy) {
  double t = 0.0;
  for (const auto& [op, count] : elementary_inventory(policy)) t += count * lookup(durations_s, op);
  return t;
}

// -- node model --------------------------------------------------------------------

double NodeModel::T_o(StoragePolicy policy) const {
  return T_o_override_s > 0.0 ? T_o_override_s : operation_time(duration_s, policy);
}

StorageParams NodeModel::storage(StoragePolicy policy) const {
  return {policy, kappa, kappa_eff, transfer_lifetime_s};
}

RateFidelityReport evaluate_chain(const NodeModel& node, const ChainParams& chain, LinkParams link,
                                  double L_total_km, StoragePolicy policy, double direct_source_hz) {
  chain.validate();
  if (!(L_total_km > 0.0)) throw std::invalid_argument("total length must be positive");
  link.L0_km = L_total_km / std::ldexp(1.0, chain.n);
  link.T_o_s = node.T_o(policy);
  RateFidelityReport r;
  r.label = node.label;
  r.n = chain.n;
  r.m = chain.m;
  r.policy = to_string(policy);
  r.L_km = L_total_km;
  r.P0 = p0(link);
  r.mean_time_s = mean_time(chain, link);
  r.rate_hz = chain.m / r.mean_time_s;
  r.C_R = residual_coherence(node.storage(policy), 1.0 / r.rate_hz);
  r.F_elem = elementary_fidelity(node.fidelity, policy);
  r.F_swap = swap_fidelity(node.fidelity);
  r.F_tot = final_fidelity(r.F_elem, r.F_swap, chain.n, r.C_R);
  r.direct_rate_hz = direct_transmission_rate(L_total_km, direct_source_hz, link.L_att_km);
  r.beats_direct = r.rate_hz > r.direct_rate_hz;
  return r;
}

RateFidelityReport evaluate_best(const NodeModel& node, const ChainParams& chain, const LinkParams& link,
                                 double L_total_km, const std::vector<StoragePolicy>& policies,
                                 double direct_source_hz) {
  if (policies.empty()) throw std::invalid_argument("need at least one storage policy");
  RateFidelityReport best;
  bool first = true;
  for (StoragePolicy p : policies) {
    RateFidelityReport r = evaluate_chain(node, chain, link, L_total_km, p, direct_source_hz);
    if (first || r.F_tot > best.F_tot) best = std::move(r);
    first = false;
  }
  return best;
}

// -- comparators --------------------------------------------------------------------

RateFidelityReport dlcz_rate(const DlczParams& params, int n, int m, double L_total_km, double L_att_km,
                             double c_fiber_km_s) {
  if (!in_unit(params.p_gen) || !in_unit(params.eta_mem) || !in_unit(params.eta_d))
    throw std::invalid_argument("DLCZ efficiencies must lie in [0, 1]");
  const ChainParams chain = ChainParams::uniform(n, m, 0.5 * params.eta_mem * params.eta_mem);
  chain.validate();
  const double L0 = L_total_km / std::ldexp(1.0, n);
  RateFidelityReport r;
  r.label = "DLCZ (simplified)";
  r.n = n;
  r.m = m;
  r.policy = "-";
  r.L_km = L_total_km;
  r.P0 = std::min(1.0, 2.0 * params.p_gen * params.eta_mem * params.eta_d * std::exp(-L0 / (2.0 * L_att_km)));
  double prob = r.P0;
  for (double p : chain.swap_probability) prob *= p;
  r.mean_time_s = std::pow(1.5, n) * (L0 / c_fiber_km_s) / prob;
  r.rate_hz = m / r.mean_time_s;
  r.F_elem = r.F_swap = r.C_R = 1.0;
  r.F_tot = params.fidelity_ceiling;
  r.direct_rate_hz = direct_transmission_rate(L_total_km, 1e9, L_att_km);
  r.beats_direct = r.rate_hz > r.direct_rate_hz;
  return r;
}

RateFidelityReport re_rate(const ReParams& params, int n, int m, double L_total_km, double L_att_km,
                           double c_fiber_km_s) {
  LinkParams link;
  link.L0_km = L_total_km / std::ldexp(1.0, n);
  link.L_att_km = L_att_km;
  link.p = params.p;
  link.eta_o = params.eta_o;
  link.T_o_s = params.T_o_s;
  link.c_fiber_km_s = c_fiber_km_s;
  link.p0_two_round = true;
  const ChainParams chain = ChainParams::uniform(n, m, params.p_swap);
  RateFidelityReport r;
  r.label = "RE ion";
  r.n = n;
  r.m = m;
  r.policy = "-";
  r.L_km = L_total_km;
  r.P0 = p0(link);
  r.mean_time_s = mean_time(chain, link);
  r.rate_hz = m / r.mean_time_s;
  r.F_elem = r.F_swap = r.C_R = 1.0;
  r.F_tot = params.fidelity_ceiling;
  r.direct_rate_hz = direct_transmission_rate(L_total_km, 1e9, L_att_km);
  r.beats_direct = r.rate_hz > r.direct_rate_hz;
  return r;
}

// -- crossover --------------------------------------------------------------------

double crossover(const RateCurve& scheme, const RateCurve& reference, double lo_km, double hi_km) {
  if (!(lo_km < hi_km)) throw std::invalid_argument("crossover bracket must satisfy lo < hi");
  // Compare in log space: rates span many decades.
  auto diff = [&](double L) { return std::log(scheme(L)) - std::log(reference(L)); };
  double a = lo_km, b = hi_km, fa = diff(a);
  const double fb = diff(b);
  if (!std::isfinite(fa) || !std::isfinite(fb) || (fa > 0.0) == (fb > 0.0))
    throw NoCrossover("no sign change of the rate difference in [" + format_number(lo_km) + ", " +
                      format_number(hi_km) + "] km");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = diff(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
    const double L = 0.5 * (a + b);
    if (b - a < 0.1 && std::abs(std::expm1(diff(L))) < 1e-4) return L;
  }
  return 0.5 * (a + b);
}

double chain_crossover(const NodeModel& node, const ChainParams& chain, const LinkParams& link,
                       StoragePolicy policy, double lo_km, double hi_km, double direct_source_hz) {
  LinkParams l = link;
  l.T_o_s = node.T_o(policy);
  const int n = chain.n;
  auto scheme = [&](double L) {
    LinkParams x = l;
    x.L0_km = L / std::ldexp(1.0, n);
    return distribution_rate(chain, x);
  };
  auto direct = [&](double L) { return direct_transmission_rate(L, direct_source_hz, link.L_att_km); };
  return crossover(scheme, direct, lo_km, hi_km);
}

// -- tables --------------------------------------------------------------------------

std::vector<RateFidelityReport> scenario_table(const std::vector<NodeModel>& nodes,
                                               const std::vector<Scenario>& scenarios, const ChainParams& base_chain,
                                               const LinkParams& link, double direct_source_hz, double lo_km,
                                               double hi_km) {
  const double p_swap = base_chain.swap_probability.empty() ? 0.9 : base_chain.swap_probability.front();
  std::vector<RateFidelityReport> out;
  for (const auto& node : nodes)
    for (const auto& sc : scenarios) {
      const ChainParams chain = ChainParams::uniform(sc.n, sc.m, p_swap);
      if (sc.policies.empty()) throw std::invalid_argument("scenario needs at least one storage policy");
      RateFidelityReport best;
      bool first = true;
      for (StoragePolicy p : sc.policies) {
        const double L = sc.at_crossover ? chain_crossover(node, chain, link, p, lo_km, hi_km, direct_source_hz)
                                         : link.L0_km * std::ldexp(1.0, sc.n);
        RateFidelityReport r = evaluate_chain(node, chain, link, L, p, direct_source_hz);
        if (first || r.F_tot > best.F_tot) best = std::move(r);
        first = false;
      }
      out.push_back(std::move(best));
    }
  return out;
}

void write_reports_csv(std::ostream& os, const std::vector<RateFidelityReport>& reports) {
  CsvWriter w(os);
  w.header({"label", "n", "m", "policy", "L_km", "P0", "mean_time_s", "rate_hz", "C_R", "F_elem", "F_swap",
            "F_tot", "direct_rate_hz", "beats_direct"});
  for (const auto& r : reports)
    w.field(r.label)
        .field(r.n)
        .field(r.m)
        .field(r.policy)
        .field(r.L_km)
        .field(r.P0)
        .field(r.mean_time_s)
        .field(r.rate_hz)
        .field(r.C_R)
        .field(r.F_elem)
        .field(r.F_swap)
        .field(r.F_tot)
        .field(r.direct_rate_hz)
        .field(r.beats_direct ? 1 : 0)
        .end_row();
}

std::vector<Figure6Point> figure6(const NodeModel& node, int n, const LinkParams& link, double p_swap,
                                  const DlczParams& dlcz, const ReParams& re, double L_min_km, double L_max_km,
                                  int points, int m_multiplexed, double direct_source_hz) {
  if (points < 2 || !(L_min_km > 0.0) || !(L_max_km > L_min_km))
    throw std::invalid_argument("invalid figure range");
  LinkParams l = link;
  l.T_o_s = node.T_o(StoragePolicy::cat);
  const ChainParams single = ChainParams::uniform(n, 1, p_swap);
  const ChainParams multi = ChainParams::uniform(n, m_multiplexed, p_swap);
  std::vector<Figure6Point> out;
  for (int i = 0; i < points; ++i) {
    const double L = L_min_km + (L_max_km - L_min_km) * i / (points - 1);
    l.L0_km = L / std::ldexp(1.0, n);
    Figure6Point pt;
    pt.L_km = L;
    pt.direct = direct_transmission_rate(L, direct_source_hz, link.L_att_km);
    pt.cat_m200 = distribution_rate(multi, l);
    pt.cat_m1 = distribution_rate(single, l);
    pt.re_m200 = re_rate(re, n, m_multiplexed, L, link.L_att_km, link.c_fiber_km_s).rate_hz;
    pt.re_m1 = re_rate(re, n, 1, L, link.L_att_km, link.c_fiber_km_s).rate_hz;
    pt.dlcz_m200 = dlcz_rate(dlcz, n, m_multiplexed, L, link.L_att_km, link.c_fiber_km_s).rate_hz;
    pt.dlcz_m1 = dlcz_rate(dlcz, n, 1, L, link.L_att_km, link.c_fiber_km_s).rate_hz;
    out.push_back(pt);
  }
  return out;
}

void write_figure6_csv(std::ostream& os, const std::vector<Figure6Point>& points) {
  CsvWriter w(os);
  w.header({"L_km", "rate_direct", "rate_cat_m200", "rate_re_m200", "rate_cat_m1", "rate_re_m1", "rate_dlcz_m200",
            "rate_dlcz_m1"});
  for (const auto& p : points)
    w.field(p.L_km)
        .field(p.direct)
        .field(p.cat_m200)
        .field(p.re_m200)
        .field(p.cat_m1)
        .field(p.re_m1)
        .field(p.dlcz_m200)
        .field(p.dlcz_m1)
        .end_row();
}

}  // namespace catrep
