// catrep: command-line front end. Each subcommand computes its tables in
// memory and only then writes <out>/<command>/ with the reports and a
// resolved-config snapshot.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "catrep/config.hpp"
#include "catrep/csv.hpp"
#include "json.hpp"

namespace {

using namespace catrep;
using ojson = nlohmann::ordered_json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr const char* kConfigEnv = "CATREP_CONFIG";

using Cell = std::variant<std::string, double, long long>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table row width mismatch");
    rows.push_back(std::move(row));
  }
};

// Base file name -> table, rendered in the configured format.
using Outputs = std::vector<std::pair<std::string, Table>>;

struct Overrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials;
  std::optional<int> iters;
  bool figure6 = false;
};

ojson config_json(const RunConfig& c) { return ojson::parse(dump_config(c)); }

std::string render(const Table& t, const RunConfig& c) {
  if (c.output.format == "csv") {
    std::ostringstream os;
    CsvWriter w(os);
    w.header(t.columns);
    for (const auto& row : t.rows) {
      for (const auto& cell : row) std::visit([&](const auto& v) { w.field(v); }, cell);
      w.end_row();
    }
    return os.str();
  }
  ojson rows = ojson::array();
  for (const auto& row : t.rows) {
    ojson obj = ojson::object();
    for (std::size_t i = 0; i < row.size(); ++i) std::visit([&](const auto& v) { obj[t.columns[i]] = v; }, row[i]);
    rows.push_back(std::move(obj));
  }
  ojson doc = {{"toolkit_version", toolkit_version()},
               {"config", config_json(c)},
               {"columns", t.columns},
               {"rows", std::move(rows)}};
  return doc.dump(2) + "\n";
}

void write_outputs(const std::string& command, const Outputs& outputs, const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& [name, table] : outputs) files.emplace_back(name + "." + c.output.format, render(table, c));
  ojson snapshot = {{"toolkit_version", toolkit_version()}, {"command", command}, {"config", config_json(c)}};
  files.emplace_back("resolved_config.json", snapshot.dump(2) + "\n");

  const std::filesystem::path dir = std::filesystem::path(c.output.dir) / command;
  std::filesystem::create_directories(dir);
  for (const auto& [name, text] : files) {
    const auto tmp = dir / (name + ".tmp");
    {
      std::ofstream os(tmp, std::ios::binary);
      os << text;
      if (!os) throw std::runtime_error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, dir / name);
  }
  std::cerr << "wrote " << files.size() << " files to " << dir.string() << "\n";
}

RunConfig resolve_config(const Overrides& o) {
  std::string path = o.config_path;
  if (path.empty())
    if (const char* env = std::getenv(kConfigEnv)) path = env;
  RunConfig c = path.empty() ? default_config() : load_config_file(path);
  if (o.out) c.output.dir = *o.out;
  if (o.format) c.output.format = *o.format;
  if (o.seed) {
    c.grape.seed = *o.seed;
    c.chain.mc_seed = *o.seed;
  }
  if (o.trials) c.chain.mc_trials = *o.trials;
  if (o.iters) c.grape.max_iters = *o.iters;
  validate(c);
  return c;
}

double direct_source(const RunConfig& c) {
  const double w = c.comparators.direct_detector_weighting ? c.link.eta_o * c.link.eta_o : 1.0;
  return c.comparators.direct_source_hz * w;
}

std::vector<RowModel> simulate_rows(const RunConfig& c, const std::vector<std::string>& only = {}) {
  std::cerr << "optimizing drive pulses\n";
  const DrivePulses pulses = optimize_drive_pulses(grape_settings(c), c.catqubit.alpha);
  const PipelineOptions opts = pipeline_options(c);
  std::vector<RowModel> out;
  for (const auto& row : hardware_rows(c)) {
    if (!only.empty() && std::find(only.begin(), only.end(), row.label) == only.end()) continue;
    std::cerr << "simulating row " << row.label << "\n";
    RowModel m = simulate_row(row, pulses, opts);
    m.node.T_o_override_s = c.link.T_o_s;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<NodeModel> nodes_of(const std::vector<RowModel>& models) {
  std::vector<NodeModel> nodes;
  for (const auto& m : models) nodes.push_back(m.node);
  return nodes;
}

Table report_table() {
  return Table{{"label", "n", "m", "policy", "L_km", "P0", "mean_time_s", "rate_hz", "C_R", "F_elem", "F_swap",
                "F_tot", "direct_rate_hz", "beats_direct"},
               {}};
}

void add_report(Table& t, const RateFidelityReport& r) {
  t.add({r.label, (long long)r.n, (long long)r.m, r.policy, r.L_km, r.P0, r.mean_time_s, r.rate_hz, r.C_R, r.F_elem,
         r.F_swap, r.F_tot, r.direct_rate_hz, (long long)(r.beats_direct ? 1 : 0)});
}

Table figure6_table(const RunConfig& c) {
  const auto models = simulate_rows(c, {c.chain.figure_row});
  const int m = *std::max_element(c.chain.m_values.begin(), c.chain.m_values.end());
  const auto pts = figure6(models.at(0).node, c.chain.figure_n, link_params(c), c.chain.p_swap, c.comparators.dlcz,
                           c.comparators.re, c.output.L_min_km, c.output.L_max_km, c.output.figure_points, m,
                           direct_source(c));
  Table t{{"L_km", "rate_direct", "rate_cat_m200", "rate_re_m200", "rate_cat_m1", "rate_re_m1", "rate_dlcz_m200",
           "rate_dlcz_m1"},
          {}};
  for (const auto& p : pts)
    t.add({p.L_km, p.direct, p.cat_m200, p.re_m200, p.cat_m1, p.re_m1, p.dlcz_m200, p.dlcz_m1});
  return t;
}

// -- commands ----------------------------------------------------------------------

Outputs cmd_gates(const RunConfig& c) {
  Table t{{"label", "operation", "K", "kappa", "duration_s", "duration_Kt", "fidelity"}, {}};
  for (const auto& m : simulate_rows(c))
    for (const auto& g : m.gates)
      t.add({m.node.label, g.operation, g.K, g.kappa, g.duration_s, g.duration_Kt, g.fidelity});
  return {{"gates", t}};
}

Outputs cmd_grape(const RunConfig& c) {
  const GrapeSettings s = grape_settings(c);
  const DrivePulses p = optimize_drive_pulses(s, c.catqubit.alpha);

  Table summary{{"direction", "fidelity", "initial_fidelity", "iterations", "converged", "passes_0.999"}, {}};
  Table trace{{"direction", "iteration", "fidelity"}, {}};
  for (const auto& [name, r] : {std::pair{"drive", &p.drive_result}, std::pair{"undrive", &p.undrive_result}}) {
    summary.add({std::string(name), r->fidelity, r->initial_fidelity, (long long)r->iterations,
                 (long long)(r->converged ? 1 : 0), (long long)(r->fidelity >= 0.999 ? 1 : 0)});
    for (std::size_t i = 0; i < r->trace.size(); ++i) trace.add({std::string(name), (long long)i, r->trace[i]});
  }

  auto pulse_table = [](const PulseSchedule& pulse) {
    Table t{{"t_start_K", "t_end_K", "E_p_over_K", "E_p_perp_over_K"}, {}};
    const double dt = pulse.duration() / pulse.n_segments();
    for (int i = 0; i < pulse.n_segments(); ++i)
      t.add({i * dt, (i + 1) * dt, pulse.segments_ep()[i], pulse.segments_ep_perp()[i]});
    return t;
  };

  // Loss scoring at each configured K/kappa.
  Table loss{{"label", "K_over_kappa", "drive_fidelity", "undrive_fidelity"}, {}};
  const GrapeProblem fwd = drive_problem(s, c.catqubit.alpha, false);
  const GrapeProblem rev = drive_problem(s, c.catqubit.alpha, true);
  for (const auto& row : c.catqubit.rows) {
    const double kappa = 1.0 / row.K_over_kappa;
    loss.add({row.label, row.K_over_kappa, evaluate_pulse(fwd, p.drive, kappa), evaluate_pulse(rev, p.undrive, kappa)});
  }
  return {{"grape_summary", summary},
          {"grape_trace", trace},
          {"grape_drive_pulse", pulse_table(p.drive)},
          {"grape_undrive_pulse", pulse_table(p.undrive)},
          {"grape_loss", loss}};
}

Outputs cmd_device(const RunConfig& c) {
  Table t{{"label", "kappa_c_hz", "gamma_hz", "g_hz", "delta_hz", "K_q_hz", "K_hz", "kappa_hz", "kappa_eff_hz",
           "K_over_kappa", "kappa_eff_over_kappa"},
          {}};
  const auto rows = device_table(device_params(c), c.device.alpha);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const auto& in = c.device.rows[i];
    t.add({in.label, in.kappa_c_hz, in.gamma_hz, in.g_hz, in.omega_q_hz - in.omega_c_hz, in.K_q_hz, r.K / kTwoPi, r.kappa / kTwoPi, r.kappa_eff / kTwoPi, r.K / r.kappa,
           r.kappa_eff / r.kappa});
  }
  return {{"device", t}};
}

Outputs cmd_transduce(const RunConfig& c) {
  const TransducerParams p = transducer_params(c);
  const TransferResult r = spin_transfer(p, c.transducer.check_convergence);
  TransducerParams other = p;
  other.lineshape = p.lineshape == Lineshape::lorentzian ? Lineshape::gaussian : Lineshape::lorentzian;
  const double eta_other = spin_transfer(other, false).eta;

  Table t{{"lineshape", "grid", "n_bins", "eta", "cavity_population", "lost_population", "transfer_time_s",
           "refined_eta", "eta_other_lineshape", "echo_efficiency", "coupling_efficiency", "p_budget"},
          {}};
  t.add({c.transducer.lineshape, c.transducer.grid, (long long)p.n_bins, r.eta, r.cavity_population,
         r.lost_population, r.transfer_time, r.refined_eta, eta_other, p.echo_efficiency, p.coupling_efficiency,
         r.eta * p.echo_efficiency * p.coupling_efficiency});

  Table sweep{{"delta_ns_hz", "eta"}, {}};
  for (double f : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    TransducerParams q = p;
    q.delta_ns = p.delta_ns * f;
    sweep.add({c.transducer.delta_ns_hz * f, spin_transfer(q, false).eta});
  }
  return {{"transduce", t}, {"transduce_sweep", sweep}};
}

Outputs cmd_rates(const RunConfig& c, bool with_figure6) {
  const auto nodes = nodes_of(simulate_rows(c));
  const LinkParams link = link_params(c);
  Table t = report_table();
  for (const auto& node : nodes)
    for (int n : c.chain.n_values)
      for (int m : c.chain.m_values)
        for (StoragePolicy pol : storage_policies(c))
          add_report(t, evaluate_chain(node, ChainParams::uniform(n, m, c.chain.p_swap), link,
                                       link.L0_km * std::ldexp(1.0, n), pol, direct_source(c)));
  Outputs out{{"rates", t}};
  if (with_figure6) out.emplace_back("figure6", figure6_table(c));
  return out;
}

Outputs cmd_crossover(const RunConfig& c) {
  const auto nodes = nodes_of(simulate_rows(c));
  const LinkParams link = link_params(c);
  Table t = report_table();
  for (const auto& node : nodes)
    for (int n : c.chain.n_values) {
      if (n == 0) continue;
      for (int m : c.chain.m_values)
        for (StoragePolicy pol : storage_policies(c)) {
          const ChainParams chain = ChainParams::uniform(n, m, c.chain.p_swap);
          try {
            const double L = chain_crossover(node, chain, link, pol, c.chain.crossover_lo_km, c.chain.crossover_hi_km,
                                             direct_source(c));
            add_report(t, evaluate_chain(node, chain, link, L, pol, direct_source(c)));
          } catch (const NoCrossover&) {
            std::cerr << "no crossover: row " << node.label << " n=" << n << " m=" << m << " " << to_string(pol)
                      << "\n";
          }
        }
    }
  return {{"crossover", t}};
}

Outputs cmd_mc(const RunConfig& c) {
  LinkParams link = link_params(c);
  Table t{{"n", "P0", "p_swap", "analytic_mean_s", "mc_mean_s", "standard_error_s", "analytic_over_mc", "trials",
           "seed"},
          {}};
  for (int n : c.chain.n_values) {
    const ChainParams chain = ChainParams::uniform(n, 1, c.chain.p_swap);
    const double analytic = mean_time(chain, link);
    const MonteCarloResult r = monte_carlo_time(chain, link, c.chain.mc_trials, c.chain.mc_seed);
    t.add({(long long)n, p0(link), c.chain.p_swap, analytic, r.mean_s, r.standard_error_s, analytic / r.mean_s,
           r.trials, (long long)c.chain.mc_seed});
  }
  return {{"mc", t}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cat-qubit repeater toolkit"};
  app.set_version_flag("--version", std::string(toolkit_version()));
  app.require_subcommand(1);

  Overrides o;
  std::string format, out;
  std::uint64_t seed = 0;
  long long trials = 0;
  int iters = 0;
  auto* opt_config = app.add_option("--config", o.config_path, std::string("JSON config file (default: $") +
                                                                   kConfigEnv + ")");
  auto* opt_out = app.add_option("--out", out, "Output root directory");
  auto* opt_format = app.add_option("--format", format, "Report format");
  auto* opt_seed = app.add_option("--seed", seed, "Seed for GRAPE restarts and Monte Carlo");
  auto* opt_trials = app.add_option("--trials", trials, "Monte-Carlo trials");
  auto* opt_iters = app.add_option("--iters", iters, "GRAPE iteration cap");
  (void)opt_config;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gates", "Gate fidelities and durations per hardware row"},
      {"grape", "Optimize the drive and undrive pulses"},
      {"device", "Inherited Kerr, inverse-Purcell decay and cat decoherence"},
      {"transduce", "Microwave to spin transfer efficiency"},
      {"rates", "Rates and fidelities at fixed chain length"},
      {"crossover", "Crossover distances against direct transmission"},
      {"mc", "Monte-Carlo waiting times against the analytic formula"},
      {"figure6", "Rate-versus-distance curves"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    subs[name] = sub;
  }
  subs["rates"]->add_flag("--figure6", o.figure6, "Also emit the rate-versus-distance curves");

  CLI11_PARSE(app, argc, argv);
  if (*opt_out) o.out = out;
  if (*opt_format) o.format = format;
  if (*opt_seed) o.seed = seed;
  if (*opt_trials) o.trials = trials;
  if (*opt_iters) o.iters = iters;

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const RunConfig c = resolve_config(o);
    Outputs outputs;
    if (command == "gates") outputs = cmd_gates(c);
    else if (command == "grape") outputs = cmd_grape(c);
    else if (command == "device") outputs = cmd_device(c);
    else if (command == "transduce") outputs = cmd_transduce(c);
    else if (command == "rates") outputs = cmd_rates(c, o.figure6);
    else if (command == "crossover") outputs = cmd_crossover(c);
    else if (command == "mc") outputs = cmd_mc(c);
    else if (command == "figure6") outputs = {{"figure6", figure6_table(c)}};
    write_outputs(command, outputs, c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}
