#include "catrep/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

namespace catrep {

using json = nlohmann::json;

const char* toolkit_version() { return "1.0.0"; }

RunConfig default_config() {
  RunConfig c;
  c.catqubit.rows = {
      {"1e3", 25.86e3, 1e3, 10.0, 15.0},
      {"1e4", 560e3, 1e4, 20.0, 25.0},
      {"1e5", 560e3, 1e5, 45.0, 55.0},
  };
  // Cavity at 8 GHz, transmon 2 GHz above with 300 MHz anharmonicity;
  // g gives K near 560 kHz, gamma sets the ratio.
  c.device.rows = {
      {"1e3", 8e9, 10e9, 300e6, 409e6, 0.32, 13348.0},
      {"1e4", 8e9, 10e9, 300e6, 409e6, 0.32, 1328.0},
      {"1e5", 8e9, 10e9, 300e6, 409e6, 0.32, 126.2},
  };
  return c;
}

namespace {

std::string type_name(const json& j) { return j.type_name(); }

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object, got " + type_name(j_));
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!j_.contains(key)) return;
    used_.insert(key);
    out = convert<T>(j_.at(key), key_path(key));
  }

  template <class T>
  void require(const std::string& key, T& out) {
    if (!j_.contains(key)) throw ConfigError(key_path(key), "missing required key");
    get(key, out);
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!used_.count(item.key())) throw ConfigError(key_path(item.key()), "unknown key");
  }

  template <class T>
  static T convert(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path, "expected a boolean, got " + type_name(v));
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(path, "expected a string, got " + type_name(v));
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!v.is_number_unsigned()) throw ConfigError(path, "expected a non-negative integer");
      return v.get<std::uint64_t>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(path, "expected an integer, got " + type_name(v));
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(path, "expected a number, got " + type_name(v));
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
      return x;
    } else {
      // std::vector<U>
      if (!v.is_array()) throw ConfigError(path, "expected an array, got " + type_name(v));
      T out;
      for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(convert<typename T::value_type>(v[i], path + "[" + std::to_string(i) + "]"));
      return out;
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void read_device(const json& j, DeviceConfig& d) {
  Reader r(j, "device");
  r.get("alpha", d.alpha);
  if (r.has("rows")) {
    const json& rows = r.raw("rows");
    if (!rows.is_array()) throw ConfigError("device.rows", "expected an array");
    d.rows.clear();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Reader rr(rows[i], "device.rows[" + std::to_string(i) + "]");
      DeviceRowConfig row;
      row.label = "row" + std::to_string(i);
      rr.get("label", row.label);
      rr.require("omega_c_hz", row.omega_c_hz);
      rr.require("omega_q_hz", row.omega_q_hz);
      rr.require("K_q_hz", row.K_q_hz);
      rr.require("g_hz", row.g_hz);
      rr.require("kappa_c_hz", row.kappa_c_hz);
      rr.require("gamma_hz", row.gamma_hz);
      rr.finish();
      d.rows.push_back(row);
    }
  }
  r.finish();
}

void read_catqubit(const json& j, CatQubitConfig& c) {
  Reader r(j, "catqubit");
  r.get("alpha", c.alpha);
  r.get("dim", c.dim);
  r.get("two_mode_dim", c.two_mode_dim);
  r.get("two_mode_rel_tol", c.two_mode_rel_tol);
  if (r.has("rows")) {
    const json& rows = r.raw("rows");
    if (!rows.is_array()) throw ConfigError("catqubit.rows", "expected an array");
    c.rows.clear();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Reader rr(rows[i], "catqubit.rows[" + std::to_string(i) + "]");
      CatRowConfig row;
      row.label = "row" + std::to_string(i);
      rr.get("label", row.label);
      rr.require("K_hz", row.K_hz);
      rr.require("K_over_kappa", row.K_over_kappa);
      rr.get("ex_ratio", row.ex_ratio);
      rr.get("ec_ratio", row.ec_ratio);
      rr.finish();
      c.rows.push_back(row);
    }
  }
  r.finish();
}

void read_grape(const json& j, GrapeConfig& g) {
  Reader r(j, "grape");
  r.get("total_time_K", g.total_time_K);
  r.get("n_segments", g.n_segments);
  r.get("bound_ratio", g.bound_ratio);
  r.get("dim", g.dim);
  r.get("max_iters", g.max_iters);
  r.get("convergence_tol", g.convergence_tol);
  r.get("window", g.window);
  r.get("lbfgs_memory", g.lbfgs_memory);
  r.get("restarts", g.restarts);
  r.get("restart_noise", g.restart_noise);
  r.get("seed", g.seed);
  r.finish();
}

void read_transducer(const json& j, TransducerConfig& t) {
  Reader r(j, "transducer");
  r.get("g_ens_hz", t.g_ens_hz);
  r.get("delta_ns_hz", t.delta_ns_hz);
  r.get("gamma1_hz", t.gamma1_hz);
  r.get("gamma2_hz", t.gamma2_hz);
  r.get("kappa_mw_hz", t.kappa_mw_hz);
  r.get("n_bins", t.n_bins);
  r.get("echo_efficiency", t.echo_efficiency);
  r.get("coupling_efficiency", t.coupling_efficiency);
  r.get("lineshape", t.lineshape);
  r.get("grid", t.grid);
  r.get("check_convergence", t.check_convergence);
  r.finish();
}

void read_link(const json& j, LinkConfig& l) {
  Reader r(j, "link");
  r.get("L0_km", l.L0_km);
  r.get("L_att_km", l.L_att_km);
  r.get("p", l.p);
  r.get("eta_o", l.eta_o);
  r.get("T_o_s", l.T_o_s);
  r.get("c_fiber_km_s", l.c_fiber_km_s);
  r.get("p0_two_round", l.p0_two_round);
  r.get("transduction_time_s", l.transduction_time_s);
  r.get("transduction_fidelity", l.transduction_fidelity);
  r.finish();
}

void read_chain(const json& j, ChainConfig& c) {
  Reader r(j, "chain");
  r.get("n_values", c.n_values);
  r.get("m_values", c.m_values);
  r.get("p_swap", c.p_swap);
  r.get("policies", c.policies);
  r.get("transfer_lifetime_s", c.transfer_lifetime_s);
  r.get("figure_row", c.figure_row);
  r.get("figure_n", c.figure_n);
  r.get("crossover_lo_km", c.crossover_lo_km);
  r.get("crossover_hi_km", c.crossover_hi_km);
  r.get("mc_trials", c.mc_trials);
  r.get("mc_seed", c.mc_seed);
  r.finish();
}

void read_comparators(const json& j, ComparatorConfig& c) {
  Reader r(j, "comparators");
  r.get("direct_source_hz", c.direct_source_hz);
  r.get("direct_detector_weighting", c.direct_detector_weighting);
  if (r.has("dlcz")) {
    Reader d(r.raw("dlcz"), "comparators.dlcz");
    d.get("p_gen", c.dlcz.p_gen);
    d.get("eta_mem", c.dlcz.eta_mem);
    d.get("eta_d", c.dlcz.eta_d);
    d.get("fidelity_ceiling", c.dlcz.fidelity_ceiling);
    d.finish();
  }
  if (r.has("re")) {
    Reader d(r.raw("re"), "comparators.re");
    d.get("p", c.re.p);
    d.get("eta_o", c.re.eta_o);
    d.get("T_o_s", c.re.T_o_s);
    d.get("p_swap", c.re.p_swap);
    d.get("fidelity_ceiling", c.re.fidelity_ceiling);
    d.finish();
  }
  r.finish();
}

void read_output(const json& j, OutputConfig& o) {
  Reader r(j, "output");
  r.get("dir", o.dir);
  r.get("format", o.format);
  r.get("L_min_km", o.L_min_km);
  r.get("L_max_km", o.L_max_km);
  r.get("figure_points", o.figure_points);
  r.finish();
}

void check(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

bool unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  RunConfig c = default_config();
  Reader r(j, "");
  if (r.has("device")) read_device(r.raw("device"), c.device);
  if (r.has("catqubit")) read_catqubit(r.raw("catqubit"), c.catqubit);
  if (r.has("grape")) read_grape(r.raw("grape"), c.grape);
  if (r.has("transducer")) read_transducer(r.raw("transducer"), c.transducer);
  if (r.has("link")) read_link(r.raw("link"), c.link);
  if (r.has("chain")) read_chain(r.raw("chain"), c.chain);
  if (r.has("comparators")) read_comparators(r.raw("comparators"), c.comparators);
  if (r.has("output")) read_output(r.raw("output"), c.output);
  r.finish();
  validate(c);
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& c) {
  check(c.device.alpha > 0.0, "device.alpha", "must be positive");
  for (std::size_t i = 0; i < c.device.rows.size(); ++i) {
    const std::string path = "device.rows[" + std::to_string(i) + "]";
    try {
      device_params(c).at(i).validate();
    } catch (const std::exception& e) {
      throw ConfigError(path, e.what());
    }
  }

  check(!c.catqubit.rows.empty(), "catqubit.rows", "need at least one row");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < c.catqubit.rows.size(); ++i) {
    const auto& row = c.catqubit.rows[i];
    const std::string path = "catqubit.rows[" + std::to_string(i) + "]";
    check(row.K_hz > 0.0, path + ".K_hz", "must be positive");
    check(row.K_over_kappa > 0.0, path + ".K_over_kappa", "must be positive");
    check(row.ex_ratio > 0.0, path + ".ex_ratio", "must be positive");
    check(row.ec_ratio > 0.0, path + ".ec_ratio", "must be positive");
    check(labels.insert(row.label).second, path + ".label", "duplicate label '" + row.label + "'");
  }
  check(c.catqubit.alpha > 0.0, "catqubit.alpha", "must be positive");
  check(c.catqubit.dim >= 8, "catqubit.dim", "must be at least 8");
  check(c.catqubit.two_mode_dim >= 6, "catqubit.two_mode_dim", "must be at least 6");
  check(c.catqubit.two_mode_rel_tol > 0.0 && c.catqubit.two_mode_rel_tol < 1e-2, "catqubit.two_mode_rel_tol",
        "must lie in (0, 1e-2)");

  const auto& g = c.grape;
  check(g.total_time_K > 0.0, "grape.total_time_K", "must be positive");
  check(g.n_segments >= 4, "grape.n_segments", "must be at least 4");
  check(g.bound_ratio > 0.0, "grape.bound_ratio", "must be positive");
  check(g.dim >= 8, "grape.dim", "must be at least 8");
  check(g.max_iters >= 0, "grape.max_iters", "must be non-negative");
  check(g.convergence_tol >= 0.0, "grape.convergence_tol", "must be non-negative");
  check(g.window >= 1, "grape.window", "must be at least 1");
  check(g.lbfgs_memory >= 1, "grape.lbfgs_memory", "must be at least 1");
  check(g.restarts >= 0, "grape.restarts", "must be non-negative");
  check(g.restart_noise >= 0.0, "grape.restart_noise", "must be non-negative");

  const auto& t = c.transducer;
  check(t.lineshape == "lorentzian" || t.lineshape == "gaussian", "transducer.lineshape",
        "must be 'lorentzian' or 'gaussian'");
  check(t.grid == "quantile" || t.grid == "uniform", "transducer.grid", "must be 'quantile' or 'uniform'");
  try {
    transducer_params(c).validate();
  } catch (const std::exception& e) {
    throw ConfigError("transducer", e.what());
  }

  const auto& l = c.link;
  check(l.L0_km > 0.0, "link.L0_km", "must be positive");
  check(l.L_att_km > 0.0, "link.L_att_km", "must be positive");
  check(unit(l.p), "link.p", "must lie in [0, 1]");
  check(unit(l.eta_o), "link.eta_o", "must lie in [0, 1]");
  check(l.T_o_s >= 0.0, "link.T_o_s", "must be non-negative");
  check(l.c_fiber_km_s > 0.0, "link.c_fiber_km_s", "must be positive");
  check(l.transduction_time_s >= 0.0, "link.transduction_time_s", "must be non-negative");
  check(unit(l.transduction_fidelity), "link.transduction_fidelity", "must lie in [0, 1]");

  const auto& ch = c.chain;
  check(!ch.n_values.empty(), "chain.n_values", "must not be empty");
  for (int n : ch.n_values) check(n >= 0 && n <= 10, "chain.n_values", "entries must lie in [0, 10]");
  check(!ch.m_values.empty(), "chain.m_values", "must not be empty");
  for (int m : ch.m_values) check(m >= 1, "chain.m_values", "entries must be at least 1");
  check(ch.p_swap > 0.0 && ch.p_swap <= 1.0, "chain.p_swap", "must lie in (0, 1]");
  check(!ch.policies.empty(), "chain.policies", "must not be empty");
  for (const auto& p : ch.policies) check(p == "cat" || p == "fock" || p == "transfer", "chain.policies",
                                          "unknown policy '" + p + "'");
  check(ch.transfer_lifetime_s > 0.0, "chain.transfer_lifetime_s", "must be positive");
  check(labels.count(ch.figure_row) == 1, "chain.figure_row", "no catqubit row labelled '" + ch.figure_row + "'");
  check(ch.figure_n >= 0 && ch.figure_n <= 10, "chain.figure_n", "must lie in [0, 10]");
  check(ch.crossover_lo_km > 0.0 && ch.crossover_hi_km > ch.crossover_lo_km, "chain.crossover_lo_km",
        "need 0 < crossover_lo_km < crossover_hi_km");
  check(ch.mc_trials >= 10000, "chain.mc_trials", "must be at least 10000");

  const auto& cmp = c.comparators;
  check(cmp.direct_source_hz > 0.0, "comparators.direct_source_hz", "must be positive");
  check(unit(cmp.dlcz.p_gen), "comparators.dlcz.p_gen", "must lie in [0, 1]");
  check(unit(cmp.dlcz.eta_mem), "comparators.dlcz.eta_mem", "must lie in [0, 1]");
  check(unit(cmp.dlcz.eta_d), "comparators.dlcz.eta_d", "must lie in [0, 1]");
  check(unit(cmp.dlcz.fidelity_ceiling), "comparators.dlcz.fidelity_ceiling", "must lie in [0, 1]");
  check(unit(cmp.re.p), "comparators.re.p", "must lie in [0, 1]");
  check(unit(cmp.re.eta_o), "comparators.re.eta_o", "must lie in [0, 1]");
  check(cmp.re.T_o_s >= 0.0, "comparators.re.T_o_s", "must be non-negative");
  check(cmp.re.p_swap > 0.0 && cmp.re.p_swap <= 1.0, "comparators.re.p_swap", "must lie in (0, 1]");
  check(unit(cmp.re.fidelity_ceiling), "comparators.re.fidelity_ceiling", "must lie in [0, 1]");

  const auto& o = c.output;
  check(!o.dir.empty(), "output.dir", "must not be empty");
  check(o.format == "csv" || o.format == "json", "output.format", "must be 'csv' or 'json'");
  check(o.L_min_km > 0.0 && o.L_max_km > o.L_min_km, "output.L_min_km", "need 0 < L_min_km < L_max_km");
  check(o.figure_points >= 2, "output.figure_points", "must be at least 2");
}

std::string dump_config(const RunConfig& c) {
  json j;
  json rows = json::array();
  for (const auto& r : c.device.rows)
    rows.push_back({{"label", r.label},
                    {"omega_c_hz", r.omega_c_hz},
                    {"omega_q_hz", r.omega_q_hz},
                    {"K_q_hz", r.K_q_hz},
                    {"g_hz", r.g_hz},
                    {"kappa_c_hz", r.kappa_c_hz},
                    {"gamma_hz", r.gamma_hz}});
  j["device"] = {{"alpha", c.device.alpha}, {"rows", rows}};

  rows = json::array();
  for (const auto& r : c.catqubit.rows)
    rows.push_back({{"label", r.label},
                    {"K_hz", r.K_hz},
                    {"K_over_kappa", r.K_over_kappa},
                    {"ex_ratio", r.ex_ratio},
                    {"ec_ratio", r.ec_ratio}});
  j["catqubit"] = {{"alpha", c.catqubit.alpha},
                   {"dim", c.catqubit.dim},
                   {"two_mode_dim", c.catqubit.two_mode_dim},
                   {"two_mode_rel_tol", c.catqubit.two_mode_rel_tol},
                   {"rows", rows}};

  const auto& g = c.grape;
  j["grape"] = {{"total_time_K", g.total_time_K}, {"n_segments", g.n_segments}, {"bound_ratio", g.bound_ratio},
                {"dim", g.dim},           {"max_iters", g.max_iters},   {"convergence_tol", g.convergence_tol},
                {"window", g.window},     {"lbfgs_memory", g.lbfgs_memory}, {"restarts", g.restarts},
                {"restart_noise", g.restart_noise}, {"seed", g.seed}};

  const auto& t = c.transducer;
  j["transducer"] = {{"g_ens_hz", t.g_ens_hz},
                     {"delta_ns_hz", t.delta_ns_hz},
                     {"gamma1_hz", t.gamma1_hz},
                     {"gamma2_hz", t.gamma2_hz},
                     {"kappa_mw_hz", t.kappa_mw_hz},
                     {"n_bins", t.n_bins},
                     {"echo_efficiency", t.echo_efficiency},
                     {"coupling_efficiency", t.coupling_efficiency},
                     {"lineshape", t.lineshape},
                     {"grid", t.grid},
                     {"check_convergence", t.check_convergence}};

  const auto& l = c.link;
  j["link"] = {{"L0_km", l.L0_km},
               {"L_att_km", l.L_att_km},
               {"p", l.p},
               {"eta_o", l.eta_o},
               {"T_o_s", l.T_o_s},
               {"c_fiber_km_s", l.c_fiber_km_s},
               {"p0_two_round", l.p0_two_round},
               {"transduction_time_s", l.transduction_time_s},
               {"transduction_fidelity", l.transduction_fidelity}};

  const auto& ch = c.chain;
  j["chain"] = {{"n_values", ch.n_values},
                {"m_values", ch.m_values},
                {"p_swap", ch.p_swap},
                {"policies", ch.policies},
                {"transfer_lifetime_s", ch.transfer_lifetime_s},
                {"figure_row", ch.figure_row},
                {"figure_n", ch.figure_n},
                {"crossover_lo_km", ch.crossover_lo_km},
                {"crossover_hi_km", ch.crossover_hi_km},
                {"mc_trials", ch.mc_trials},
                {"mc_seed", ch.mc_seed}};

  const auto& cmp = c.comparators;
  j["comparators"] = {{"direct_source_hz", cmp.direct_source_hz},
                      {"direct_detector_weighting", cmp.direct_detector_weighting},
                      {"dlcz",
                       {{"p_gen", cmp.dlcz.p_gen},
                        {"eta_mem", cmp.dlcz.eta_mem},
                        {"eta_d", cmp.dlcz.eta_d},
                        {"fidelity_ceiling", cmp.dlcz.fidelity_ceiling}}},
                      {"re",
                       {{"p", cmp.re.p},
                        {"eta_o", cmp.re.eta_o},
                        {"T_o_s", cmp.re.T_o_s},
                        {"p_swap", cmp.re.p_swap},
                        {"fidelity_ceiling", cmp.re.fidelity_ceiling}}}};

  const auto& o = c.output;
  j["output"] = {{"dir", o.dir},
                 {"format", o.format},
                 {"L_min_km", o.L_min_km},
                 {"L_max_km", o.L_max_km},
                 {"figure_points", o.figure_points}};
  return j.dump(2) + "\n";
}

// -- conversions ------------------------------------------------------------------

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::vector<DeviceParams> device_params(const RunConfig& c) {
  std::vector<DeviceParams> out;
  for (const auto& r : c.device.rows) {
    DeviceParams p;
    p.omega_c = kTwoPi * r.omega_c_hz;
    p.omega_q = kTwoPi * r.omega_q_hz;
    p.K_q = kTwoPi * r.K_q_hz;
    p.g = kTwoPi * r.g_hz;
    p.kappa_c = kTwoPi * r.kappa_c_hz;
    p.gamma = kTwoPi * r.gamma_hz;
    out.push_back(p);
  }
  return out;
}

std::vector<HardwareRow> hardware_rows(const RunConfig& c) {
  std::vector<HardwareRow> out;
  for (const auto& r : c.catqubit.rows) {
    HardwareRow h;
    h.label = r.label;
    h.K = kTwoPi * r.K_hz;
    h.kappa = h.K / r.K_over_kappa;
    h.ratios = {r.ex_ratio, r.ec_ratio};
    out.push_back(h);
  }
  return out;
}

GrapeSettings grape_settings(const RunConfig& c) {
  GrapeSettings s;
  s.total_time_K = c.grape.total_time_K;
  s.n_segments = c.grape.n_segments;
  s.bound_ratio = c.grape.bound_ratio;
  s.dim = c.grape.dim;
  s.options.max_iters = c.grape.max_iters;
  s.options.convergence_tol = c.grape.convergence_tol;
  s.options.window = c.grape.window;
  s.options.lbfgs_memory = c.grape.lbfgs_memory;
  s.options.restarts = c.grape.restarts;
  s.options.restart_noise = c.grape.restart_noise;
  s.options.seed = c.grape.seed;
  return s;
}

PipelineOptions pipeline_options(const RunConfig& c) {
  PipelineOptions o;
  o.alpha = c.catqubit.alpha;
  o.dim = c.catqubit.dim;
  o.two_mode.dim = c.catqubit.two_mode_dim;
  o.two_mode.rel_tol = c.catqubit.two_mode_rel_tol;
  o.transduction_fidelity = c.link.transduction_fidelity;
  o.transduction_time_s = c.link.transduction_time_s;
  o.transfer_lifetime_s = c.chain.transfer_lifetime_s;
  return o;
}

TransducerParams transducer_params(const RunConfig& c) {
  const auto& t = c.transducer;
  TransducerParams p;
  p.g_ens = kTwoPi * t.g_ens_hz;
  p.delta_ns = kTwoPi * t.delta_ns_hz;
  p.gamma1 = kTwoPi * t.gamma1_hz;
  p.gamma2 = kTwoPi * t.gamma2_hz;
  p.kappa_mw = kTwoPi * t.kappa_mw_hz;
  p.n_bins = t.n_bins;
  p.echo_efficiency = t.echo_efficiency;
  p.coupling_efficiency = t.coupling_efficiency;
  p.lineshape = t.lineshape == "gaussian" ? Lineshape::gaussian : Lineshape::lorentzian;
  p.grid = t.grid == "uniform" ? BinGrid::uniform : BinGrid::quantile;
  return p;
}

LinkParams link_params(const RunConfig& c) {
  LinkParams l;
  l.L0_km = c.link.L0_km;
  l.L_att_km = c.link.L_att_km;
  l.p = c.link.p;
  l.eta_o = c.link.eta_o;
  l.T_o_s = c.link.T_o_s;
  l.c_fiber_km_s = c.link.c_fiber_km_s;
  l.p0_two_round = c.link.p0_two_round;
  return l;
}

std::vector<StoragePolicy> storage_policies(const RunConfig& c) {
  std::vector<StoragePolicy> out;
  for (const auto& p : c.chain.policies) out.push_back(storage_policy_from_string(p));
  return out;
}

}  // namespace catrep
