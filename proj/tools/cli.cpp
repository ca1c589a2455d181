#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

#include "ringrep/analytics.hpp"
#include "ringrep/mc.hpp"
#include "ringrep/optimizer.hpp"
#include "ringrep/rates.hpp"
#include "ringrep/ring_code.hpp"

namespace ringrep::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr int kConfigVersion = 1;
constexpr std::uint64_t kDefaultSeed = 20240617;
constexpr const char* kOutDirEnv = "RINGREP_OUT_DIR";

using Cell = std::variant<long long, double>;
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string csv(const Table& t) {
  std::string s;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      s += std::holds_alternative<long long>(row[i]) ? std::to_string(std::get<long long>(row[i]))
                                                     : fmt_double(std::get<double>(row[i]));
    }
    s += '\n';
  }
  return s;
}

json cell_json(const Cell& c) {
  if (std::holds_alternative<long long>(c)) return std::get<long long>(c);
  const double v = std::get<double>(c);
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json table_json(const std::string& command, const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(r));
  }
  return {{"command", command}, {"columns", t.columns}, {"rows", rows}};
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

// "a:b:n" gives n evenly spaced points from a to b; otherwise a comma separated list.
std::vector<double> parse_grid(const std::string& s) {
  if (s.empty()) return {};
  if (s.find(':') != std::string::npos) {
    const auto p = split(s, ':');
    if (p.size() != 3) throw UsageError("grid must be 'start:stop:count' or a comma list: '" + s + "'");
    const double a = parse_number(p[0]), b = parse_number(p[1]);
    const double n = parse_number(p[2]);
    if (n < 1 || n != std::floor(n) || n > 1e7) throw UsageError("grid count must be a positive integer: '" + s + "'");
    std::vector<double> g;
    const auto count = static_cast<long long>(n);
    for (long long i = 0; i < count; ++i)
      g.push_back(count == 1 ? a : (i == count - 1 ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1)));
    return g;
  }
  std::vector<double> g;
  for (const auto& t : split(s, ',')) g.push_back(parse_number(t));
  return g;
}

// "1-5" or "1,3,4".
std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& t : split(s, ',')) {
    const auto dash = t.find('-', 1);
    auto as_int = [&](const std::string& x) {
      const double v = parse_number(x);
      if (v != std::floor(v) || std::abs(v) > 1e6) throw UsageError("not an integer: '" + x + "'");
      return static_cast<int>(v);
    };
    if (dash == std::string::npos) {
      out.push_back(as_int(t));
    } else {
      const int a = as_int(t.substr(0, dash)), b = as_int(t.substr(dash + 1));
      if (b < a) throw UsageError("empty range: '" + t + "'");
      for (int i = a; i <= b; ++i) out.push_back(i);
    }
  }
  if (out.empty()) throw UsageError("empty integer list");
  return out;
}

std::string config_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) s += (s.empty() ? "" : ",") + config_value(e);
    return s;
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return fmt_double(v.get<double>());
  throw UsageError("unsupported config value: " + v.dump());
}

// Values from a versioned JSON file fill options not given on the command line.
void apply_config(CLI::App* sub, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  if (!j.contains("version") || j["version"] != kConfigVersion)
    throw UsageError("config file needs \"version\": " + std::to_string(kConfigVersion));
  for (const auto& [key, v] : j.items()) {
    if (key == "version") continue;
    if (key == "command") {
      if (v != sub->get_name()) throw UsageError("config file is for command " + v.dump());
      continue;
    }
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    if (name == "config") throw UsageError("config files cannot nest");
    CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option("--" + name);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError("unknown config key: " + key);
    }
    if (opt->count() > 0) continue;
    opt->add_result(config_value(v));
    opt->run_callback();
  }
}

void emit(const std::string& command, const std::string& ext, const std::string& content, const std::string& out_opt,
          std::ostream& out) {
  const char* dir = std::getenv(kOutDirEnv);
  std::filesystem::path path;
  if (!out_opt.empty()) {
    path = out_opt;
    if (path.is_relative() && dir != nullptr && *dir != '\0') path = std::filesystem::path(dir) / path;
  } else if (dir != nullptr && *dir != '\0') {
    path = std::filesystem::path(dir) / (command + "." + ext);
  } else {
    out << content;
    return;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

void emit_table(const std::string& command, const Table& t, const std::string& format, const std::string& out_opt,
                std::ostream& out) {
  if (format == "json")
    emit(command, "json", table_json(command, t).dump(2) + "\n", out_opt, out);
  else
    emit(command, "csv", csv(t), out_opt, out);
}

void check_unit(double v, const char* what) {
  if (!(v >= 0 && v <= 1)) throw UsageError(std::string(what) + " must lie in [0, 1]");
}

struct Common {
  std::string config;
  std::string format = "csv";
  std::string out;
};

void add_common(CLI::App* sub, Common& c, bool with_format) {
  sub->add_option("--config", c.config, "Versioned JSON file with option values");
  if (with_format) sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", c.out, "Output file (relative paths resolve against $RINGREP_OUT_DIR)");
}

json sigma_entry(double empirical, double reference, std::uint64_t n, std::uint64_t hits) {
  const double sigma = n > 0 ? std::sqrt(reference * (1 - reference) / static_cast<double>(n)) : 0.0;
  const double diff = empirical - reference;
  json s = {{"empirical", empirical}, {"reference", reference}, {"samples", n}, {"count", hits}};
  if (sigma > 0)
    s["sigma_distance"] = diff / sigma;
  else
    s["sigma_distance"] = diff == 0 ? json(0.0) : json(nullptr);
  return s;
}

json simulate_report(const EmpiricalStats& s) {
  const auto& c = s.config;
  const std::uint64_t n = s.total(), ok = s.succeeded();
  auto frac = [](std::uint64_t a, std::uint64_t b) { return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
  json cmp = json::object();
  json ref = json::object();
  if (s.mode == McMode::Pauli) {
    const auto p = pauli_meas_stats(c.eta, c.lambda, c.spec.depth);
    ref["pauli_meas_stats"] = p;
    cmp["transmission"] = sigma_entry(frac(ok, n), p.eta_bar, n, ok);
    cmp["eps"] = sigma_entry(frac(s.count(McOutcome::Error), ok), p.eps, ok, s.count(McOutcome::Error));
    cmp["eps_d"] = sigma_entry(frac(s.count(McOutcome::Detected), ok), p.eps_d, ok, s.count(McOutcome::Detected));
  } else {
    const auto rec = concat_fusion_distribution(c.eta, c.spec.depth);
    ref["recursion"] = rec;
    cmp["p_s"] = sigma_entry(frac(ok, n), rec.p_s, n, ok);
    if (c.spec.switch_layer == c.spec.depth) {
      const auto a = adaptive_fusion_stats(c.eta, c.lambda, c.spec.depth);
      ref["strategy"] = {{"classes", a.classes}, {"error", a.error}, {"detected", a.detected}};
      cmp["p_s_strategy"] = sigma_entry(frac(ok, n), a.classes.p_s, n, ok);
      cmp["p_fail_x"] = sigma_entry(s.rate(McOutcome::FailX), a.classes.p_x, n, s.count(McOutcome::FailX));
      cmp["p_fail_z"] = sigma_entry(s.rate(McOutcome::FailZ), a.classes.p_z, n, s.count(McOutcome::FailZ));
      cmp["p_loss"] = sigma_entry(s.rate(McOutcome::Loss), a.classes.p_l, n, s.count(McOutcome::Loss));
      cmp["error"] = sigma_entry(frac(s.count(McOutcome::Error), ok), a.error, ok, s.count(McOutcome::Error));
      cmp["detected"] = sigma_entry(frac(s.count(McOutcome::Detected), ok), a.detected, ok, s.count(McOutcome::Detected));
    } else {
      const auto f = ft_fusion_stats(c.eta, c.lambda, c.spec.depth, c.spec.switch_layer);
      ref["ft_fusion_stats"] = f;
      cmp["p_s_ft"] = sigma_entry(frac(ok, n), f.p_s, n, ok);
    }
  }
  return {{"command", "simulate"}, {"stats", s}, {"reference", ref}, {"comparison", cmp}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Concatenated ring code repeater toolkit", "ringrep"};
  app.require_subcommand(1);

  // fusion-success
  Common fs_c;
  int fs_n = 4;
  std::string fs_depth = "1-5";
  double fs_min = 0, fs_max = 1;
  int fs_steps = 101;
  auto* fs = app.add_subcommand("fusion-success", "Logical fusion success versus transmission");
  fs->add_option("--n", fs_n, "Unit ring size");
  fs->add_option("--depth", fs_depth, "Depths, e.g. 1-5 or 1,3");
  fs->add_option("--eta-min", fs_min, "Smallest transmission");
  fs->add_option("--eta-max", fs_max, "Largest transmission");
  fs->add_option("--eta-steps", fs_steps, "Number of transmission points");
  add_common(fs, fs_c, true);

  // pauli-stats
  Common ps_c;
  std::string ps_eta = "0:1:11", ps_lambda = "0", ps_depth = "1";
  auto* ps = app.add_subcommand("pauli-stats", "Logical Pauli measurement transmission, error and detection");
  ps->add_option("--eta-grid", ps_eta, "Transmissions ('start:stop:count' or list)");
  ps->add_option("--lambda-grid", ps_lambda, "Depolarizing rates ('start:stop:count' or list)");
  ps->add_option("--depth", ps_depth, "Depths, e.g. 1-3");
  add_common(ps, ps_c, true);

  // ft-fusion
  Common ft_c;
  std::string ft_eta = "0.9:1:11", ft_lambda = "0:0.01:11", ft_depth = "8";
  int ft_switch = 3;
  auto* ft = app.add_subcommand("ft-fusion", "Fault-tolerant logical fusion statistics");
  ft->add_option("--eta-grid", ft_eta, "Transmissions");
  ft->add_option("--lambda-grid", ft_lambda, "Depolarizing rates");
  ft->add_option("--depth", ft_depth, "Depths");
  ft->add_option("--switch-layer", ft_switch, "Last loss-protection layer");
  add_common(ft, ft_c, true);

  // simulate
  Common sim_c;
  std::uint64_t sim_trials = 100000, sim_seed = kDefaultSeed;
  int sim_depth = 1, sim_switch = 0;
  double sim_eta = 1, sim_lambda = 0;
  std::string sim_mode = "fusion", sim_logical = "X";
  unsigned sim_threads = 0;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo run with analytic reference");
  sim->add_option("--trials", sim_trials, "Number of trials");
  sim->add_option("--seed", sim_seed, "Seed");
  sim->add_option("--depth", sim_depth, "Ring depth");
  sim->add_option("--switch-layer", sim_switch, "Last loss-protection layer (0 = depth)");
  sim->add_option("--eta", sim_eta, "Per-photon transmission");
  sim->add_option("--lambda", sim_lambda, "Depolarizing rate");
  sim->add_option("--mode", sim_mode, "fusion or pauli")->check(CLI::IsMember({"fusion", "pauli"}));
  sim->add_option("--logical", sim_logical, "Measured logical Pauli (pauli mode)")->check(CLI::IsMember({"X", "Y", "Z"}));
  sim->add_option("--threads", sim_threads, "Worker cap (0 = all cores)");
  add_common(sim, sim_c, false);

  // optimize
  Common op_c;
  std::string op_L, op_lambda = "0.0015";
  TimingParams op_t;
  SearchBounds op_b;
  unsigned op_threads = 0;
  auto* op = app.add_subcommand("optimize", "Cost-optimal repeater configurations over distance and noise");
  op->alias("rates");
  op->add_option("--L-grid", op_L, "Distances in km ('start:stop:count' or list)");
  op->add_option("--lambda-list", op_lambda, "Depolarizing rates");
  op->add_option("--tau-gen", op_t.tau_gen, "Photon generation time (ns)");
  op->add_option("--tau-cz", op_t.tau_CZ, "CZ gate time (ns)");
  op->add_option("--tau-m", op_t.tau_M, "Spin measurement time (ns)");
  op->add_option("--eta-d", op_b.eta_d, "Detection and coupling efficiency");
  op->add_option("--l-att", op_b.L_att_km, "Attenuation length (km)");
  op->add_option("--n-max", op_b.N_max, "Largest depth");
  op->add_option("--l0-min", op_b.L0_min_km, "Smallest station spacing (km)");
  op->add_option("--threads", op_threads, "Worker cap (0 = all cores)");
  add_common(op, op_c, true);

  // resources
  Common rs_c;
  int rs_n = 4, rs_depth = 2;
  auto* rs = app.add_subcommand("resources", "Operation counts and generation sequence summary");
  rs->add_option("--n", rs_n, "Unit ring size");
  rs->add_option("--depth", rs_depth, "Ring depth");
  add_common(rs, rs_c, false);

  std::vector<std::string> argv_store{"ringrep"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (fs->parsed()) {
      if (!fs_c.config.empty()) apply_config(fs, fs_c.config);
      if (fs_n != 4) throw UsageError("fusion recursions are defined for n = 4");
      check_unit(fs_min, "eta-min");
      check_unit(fs_max, "eta-max");
      if (fs_min > fs_max) throw UsageError("eta-min exceeds eta-max");
      if (fs_steps < 1) throw UsageError("eta-steps must be at least 1");
      Table t{{"depth", "eta", "p_success", "p_fail_x", "p_fail_z", "p_loss", "p_standard"}, {}};
      for (int d : parse_int_list(fs_depth)) {
        if (d < 1) throw UsageError("depth must be at least 1");
        for (int i = 0; i < fs_steps; ++i) {
          const double eta = fs_steps == 1 ? fs_min : (i == fs_steps - 1 ? fs_max : fs_min + (fs_max - fs_min) * i / (fs_steps - 1));
          const auto p = concat_fusion_distribution(eta, d);
          t.rows.push_back({Cell{static_cast<long long>(d)}, eta, p.p_s, p.p_x, p.p_z, p.p_l, eta * eta / 2});
        }
      }
      emit_table("fusion-success", t, fs_c.format, fs_c.out, out);
    } else if (ps->parsed()) {
      if (!ps_c.config.empty()) apply_config(ps, ps_c.config);
      const auto etas = parse_grid(ps_eta), lambdas = parse_grid(ps_lambda);
      if (etas.empty() || lambdas.empty()) throw UsageError("grids must not be empty");
      Table t{{"depth", "eta", "lambda", "eta_bar", "eps", "eps_d", "zeta"}, {}};
      for (int d : parse_int_list(ps_depth))
        for (double lam : lambdas)
          for (double eta : etas) {
            const auto s = pauli_meas_stats(eta, lam, d);
            t.rows.push_back({Cell{static_cast<long long>(d)}, eta, lam, s.eta_bar, s.eps, s.eps_d, s.zeta});
          }
      emit_table("pauli-stats", t, ps_c.format, ps_c.out, out);
    } else if (ft->parsed()) {
      if (!ft_c.config.empty()) apply_config(ft, ft_c.config);
      const auto etas = parse_grid(ft_eta), lambdas = parse_grid(ft_lambda);
      if (etas.empty() || lambdas.empty()) throw UsageError("grids must not be empty");
      Table t{{"depth", "switch_layer", "eta", "lambda", "p_s", "eps", "eps_d", "zeta", "conditional_error"}, {}};
      for (int d : parse_int_list(ft_depth))
        for (double lam : lambdas)
          for (double eta : etas) {
            const auto s = ft_fusion_stats(eta, lam, d, ft_switch);
            t.rows.push_back({Cell{static_cast<long long>(d)}, Cell{static_cast<long long>(ft_switch)}, eta, lam, s.p_s,
                              s.eps, s.eps_d, s.zeta, s.conditional_error()});
          }
      emit_table("ft-fusion", t, ft_c.format, ft_c.out, out);
    } else if (sim->parsed()) {
      if (!sim_c.config.empty()) apply_config(sim, sim_c.config);
      if (sim_trials < 1) throw UsageError("trials must be at least 1");
      TrialConfig cfg;
      cfg.spec = {4, sim_depth, sim_switch == 0 ? sim_depth : sim_switch};
      cfg.eta = sim_eta;
      cfg.lambda = sim_lambda;
      cfg.trials = sim_trials;
      cfg.seed = sim_seed;
      cfg.threads = sim_threads;
      const auto stats = sim_mode == "fusion" ? simulate_logical_fusion(cfg)
                                              : simulate_pauli_measurement(cfg, pauli_from_char(sim_logical[0]));
      emit("simulate", "json", simulate_report(stats).dump(2) + "\n", sim_c.out, out);
    } else if (op->parsed()) {
      if (!op_c.config.empty()) apply_config(op, op_c.config);
      const auto Ls = parse_grid(op_L), lambdas = parse_grid(op_lambda);
      if (Ls.empty()) throw UsageError("--L-grid must name at least one distance");
      if (lambdas.empty()) throw UsageError("--lambda-list must not be empty");
      op_b.Ntilde_max = op_b.N_max;
      const auto cells = sweep(Ls, lambdas, op_t, op_b, op_threads);
      if (op_c.format == "json") {
        json rows = json::array();
        for (const auto& c : cells) rows.push_back({{"L_km", c.L_km}, {"lambda", c.lambda}, {"result", c.result}});
        json j = {{"command", "optimize"}, {"timing", op_t}, {"bounds", op_b}, {"cells", rows}};
        emit("optimize", "json", j.dump(2) + "\n", op_c.out, out);
      } else {
        std::ostringstream os;
        write_sweep_csv_header(os);
        for (const auto& c : cells) write_sweep_csv_row(os, c);
        emit("optimize", "csv", os.str(), op_c.out, out);
      }
    } else if (rs->parsed()) {
      if (!rs_c.config.empty()) apply_config(rs, rs_c.config);
      if (rs_depth > 7) throw std::length_error("generation sequence summary supports depth <= 7");
      const RingCodeSpec spec{rs_n, rs_depth, rs_depth};
      spec.validate();
      auto summary = [](const GenerationSequence& g) {
        json ops = json::object();
        for (auto k : {GenOpKind::InitSpin, GenOpKind::EmitPhoton, GenOpKind::CZ, GenOpKind::Hadamard, GenOpKind::Phase,
                       GenOpKind::PhaseDag, GenOpKind::MeasureSpin})
          ops[gen_op_name(k)] = g.count(k);
        return json{{"spins", g.num_spins}, {"photons", g.num_photons}, {"counts", g.counts()}, {"op_counts", ops}};
      };
      json j = {{"command", "resources"},
                {"n", rs_n},
                {"depth", rs_depth},
                {"counts", resource_counts(spec)},
                {"matter_qubits", rs_depth + 1},
                {"ring", summary(generation_sequence(spec, false))},
                {"line", summary(generation_sequence(spec, true))}};
      emit("resources", "json", j.dump(2) + "\n", rs_c.out, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace ringrep::cli
