// Experiment driver for Krylov approximations of f(A)v with a posteriori
// error estimates: reproduces the diagonal / convection-diffusion test
// problems, runs generic solves on Matrix Market inputs, and tabulates the
// error bounds. Artifacts are CSV traces, SVG convergence plots, and plain
// text result vectors.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kryfun/kryfun.hpp"

namespace fs = std::filesystem;
using namespace kryfun;

namespace {

struct RunConfig {
  std::string matrix_source;  // path or gen:... spec
  FunctionKind function = FunctionKind::Exp;
  std::vector<double> taus{1.0};
  std::string method = "arnoldi";  // arnoldi | lanczos | restart:<m>
  Index max_dim = 200;
  Index max_cycles = 60;
  double eps = 1e-12;
  std::uint64_t seed = 20130401;
  bool oracle = true;
  bool oracle_explicit = false;  // --oracle given on the command line
  std::string nodes = "confluent";  // node policy for expansion diagnostics
  Index n_t = 257;
  std::string out = ".";
  bool paper_scale = false;
  std::string start = "random";  // random | ones | <path>
};

FunctionKind parse_kind(const std::string& name) {
  if (name == "exp") return FunctionKind::Exp;
  if (name == "cos") return FunctionKind::Cos;
  if (name == "sin") return FunctionKind::Sin;
  throw InputError("unknown function '" + name + "' (expected exp|cos|sin)");
}

// gen:diag:N=1001,a=0,b=40  or  gen:convdiff:n=8,d1=57.6,d2=76.8
SparseMatrix build_generated(const std::string& spec) {
  const auto second = spec.find(':', 4);
  const std::string name = spec.substr(4, second - 4);
  std::map<std::string, double> kv;
  if (second != std::string::npos) {
    std::stringstream rest(spec.substr(second + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw InputError("malformed generator parameter '" + item + "'");
      kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
  }
  auto value = [&kv](const std::string& key, double fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  };
  if (name == "diag") {
    return build_diag_spectrum(static_cast<Index>(value("N", 1001)),
                               {value("a", 0.0), value("b", 40.0)});
  }
  if (name == "convdiff") {
    return build_convection_diffusion(static_cast<Index>(value("n", 8)), value("d1", 57.6),
                                      value("d2", 76.8));
  }
  throw InputError("unknown generator '" + name + "' (expected diag|convdiff)");
}

SparseMatrix load_matrix(const std::string& source) {
  if (source.rfind("gen:", 0) == 0) return build_generated(source);
  return read_matrix_market(source);
}

Vector starting_vector(const RunConfig& config, Index n) {
  if (config.start == "random") return random_unit_vector(n, config.seed);
  if (config.start == "ones") return Vector::Constant(n, 1.0);
  Vector v = read_vector(config.start);
  if (v.size() != n) throw InputError("starting vector length does not match the matrix");
  return v;
}

std::string format_tau(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", tau);
  return buf;
}

struct ParsedMethod {
  Method method = Method::Arnoldi;
  Index restart_block = 0;  // 0 = no restarting
};

ParsedMethod parse_method(const std::string& name) {
  if (name == "arnoldi") return {Method::Arnoldi, 0};
  if (name == "lanczos") return {Method::Lanczos, 0};
  if (name.rfind("restart:", 0) == 0) {
    const Index block = static_cast<Index>(std::stoll(name.substr(8)));
    if (block < 2) throw InputError("restart block size must be at least 2");
    return {Method::Arnoldi, block};
  }
  throw InputError("unknown method '" + name + "' (expected arnoldi|lanczos|restart:<m>)");
}

std::string method_label(const ParsedMethod& pm) {
  if (pm.restart_block > 0) return "restart" + std::to_string(pm.restart_block);
  return pm.method == Method::Lanczos ? "lanczos" : "arnoldi";
}

/// One (matrix, function, tau, method) run: solve, trace, artifacts.
/// Returns true when the run converged.
bool execute_run(const SparseMatrix& a, const Vector& v, const FunctionSpec& spec,
                 const ParsedMethod& pm, const RunConfig& config, const std::string& label,
                 bool write_result_vector, bool with_bounds) {
  std::optional<OracleResult> oracle;
  if (config.oracle) oracle = reference_fAv(a, v, spec);

  std::vector<ConvergenceRecord> records;
  Vector approx;
  bool converged = false;
  if (pm.restart_block > 0) {
    RestartOptions options;
    options.max_cycles = config.max_cycles;
    options.eps = config.eps;
    options.oracle = oracle ? &*oracle : nullptr;
    RestartResult result = restarted_approx(a, v, spec, pm.restart_block, options);
    records = std::move(result.records);
    approx = std::move(result.approx);
    converged = result.converged;
  } else {
    RunOptions options;
    options.method = pm.method;
    options.max_dim = config.max_dim;
    options.eps = config.eps;
    options.oracle = oracle ? &*oracle : nullptr;
    RunResult result = with_bounds ? run_krylov_with_bounds(a, v, spec, options, config.n_t)
                                   : run_krylov(a, v, spec, options);
    records = std::move(result.records);
    approx = std::move(result.approx);
    converged = result.converged;
  }

  const fs::path dir(config.out);
  fs::create_directories(dir);
  const std::string stem =
      label + "_" + to_string(spec.kind) + "_tau" + format_tau(spec.tau) + "_" + method_label(pm);
  write_csv((dir / (stem + ".csv")).string(), records, with_bounds);
  if (!with_bounds) {
    std::ostringstream title;
    title << label << ": " << to_string(spec.kind) << "(-tau A)v, tau=" << format_tau(spec.tau)
          << ", " << method_label(pm) << ", N=" << a.size();
    write_svg((dir / (stem + ".svg")).string(), title.str(), records);
  }
  if (write_result_vector) write_vector((dir / (stem + ".txt")).string(), approx);

  std::cout << stem << ": " << (converged ? "converged" : "UNCONVERGED") << " after "
            << (records.empty() ? 0 : records.back().step) << " dimensions";
  if (!records.empty() && records.back().true_rel)
    std::cout << ", true_rel = " << *records.back().true_rel;
  std::cout << "\n";
  return converged;
}

struct Ex2Setup {
  SparseMatrix matrix;
  double tau = 0.0;
};

/// Convection-diffusion test operator. Desk scale keeps the full-size problem's
/// convection strengths zeta_1 = 3.2, zeta_2 = 64/15 on an n = 8 grid;
/// --paper-scale restores the full n = 14 (N = 2744) problem.
Ex2Setup make_ex2(bool paper_scale) {
  Ex2Setup setup;
  const Index n = paper_scale ? 14 : 8;
  const double h = 1.0 / static_cast<double>(n + 1);
  const double delta1 = 2.0 * 3.2 / h;
  const double delta2 = 2.0 * (64.0 / 15.0) / h;
  setup.matrix = build_convection_diffusion(n, delta1, delta2);
  setup.tau = h * h;
  return setup;
}

int cmd_experiment(const std::string& name, RunConfig config, bool tau_given,
                   bool function_given) {
  // the N = 2744 dense reference is opt-in slow
  if (config.paper_scale && !config.oracle_explicit) config.oracle = false;
  bool all_converged = true;
  auto run_group = [&](const SparseMatrix& a, const Vector& v, FunctionKind kind,
                       const std::vector<double>& taus, const ParsedMethod& pm,
                       const std::string& label) {
    for (double tau : taus)
      all_converged &= execute_run(a, v, FunctionSpec(kind, tau), pm, config, label, false, false);
  };

  const std::vector<double> diag_taus =
      tau_given ? config.taus : std::vector<double>{0.1, 0.5, 1.0};

  if (name == "ex1") {
    SparseMatrix a = build_diag_spectrum(1001, {0.0, 40.0});
    Vector v = random_unit_vector(a.size(), config.seed);
    config.max_dim = std::max<Index>(config.max_dim, 300);
    run_group(a, v, function_given ? config.function : FunctionKind::Exp, diag_taus,
              {Method::Lanczos, 0}, "ex1");
  } else if (name == "ex2") {
    Ex2Setup setup = make_ex2(config.paper_scale);
    Vector v = Vector::Constant(setup.matrix.size(), 1.0);
    const std::vector<double> taus = tau_given ? config.taus : std::vector<double>{setup.tau};
    run_group(setup.matrix, v, function_given ? config.function : FunctionKind::Exp, taus,
              {Method::Arnoldi, 0}, "ex2");
  } else if (name == "ex3") {
    std::vector<FunctionKind> kinds = {FunctionKind::Cos, FunctionKind::Sin};
    if (function_given) kinds = {config.function};
    SparseMatrix diag = build_diag_spectrum(1001, {0.0, 40.0});
    Vector v_diag = random_unit_vector(diag.size(), config.seed);
    Ex2Setup setup = make_ex2(config.paper_scale);
    Vector v_cd = Vector::Constant(setup.matrix.size(), 1.0);
    config.max_dim = std::max<Index>(config.max_dim, 300);
    for (FunctionKind kind : kinds) {
      run_group(diag, v_diag, kind, diag_taus, {Method::Lanczos, 0}, "ex3diag");
      run_group(setup.matrix, v_cd, kind,
                tau_given ? config.taus : std::vector<double>{setup.tau}, {Method::Arnoldi, 0},
                "ex3convdiff");
    }
  } else if (name == "ex4") {
    Ex2Setup setup = make_ex2(config.paper_scale);
    Vector v = Vector::Constant(setup.matrix.size(), 1.0);
    const std::vector<double> taus = tau_given ? config.taus : std::vector<double>{setup.tau};
    for (Index block : {Index{5}, Index{10}})
      run_group(setup.matrix, v, function_given ? config.function : FunctionKind::Exp, taus,
                {Method::Arnoldi, block}, "ex4");
  } else {
    throw InputError("unknown experiment '" + name + "' (expected ex1|ex2|ex3|ex4)");
  }
  return all_converged ? 0 : 2;
}

int cmd_approx(const RunConfig& config) {
  SparseMatrix a = load_matrix(config.matrix_source);
  Vector v = starting_vector(config, a.size());
  ParsedMethod pm = parse_method(config.method);
  bool all_converged = true;
  for (double tau : config.taus)
    all_converged &=
        execute_run(a, v, FunctionSpec(config.function, tau), pm, config, "approx", true, false);
  return all_converged ? 0 : 2;
}

int cmd_bounds(const RunConfig& config) {
  if (config.function != FunctionKind::Exp)
    throw InputError("bounds are exponential-only");
  SparseMatrix a = load_matrix(config.matrix_source);
  Vector v = starting_vector(config, a.size());
  ParsedMethod pm = parse_method(config.method);
  if (pm.restart_block > 0) throw InputError("bounds supports arnoldi|lanczos only");
  bool all_converged = true;
  for (double tau : config.taus)
    all_converged &=
        execute_run(a, v, FunctionSpec(config.function, tau), pm, config, "bounds", false, true);
  return all_converged ? 0 : 2;
}

void add_common_options(CLI::App* cmd, RunConfig& config, std::string& function_name,
                        std::string& oracle_mode) {
  cmd->add_option("--function", function_name, "matrix function (exp|cos|sin)");
  cmd->add_option("--tau", config.taus, "time parameters (list)")->delimiter(',');
  cmd->add_option("--eps", config.eps, "stopping tolerance (default 1e-12)");
  cmd->add_option("--max-dim", config.max_dim, "Krylov dimension cap");
  cmd->add_option("--max-cycles", config.max_cycles, "restart cycle cap");
  cmd->add_option("--seed", config.seed, "PRNG seed for random starting vectors");
  cmd->add_option("--oracle", oracle_mode, "compare against the dense reference (on|off)")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--nodes", config.nodes, "expansion node policy (confluent|ritz)")
      ->check(CLI::IsMember({"confluent", "ritz"}));
  cmd->add_option("--nt", config.n_t, "samples for the max-over-t bounds");
  cmd->add_option("--out", config.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Krylov approximation of f(A)v with a posteriori error estimates"};
  app.require_subcommand(1);

  RunConfig config;
  std::string function_name;
  std::string oracle_mode;
  std::string experiment_name;

  CLI::App* experiment =
      app.add_subcommand("experiment", "reproduce the built-in test problems ex1..ex4");
  experiment->add_option("name", experiment_name, "experiment name (ex1|ex2|ex3|ex4)")
      ->required();
  add_common_options(experiment, config, function_name, oracle_mode);
  experiment->add_flag("--paper-scale", config.paper_scale,
                       "run the full-size convection-diffusion problem (N = 2744)");

  CLI::App* approx = app.add_subcommand("approx", "approximate f(A)v for a given matrix");
  approx->add_option("--matrix", config.matrix_source, "Matrix Market path or gen:... spec")
      ->required();
  approx->add_option("--method", config.method, "arnoldi|lanczos|restart:<m>");
  approx->add_option("--v", config.start, "starting vector (random|ones|<path>)");
  add_common_options(approx, config, function_name, oracle_mode);

  CLI::App* bounds = app.add_subcommand("bounds", "tabulate the error bounds per step");
  bounds->add_option("--matrix", config.matrix_source, "Matrix Market path or gen:... spec")
      ->required();
  bounds->add_option("--method", config.method, "arnoldi|lanczos");
  bounds->add_option("--v", config.start, "starting vector (random|ones|<path>)");
  add_common_options(bounds, config, function_name, oracle_mode);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (!function_name.empty()) config.function = parse_kind(function_name);
    // The dense reference defaults on for experiments and bounds tables and
    // off for generic approx solves.
    config.oracle_explicit = !oracle_mode.empty();
    config.oracle = oracle_mode.empty() ? !approx->parsed() : oracle_mode == "on";
    if (app.got_subcommand(experiment))
      return cmd_experiment(experiment_name, config, experiment->count("--tau") > 0,
                            !function_name.empty());
    if (app.got_subcommand(approx)) return cmd_approx(config);
    if (app.got_subcommand(bounds)) return cmd_bounds(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
