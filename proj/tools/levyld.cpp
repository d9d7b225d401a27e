// levyld: validate models, check generator convergence, simulate, and
// tabulate SCGFs and rate functions.
//
// Exit codes: 0 success, 1 validation or usage error, 2 acceptance-property
// failure, 3 simulation budget exceeded.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "levyld/chain.hpp"
#include "levyld/config.hpp"
#include "levyld/csv.hpp"
#include "levyld/errors.hpp"
#include "levyld/exp_gen.hpp"
#include "levyld/jump_model.hpp"
#include "levyld/kernels/kernels.hpp"
#include "levyld/ldp.hpp"
#include "levyld/limit_gen.hpp"
#include "levyld/simulate.hpp"

namespace {

using namespace levyld;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitProperty = 2;
constexpr int kExitBudget = 3;

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct SimOptions {
  std::size_t paths = 10000;
  double horizon = 1.0;
  double eps = 0.2;
  std::optional<double> delta;
  std::size_t x0 = 0;
  double u0 = 0.0;
  unsigned batches = 1;
  bool limit = false;
  std::string event_log;
  std::vector<double> lambda_grid;
};

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw InvalidModel("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct Loaded {
  ModelConfig cfg;
  ChainAnalysis analysis;
};

Loaded load(const GlobalOptions& g) {
  if (g.config.empty()) throw InvalidModel("--config is required");
  ModelConfig cfg = load_config(g.config);
  ChainAnalysis analysis = analyze_chain(cfg.chain);
  return {std::move(cfg), std::move(analysis)};
}

// Plain-text reports use 12 significant digits; CSV keeps full precision.
std::string report_double(double v) { return format_double(v, 12); }

void print_vector(std::ostream& os, const char* name, const Vector& v) {
  os << name << ":";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << ' ' << report_double(v(i));
  os << '\n';
}

int cmd_validate(const GlobalOptions& g) {
  if (g.config.empty()) throw InvalidModel("--config is required");
  ModelConfig cfg = load_config(g.config);
  ChainAnalysis analysis;
  try {
    analysis = analyze_chain(cfg.chain);
  } catch (const SingularSystem& e) {
    std::cerr << "FAIL C1 ergodicity: " << e.what() << '\n';
    return kExitValidation;
  }
  const ValidationReport r = validate_conditions(cfg.jumps, analysis);
  Output out(g.out);
  std::ostream& os = out.stream();
  print_vector(os, "pi", analysis.pi);
  os << "R0 diagonal:";
  for (Eigen::Index i = 0; i < analysis.potential.rows(); ++i) os << ' ' << report_double(analysis.potential(i, i));
  os << '\n';
  os << "balance_residual: " << report_double(r.balance_residual) << (r.balance_ok ? " ok" : " FAIL") << '\n';
  os << "C3 square_integrable: " << (r.square_integrable ? "ok" : "FAIL")
     << " (finite atoms, max |v| = " << report_double(r.max_abs_jump) << ")\n";
  os << "C4 exponentially_finite: " << (r.exponentially_finite ? "ok" : "FAIL") << " (structural)\n";
  os << "positivity_margin: " << report_double(r.positivity_margin) << (r.positivity_ok ? " ok" : " FAIL") << '\n';
  os << "sigma2: " << report_double(r.sigma2) << (r.variance_ok ? " ok" : " FAIL") << '\n';
  for (const std::string& f : r.failures()) std::cerr << "FAIL " << f << '\n';
  return r.passed() ? kExitOk : kExitValidation;
}

int cmd_analyze(const GlobalOptions& g) {
  const Loaded m = load(g);
  const LimitGenerator gen = limit_generator(m.cfg.jumps, m.analysis);
  Output out(g.out);
  std::ostream& os = out.stream();
  print_vector(os, "pi", m.analysis.pi);
  os << "R0:\n";
  for (Eigen::Index r = 0; r < m.analysis.potential.rows(); ++r) {
    os << ' ';
    for (Eigen::Index c = 0; c < m.analysis.potential.cols(); ++c) {
      os << ' ' << report_double(m.analysis.potential(r, c));
    }
    os << '\n';
  }
  os << "a_bar: " << report_double(gen.a_bar) << '\n';
  os << "a0_bar: " << report_double(gen.a0_bar) << '\n';
  os << "c_bar: " << report_double(gen.c_bar) << '\n';
  os << "c0_bar: " << report_double(gen.c0_bar) << '\n';
  os << "switching_term: " << report_double(gen.switching) << '\n';
  os << "drift: " << report_double(gen.drift) << '\n';
  os << "sigma2: " << report_double(gen.sigma2) << '\n';
  os << "measure:";
  for (const Atom& atom : gen.measure) os << " (" << report_double(atom.jump) << ", " << report_double(atom.rate) << ")";
  os << '\n';
  os << "kernels: " << kernels::isa_name(kernels::active_isa()) << '\n';
  return kExitOk;
}

int cmd_convergence(const GlobalOptions& g, std::vector<double> eps_list, const std::string& phi_name) {
  const Loaded m = load(g);
  const LimitGenerator gen = limit_generator(m.cfg.jumps, m.analysis);
  if (eps_list.empty()) eps_list = m.cfg.defaults.eps_list;
  const TestFunction phi = TestFunction::from_name(phi_name);
  const ConvergenceReport report = theorem_residual_sweep(phi, m.cfg.chain, m.cfg.jumps, m.analysis, gen, eps_list,
                                                          m.cfg.defaults.delta_rule, m.cfg.defaults.u_grid);
  Output out(g.out);
  write_convergence_csv(report, out.stream());
  if (!report.decreasing_to_floor()) {
    std::cerr << "residuals are not strictly decreasing\n";
    return kExitProperty;
  }
  return kExitOk;
}

SimConfig make_sim_config(const GlobalOptions& g, const Loaded& m, const SimOptions& o) {
  if (o.paths == 0) throw InvalidModel("--paths must be at least 1");
  SimConfig cfg;
  cfg.scales = o.delta ? ScalePair::make(o.eps, *o.delta) : m.cfg.defaults.delta_rule.apply(o.eps);
  cfg.horizon = o.horizon;
  cfg.paths = o.paths;
  cfg.seed = g.seed.value_or(m.cfg.defaults.seed);
  cfg.x0 = o.x0;
  cfg.u0 = o.u0;
  cfg.batches = o.batches;
  return cfg;
}

std::vector<double> run_simulation(const GlobalOptions& g, const SimOptions& o, double& eps_used) {
  const Loaded m = load(g);
  const SimConfig cfg = make_sim_config(g, m, o);
  if (o.limit) {
    eps_used = 1.0;
    return simulate_limit(limit_generator(m.cfg.jumps, m.analysis), cfg);
  }
  eps_used = cfg.scales.eps;
  const PrelimitMeasure measure = build_prelimit(m.cfg.jumps, cfg.scales.delta);
  if (o.event_log.empty()) return simulate_prelimit(m.cfg.chain, m.analysis, measure, cfg).endpoints;

  std::ofstream log(o.event_log, std::ios::binary);
  if (!log) throw InvalidModel("cannot open event log '" + o.event_log + "'");
  log << "path_index,time,kind,state,position\n";
  const EventSink sink = [&](const SimEvent& e) {
    log << e.path << ',' << format_double(e.time) << ',' << (e.kind == EventKind::jump ? "jump" : "switch") << ','
        << m.cfg.states[e.state] << ',' << format_double(e.position) << '\n';
  };
  return simulate_prelimit(m.cfg.chain, m.analysis, measure, cfg, sink).endpoints;
}

int cmd_simulate(const GlobalOptions& g, const SimOptions& o) {
  double eps = 0.0;
  const std::vector<double> endpoints = run_simulation(g, o, eps);
  Output out(g.out);
  write_endpoints_csv(endpoints, out.stream());
  return kExitOk;
}

int cmd_scgf(const GlobalOptions& g, const SimOptions& o) {
  double eps = 0.0;
  const std::vector<double> endpoints = run_simulation(g, o, eps);
  std::vector<double> lambdas = o.lambda_grid;
  if (lambdas.empty()) lambdas = load_config(g.config).defaults.lambda_grid;
  const std::vector<ScgfEstimate> rows = estimate_scgf(endpoints, eps, lambdas);
  Output out(g.out);
  write_scgf_csv(rows, out.stream());
  for (const ScgfEstimate& r : rows) {
    if (!r.reportable()) {
      std::cerr << "warning: lambda = " << r.lambda << " has effective sample size " << r.n_effective << " < "
                << ScgfEstimate::kMinEffective << '\n';
    }
  }
  return kExitOk;
}

int cmd_rate(const GlobalOptions& g, const std::vector<double>& x_grid) {
  const Loaded m = load(g);
  const LimitGenerator gen = limit_generator(m.cfg.jumps, m.analysis);
  std::vector<double> xs = x_grid;
  if (xs.empty()) {
    for (int k = -10; k <= 10; ++k) xs.push_back(gen.a_bar + 0.25 * k);
  }
  const std::vector<RatePoint> rows = rate_table(gen, xs);
  Output out(g.out);
  write_rate_csv(rows, out.stream());
  return kExitOk;
}

void add_sim_options(CLI::App* cmd, SimOptions& o) {
  cmd->add_option("--paths", o.paths, "Number of simulated paths");
  cmd->add_option("--t", o.horizon, "Time horizon")->check(CLI::PositiveNumber);
  cmd->add_option("--eps", o.eps, "Small parameter eps")->check(CLI::PositiveNumber);
  cmd->add_option("--delta", o.delta, "Override delta (default: config delta_rule)");
  cmd->add_option("--x0", o.x0, "Initial switching state index");
  cmd->add_option("--u0", o.u0, "Initial position");
  cmd->add_option("--batches", o.batches, "Parallel batches (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--limit", o.limit, "Simulate the limit process instead of the pre-limit model");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Large deviations for Markov-switched evolutions in the Levy approximation"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "Model file (JSON)");
  app.add_option("--seed", g.seed, "Random seed (default: config seed)");
  app.add_option("--out", g.out, "Output file (default: stdout)");

  auto* validate = app.add_subcommand("validate", "Check ergodicity and the Levy approximation conditions");
  auto* analyze = app.add_subcommand("analyze", "Print pi, R0 and the limit generator coefficients");

  auto* convergence = app.add_subcommand("convergence", "Residual sweep of the exponential generators");
  std::vector<double> eps_list;
  std::string phi_name = "tanh";
  convergence->add_option("--eps-list", eps_list, "Decreasing eps values")->delimiter(',');
  convergence->add_option("--phi", phi_name, "Test function: tanh, sin, linear, constant");

  SimOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate endpoints xi(t)");
  add_sim_options(simulate, sim);
  simulate->add_option("--event-log", sim.event_log, "Write every pre-limit event to this CSV");

  auto* scgf = app.add_subcommand("scgf", "Empirical scaled cumulant generating function");
  add_sim_options(scgf, sim);
  scgf->add_option("--lambda-grid", sim.lambda_grid, "Lambda values")->delimiter(',');

  auto* rate = app.add_subcommand("rate", "Rate function table");
  std::vector<double> x_grid;
  rate->add_option("--x-grid", x_grid, "Points x")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*validate) return cmd_validate(g);
    if (*analyze) return cmd_analyze(g);
    if (*convergence) return cmd_convergence(g, eps_list, phi_name);
    if (*simulate) return cmd_simulate(g, sim);
    if (*scgf) return cmd_scgf(g, sim);
    if (*rate) return cmd_rate(g, x_grid);
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
