#include "cli.hpp"

#include "sweep.hpp"

#include "eofsep/concurrence.hpp"
#include "eofsep/errors.hpp"
#include "eofsep/optimizer.hpp"
#include "eofsep/state_io.hpp"
#include "eofsep/states.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>

namespace eofsep::cli {

namespace {

struct OptimizerFlags {
  std::optional<std::size_t> cardinality;
  std::size_t restarts = 10;
  double tol = 1e-9;
  std::optional<std::uint64_t> seed;
  std::size_t max_iter = 2000;
  std::size_t jobs = 0;
};

void add_optimizer_flags(CLI::App* cmd, OptimizerFlags& flags) {
  cmd->add_option("-K,--cardinality", flags.cardinality, "Ensemble cardinality K (default max(R, min(R^2, 16)))")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--restarts", flags.restarts, "Optimizer restarts")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--tol", flags.tol, "Gradient-norm tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--seed", flags.seed, "Master seed (overrides EOF_SEED)");
  cmd->add_option("--max-iter", flags.max_iter, "Iterations per restart")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--jobs", flags.jobs, "Worker threads (0 = all cores)")->capture_default_str();
}

std::uint64_t env_seed() {
  const char* text = std::getenv("EOF_SEED");
  if (text == nullptr || *text == '\0') return kDefaultSeed;
  const std::string s(text);
  std::size_t used = 0;
  std::uint64_t seed = 0;
  try {
    seed = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw DomainError("EOF_SEED must be an unsigned integer, got '" + s + "'");
  return seed;
}

OptimizerConfig make_config(const OptimizerFlags& flags) {
  OptimizerConfig config;
  config.restarts = flags.restarts;
  config.grad_tol = flags.tol;
  config.max_iterations = flags.max_iter;
  config.jobs = flags.jobs;
  config.seed = flags.seed ? *flags.seed : env_seed();
  return config;
}

void print_diagnostics(std::ostream& out, const OptimizationResult& r) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.per_restart_values.size(); ++i) {
    if (r.per_restart_values[i] < r.per_restart_values[best]) best = i;
  }
  out << "cardinality " << r.cardinality << '\n'
      << "restarts_converged " << r.restarts_converged() << '/' << r.per_restart_values.size() << '\n'
      << "best_restart " << best << '\n'
      << "stop_reason " << to_string(r.stop_reasons[best]) << '\n'
      << "iterations " << r.iterations_used[best] << '\n'
      << "seconds " << std::fixed << std::setprecision(3) << r.wall_time << std::defaultfloat << '\n';
}

void write_ensemble(const std::string& path, const Ensemble& ensemble) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write ensemble file " + path);
  file << "# member weights followed by state vectors (re im per component)\n"
       << "DIM " << ensemble.dims.n1 << ' ' << ensemble.dims.n2 << '\n'
       << "MEMBERS " << ensemble.size() << '\n'
       << std::setprecision(17);
  for (std::size_t k = 0; k < ensemble.size(); ++k) {
    file << "WEIGHT " << ensemble.weights[k] << '\n';
    const ComplexVector& v = ensemble.states[k].vector();
    for (Eigen::Index i = 0; i < v.size(); ++i) file << v(i).real() << ' ' << v(i).imag() << '\n';
  }
  if (!file) throw std::runtime_error("failed writing ensemble file " + path);
}

std::size_t resolve_cardinality(const OptimizerFlags& flags, const DensityMatrix& rho) {
  return flags.cardinality ? *flags.cardinality : default_cardinality(rho.rank());
}

int cmd_eof(const std::string& path, const OptimizerFlags& flags, const std::string& emit,
            std::ostream& out) {
  const DensityMatrix rho = read_state_file(path);
  const OptimizationResult r =
      eof_variational(rho, resolve_cardinality(flags, rho), make_config(flags));
  const bool floored = r.best_value < kEofFloor;
  out << "eof " << std::showpoint << std::setprecision(10) << (floored ? 0.0 : r.best_value)
      << std::noshowpoint << '\n'
      << "rank " << rho.rank() << '\n';
  print_diagnostics(out, r);
  if (!emit.empty()) write_ensemble(emit, r.ensemble);
  return r.best_converged() ? kExitOk : kExitNotConverged;
}

int cmd_sep(const std::string& path, const std::string& method, const OptimizerFlags& flags,
            std::ostream& out) {
  const DensityMatrix rho = read_state_file(path);
  if (method == "peres") {
    const PeresResult p = peres_test(rho);
    out << (p.is_ppt ? "INCONCLUSIVE" : "ENTANGLED") << '\n'
        << "min_partial_transpose_eigenvalue " << std::setprecision(10) << p.min_eigenvalue << '\n';
    return kExitOk;
  }
  if (method == "genconc") {
    const GenConcResult g = genconc_criterion(a_matrices(rho, IndicatorSet(rho.dims())), make_config(flags));
    out << (g.passes ? "INCONCLUSIVE" : "ENTANGLED") << '\n'
        << "max_ratio " << std::setprecision(10) << g.max_ratio << '\n';
    return kExitOk;
  }
  if (method == "preselect") {
    const AMatrixSet a_set = a_matrices(rho, IndicatorSet(rho.dims()));
    const PreselectResult p = preselect_T(a_set, rho, 0, make_config(flags).seed);
    const double best = p.best ? p.objective_values[*p.best] : std::numeric_limits<double>::infinity();
    out << (best <= kSeparableThreshold ? "SEPARABLE" : "INCONCLUSIVE") << '\n'
        << "candidates " << p.candidates.size() << '\n'
        << "null_dimension " << p.null_dimension << '\n'
        << "rank_condition " << (p.applicable ? "holds" : "fails") << '\n'
        << "defect " << std::setprecision(10) << best << '\n';
    return kExitOk;
  }
  const OptimizationResult r = sep_variational(rho, resolve_cardinality(flags, rho), make_config(flags));
  const bool separable = r.best_value <= kSeparableThreshold;
  out << (separable ? "SEPARABLE" : "INCONCLUSIVE") << '\n'
      << "defect " << std::setprecision(10) << r.best_value << '\n';
  print_diagnostics(out, r);
  return separable || r.best_converged() ? kExitOk : kExitNotConverged;
}

int cmd_concurrence(const std::string& path, std::ostream& out) {
  const DensityMatrix rho = read_state_file(path);
  const ConcurrenceResult c = concurrence_2x2(rho);
  out << std::setprecision(10) << "concurrence " << c.c << '\n'
      << "optimal_k " << c.optimal_k << '\n'
      << "eof " << eof_from_concurrence(c.c) << '\n';
  return kExitOk;
}

struct SweepFlags {
  std::string a_grid;
  std::string e_grid;
  std::string output;
  std::string plot;
  bool quiet = false;
};

int cmd_sweep(const SweepFlags& sf, const OptimizerFlags& flags, std::ostream& out,
              std::ostream& err) {
  SweepSpec spec;
  spec.a_grid = parse_grid(sf.a_grid);
  spec.e_grid = parse_grid(sf.e_grid);
  spec.cardinality = flags.cardinality.value_or(14);
  spec.config = make_config(flags);
  spec.jobs = flags.jobs;
  spec.validate();

  std::ofstream csv;
  if (!sf.output.empty()) {
    csv.open(sf.output);
    if (!csv) throw std::runtime_error("cannot write " + sf.output);
  }
  auto progress = [&](const SweepRow& r) {
    if (!sf.quiet) {
      err << "a=" << r.a << " e=" << r.e << " eof=" << std::setprecision(6) << r.eof << '\n';
    }
  };
  const std::vector<SweepRow> rows = run_sweep(spec, progress);
  write_sweep_csv(sf.output.empty() ? out : csv, rows);
  if (!sf.output.empty()) {
    const std::string plot = sf.plot.empty() ? sf.output + ".plot.py" : sf.plot;
    std::ofstream script(plot);
    if (!script) throw std::runtime_error("cannot write " + plot);
    write_plot_script(script, sf.output);
    if (!sf.quiet) err << "wrote " << sf.output << " and " << plot << '\n';
  }
  const bool all_converged = std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) {
    return r.floored || r.restarts_converged > 0;
  });
  return all_converged ? kExitOk : kExitNotConverged;
}

struct StateFlags {
  std::string kind;
  double a = 0.225;
  double e = 1.0;
  double f = 0.5;
  std::size_t n = 2;
  std::string output;
};

int cmd_state(const StateFlags& sf, std::ostream& out) {
  DensityMatrix rho = [&] {
    if (sf.kind == "singlet") return DensityMatrix::from_pure(singlet());
    if (sf.kind == "maximally-mixed") return DensityMatrix::maximally_mixed({sf.n, sf.n});
    if (sf.kind == "isotropic") return mix_with_identity(isotropic_state(sf.f, sf.n), sf.e);
    return mix_with_identity(horodecki_state(sf.a), sf.e);
  }();
  if (sf.output.empty()) {
    write_state(out, rho.dims(), rho.matrix());
  } else {
    write_state_file(sf.output, rho);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entanglement of formation and separability of bipartite states"};
  app.require_subcommand(1);

  OptimizerFlags flags;
  std::string state_path;
  std::string emit;
  std::string method = "l2";
  SweepFlags sweep_flags;
  StateFlags state_flags;

  auto* eof = app.add_subcommand("eof", "Variational entanglement of formation");
  eof->add_option("state", state_path, "State file")->required();
  add_optimizer_flags(eof, flags);
  eof->add_option("--emit-ensemble", emit, "Write the optimal ensemble to this file");

  auto* sep = app.add_subcommand("sep", "Separability test");
  sep->add_option("state", state_path, "State file")->required();
  sep->add_option("--method", method, "l2, genconc, peres or preselect")
      ->check(CLI::IsMember({"l2", "genconc", "peres", "preselect"}))
      ->capture_default_str();
  add_optimizer_flags(sep, flags);

  auto* conc = app.add_subcommand("concurrence", "Closed-form concurrence of a 2x2 state");
  conc->add_option("state", state_path, "State file")->required();

  auto* sweep = app.add_subcommand("sweep", "EoF over the Horodecki (a, e) family");
  sweep->add_option("--a", sweep_flags.a_grid, "a grid: v1,v2,... or lo:step:hi")->required();
  sweep->add_option("--e", sweep_flags.e_grid, "e grid: v1,v2,... or lo:step:hi")->required();
  sweep->add_option("-o,--output", sweep_flags.output, "CSV path (default stdout)");
  sweep->add_option("--plot-script", sweep_flags.plot, "Plot script path (default <output>.plot.py)");
  sweep->add_flag("-q,--quiet", sweep_flags.quiet, "No progress output");
  add_optimizer_flags(sweep, flags);

  auto* state = app.add_subcommand("state", "Write a standard state file");
  state->add_option("kind", state_flags.kind, "horodecki, isotropic, singlet or maximally-mixed")
      ->check(CLI::IsMember({"horodecki", "isotropic", "singlet", "maximally-mixed"}))
      ->required();
  state->add_option("--a", state_flags.a, "Horodecki parameter")->capture_default_str();
  state->add_option("--e", state_flags.e, "Weight of the state against the identity")->capture_default_str();
  state->add_option("--f", state_flags.f, "Isotropic fidelity")->capture_default_str();
  state->add_option("--n", state_flags.n, "Local dimension")->capture_default_str();
  state->add_option("-o,--output", state_flags.output, "Output path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (eof->parsed()) return cmd_eof(state_path, flags, emit, out);
    if (sep->parsed()) return cmd_sep(state_path, method, flags, out);
    if (conc->parsed()) return cmd_concurrence(state_path, out);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, flags, out, err);
    return cmd_state(state_flags, out);
  } catch (const ParseError& e) {
    err << "error: " << state_path << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitInputError;
}

}  // namespace eofsep::cli
