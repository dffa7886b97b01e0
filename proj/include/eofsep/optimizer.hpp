#pragma once

#include "eofsep/config.hpp"
#include "eofsep/ensemble.hpp"
#include "eofsep/linalg.hpp"
#include "eofsep/objectives.hpp"
#include "eofsep/states.hpp"

#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

namespace eofsep {

/// A smooth function on the unitary group. `value_and_gradient` returns the
/// value and writes the skew-Hermitian body-frame gradient (see
/// objectives.hpp for the convention).
struct ManifoldObjective {
  std::function<double(const ComplexMatrix&)> value;
  std::function<double(const ComplexMatrix&, ComplexMatrix&)> value_and_gradient;
};

template <typename Objective>
ManifoldObjective make_manifold_objective(const Objective& objective) {
  return {[&objective](const ComplexMatrix& t) { return objective.value(t); },
          [&objective](const ComplexMatrix& t, ComplexMatrix& g) {
            return objective.value_and_gradient(t, g);
          }};
}

enum class StopReason {
  gradient,        ///< gradient norm below grad_tol
  stagnation,      ///< objective decrease below objective_tol
  floor,           ///< objective reached the early-stop floor
  max_iterations,
  line_search,     ///< no decrease along steepest descent
};

std::string_view to_string(StopReason reason);

struct CgOutcome {
  ComplexMatrix t;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  StopReason reason = StopReason::max_iterations;
};

/// exp(x t / 2) g exp(-x t / 2).
ComplexMatrix parallel_transport(const ComplexMatrix& grad_prev, const ComplexMatrix& x_prev,
                                 double t_prev);

/// Conjugate-gradient descent along geodesics T exp(t X) with a transported
/// Polak-Ribiere update and a strong-Wolfe geodesic line search.
CgOutcome geodesic_cg_minimize(const ManifoldObjective& objective, const ComplexMatrix& t0,
                               const OptimizerConfig& config, double floor);

struct OptimizationResult {
  double best_value = 0.0;
  ComplexMatrix best_T;  ///< square K x K unitary
  std::size_t cardinality = 0;
  std::vector<double> per_restart_values;
  std::vector<std::size_t> iterations_used;
  std::vector<bool> converged;
  std::vector<StopReason> stop_reasons;
  double wall_time = 0.0;  ///< seconds
  /// Ensemble generated by the first R rows of best_T.
  Ensemble ensemble;

  bool best_converged() const;
  std::size_t restarts_converged() const;
};

/// Minimal average entanglement over ensembles of cardinality k, multistart
/// geodesic CG. Restart 0 starts at the identity (eigen-ensemble), restart 1
/// from a preselected T when available, the rest from Haar-random unitaries.
OptimizationResult eof_variational(const DensityMatrix& rho, std::size_t k,
                                   const OptimizerConfig& config);

/// States are declared separable when the l2 objective reaches this.
inline constexpr double kSeparableThreshold = 1e-14;
/// Runs of the separability objective stop once below this.
inline constexpr double kSeparableEarlyStop = 1e-16;

/// Minimizes the quartic minor objective over unitary K x K T.
OptimizationResult sep_variational(const DensityMatrix& rho, std::size_t k,
                                   const OptimizerConfig& config,
                                   IndicatorMode mode = IndicatorMode::full);

/// Runs the multistart driver on an arbitrary objective. `starts` supplies
/// explicit initial points for the first restarts; remaining restarts draw
/// Haar-random unitaries from per-restart streams of config.seed.
OptimizationResult multistart_minimize(const ManifoldObjective& objective, std::size_t k,
                                       const std::vector<ComplexMatrix>& starts,
                                       const OptimizerConfig& config, double floor);

/// Deterministic per-restart generator derived from the master seed.
std::mt19937_64 restart_rng(std::uint64_t seed, std::size_t restart);

}  // namespace eofsep
