#pragma once

#include <cstddef>
#include <cstdint>

namespace eofsep {

inline constexpr std::uint64_t kDefaultSeed = 20010419;

struct OptimizerConfig {
  std::size_t restarts = 10;
  std::size_t max_iterations = 2000;
  double grad_tol = 1e-9;
  double objective_tol = 1e-12;
  std::size_t line_search_max_evals = 50;
  /// Objective value at which a run stops; multistart also stops issuing new
  /// restarts once one reaches it.
  double early_stop_eof = 1e-10;
  std::uint64_t seed = kDefaultSeed;
  /// Worker threads for restarts; 0 selects the hardware concurrency.
  std::size_t jobs = 0;
  /// Seed one restart from the linear-algebraic preselection of T.
  bool preselect_seeding = true;
  /// Permit cardinalities outside [R, R^2].
  bool allow_any_cardinality = false;

  /// Throws DomainError for non-positive tolerances or zero restarts.
  void validate() const;
};

}  // namespace eofsep
