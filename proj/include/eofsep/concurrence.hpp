#pragma once

#include "eofsep/config.hpp"
#include "eofsep/ensemble.hpp"
#include "eofsep/errors.hpp"
#include "eofsep/linalg.hpp"
#include "eofsep/states.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace eofsep {

/// Smallest possible sum of |diagonal| over complex symmetric k x k matrices
/// with the given singular values (padded with zeros to length k).
/// `sigma` must be non-negative and sorted descending; k >= sigma.size().
double thompson_min_abs_diag_sum(std::span<const double> sigma, std::size_t k);

/// Thompson's conditions: whether a complex symmetric matrix with diagonal
/// moduli `diag_moduli` and singular values `sigma` exists. Both are sorted
/// internally; lengths must agree.
bool thompson_feasible(std::span<const double> diag_moduli, std::span<const double> sigma,
                       double tolerance = 1e-12);

struct ConcurrenceResult {
  double c = 0.0;
  std::size_t optimal_k = 0;
  RealVector sigma;  ///< Takagi values of the A-matrix, descending
};

/// Closed-form concurrence of a 2x2 state and the cardinality of an optimal
/// ensemble. Throws DimensionError for other dimensions.
ConcurrenceResult concurrence_2x2(const DensityMatrix& rho);

/// Pure-state entanglement as a function of concurrence,
/// h2((1 + sqrt(1 - c^2)) / 2). Throws DomainError outside [0, 1].
double eof_from_concurrence(double c);

/// Raised when an optimal 2x2 ensemble cannot be completed; carries the best
/// ensemble found.
class EnsembleConvergenceError : public ConvergenceError {
 public:
  EnsembleConvergenceError(const std::string& what, Ensemble best)
      : ConvergenceError(what), best_(std::move(best)) {}
  const Ensemble& best() const noexcept { return best_; }

 private:
  Ensemble best_;
};

/// Ensemble whose members all have concurrence C(rho), so its average
/// entanglement equals eof_from_concurrence(C(rho)). Entangled states and
/// states with sigma_1 = sum of the rest use the Takagi construction plus
/// orthogonal balancing; other separable states run the separability
/// minimizer at the optimal cardinality.
Ensemble optimal_ensemble_2x2(const DensityMatrix& rho, const OptimizerConfig& config = {});

/// Per-alpha l1 norms sum_k |(T^T A^(alpha) T)_kk|.
RealVector concurrence_vector(const AMatrixSet& a_set, const TMatrix& t);

struct NecessaryConditionResult {
  bool holds = true;
  double worst_ratio = 0.0;
  /// sigma_1 / sum_{i>=2} sigma_i per alpha (infinity for a vanishing
  /// denominator under a non-vanishing sigma_1).
  std::vector<double> ratios;
};

/// sigma_1(A^(alpha)) <= sum_{i>=2} sigma_i(A^(alpha)) for every alpha.
NecessaryConditionResult necessary_condition_per_alpha(const AMatrixSet& a_set);

/// Singular-value ratio sigma_1 / sum_{j>=2} sigma_j of a matrix, with the
/// degenerate-denominator convention above.
double singular_value_ratio(const RealVector& sigma);

struct GenConcResult {
  bool passes = true;
  double max_ratio = 0.0;
  ComplexVector argmax_x;
};

/// Maximizes the singular-value ratio of sum_alpha x_alpha A^(alpha) over
/// unit complex x by projected gradient ascent, started from every basis
/// vector and 20 random points. Requires full indicator mode.
GenConcResult genconc_criterion(const AMatrixSet& a_set, const OptimizerConfig& config = {});

/// Ratio for a fixed combination x.
double genconc_ratio(const AMatrixSet& a_set, const ComplexVector& x);

struct PreselectResult {
  std::vector<TMatrix> candidates;
  std::vector<double> objective_values;  ///< sep_objective_l2 per candidate
  std::optional<std::size_t> best;
  std::size_t null_dimension = 0;
  bool applicable = false;
};

/// Number of alpha tuples in full mode: n1(n1-1)/2 * n2(n2-1)/2.
std::size_t full_tuple_count(const BipartiteDims& dims);

/// K(K-1)/2 + K - P <= full_tuple_count(dims).
bool preselection_rank_condition(const BipartiteDims& dims, std::size_t k,
                                 std::size_t product_members);

/// Square-T preselection: solves sum_pq B_pq A^(alpha)_pq = 0 over symmetric
/// B and turns each solution into a unitary T from the eigenvectors of
/// B conj(B). `product_members` = 0 means P = K = rank.
PreselectResult preselect_T(const AMatrixSet& a_set, const DensityMatrix& rho,
                            std::size_t product_members = 0, std::uint64_t seed = kDefaultSeed);

}  // namespace eofsep
