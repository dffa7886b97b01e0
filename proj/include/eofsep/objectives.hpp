#pragma once

#include "eofsep/ensemble.hpp"
#include "eofsep/linalg.hpp"
#include "eofsep/states.hpp"

#include <cstddef>

namespace eofsep {

// Objectives over square K x K unitaries T. Only the first R rows of T enter
// (the eigen-ensemble is padded with zero vectors beyond the rank). Gradients
// are skew-Hermitian and satisfy
//
//   d/de f(T exp(e X)) at e = 0  ==  Re Tr(grad X^dagger)
//
// for every skew-Hermitian X.

/// Eigenvalues of the reduced member states below this do not contribute to
/// entropies and are clamped to it inside logarithms.
inline constexpr double kEntropyClamp = 1e-15;

/// G(A) = -Tr A log2(A / Tr A); the weighted entanglement of one member,
/// computed from the spectrum of A. Zero when Tr A vanishes.
double weighted_member_entropy(const RealVector& eigenvalues);

/// Sum_k G(Delta_k(T)): the average entanglement of the ensemble generated by
/// T, Delta_k(T) = sum_pq T_pk conj(T_qk) sqrt(m_p m_q) phi~p (phi~q)^dagger.
class EofObjective {
 public:
  /// Throws DomainError unless rank <= k <= rank^2 (skipped when
  /// `enforce_uhlmann_range` is false).
  EofObjective(const DensityMatrix& rho, std::size_t k, bool enforce_uhlmann_range = true);

  std::size_t cardinality() const noexcept { return k_; }
  std::size_t rank() const noexcept { return rank_; }

  double value(const ComplexMatrix& t) const;
  double value_and_gradient(const ComplexMatrix& t, ComplexMatrix& gradient) const;

 private:
  void require_shape(const ComplexMatrix& t) const;

  BipartiteDims dims_;
  std::size_t rank_;
  std::size_t k_;
  ComplexMatrix support_;  // Phi_R M_R^{1/2}
};

/// sum_{alpha,k} |(T^T A^(alpha) T)_kk|^2 with A zero-padded to K x K.
class SepObjective {
 public:
  SepObjective(AMatrixSet a_set, std::size_t k);

  std::size_t cardinality() const noexcept { return k_; }
  const AMatrixSet& a_matrices() const noexcept { return a_set_; }

  double value(const ComplexMatrix& t) const;
  double value_and_gradient(const ComplexMatrix& t, ComplexMatrix& gradient) const;

 private:
  void require_shape(const ComplexMatrix& t) const;

  AMatrixSet a_set_;
  std::size_t k_;
};

double eof_objective(const DensityMatrix& rho, const ComplexMatrix& t,
                     bool enforce_uhlmann_range = true);
ComplexMatrix eof_gradient(const DensityMatrix& rho, const ComplexMatrix& t,
                           bool enforce_uhlmann_range = true);

/// max(R, min(R^2, 16))
std::size_t default_cardinality(std::size_t rank);

}  // namespace eofsep
