#pragma once

#include "eofsep/linalg.hpp"

#include <cstddef>

namespace eofsep {

/// Local dimensions of a bipartite system. Composite basis index of
/// e^i (x) e^j is i * n2 + j (zero-based) throughout the library.
struct BipartiteDims {
  std::size_t n1 = 2;
  std::size_t n2 = 2;

  /// Throws DimensionError unless both factors are at least 2.
  void validate() const;
  std::size_t total() const noexcept { return n1 * n2; }
  friend bool operator==(const BipartiteDims&, const BipartiteDims&) = default;
};

/// Unit vector on the composite space.
class PureState {
 public:
  /// Requires ||vector|| = 1 within 1e-12.
  PureState(BipartiteDims dims, ComplexVector vector);

  /// Rescales `vector` to unit norm; throws ValidityError for the zero vector.
  static PureState normalized(BipartiteDims dims, const ComplexVector& vector);

  const BipartiteDims& dims() const noexcept { return dims_; }
  const ComplexVector& vector() const noexcept { return vector_; }

 private:
  BipartiteDims dims_;
  ComplexVector vector_;
};

/// Hermitian, positive semidefinite, unit-trace operator with its
/// eigendecomposition cached at construction.
class DensityMatrix {
 public:
  static constexpr double kTolerance = 1e-10;

  /// Validates Hermiticity, positivity and trace, all within 1e-10, and
  /// stores the Hermitian part. The rank counts eigenvalues above
  /// rank_tolerance * largest eigenvalue.
  DensityMatrix(BipartiteDims dims, const ComplexMatrix& matrix,
                double rank_tolerance = kTolerance);

  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(BipartiteDims dims);

  const BipartiteDims& dims() const noexcept { return dims_; }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  std::size_t rank() const noexcept { return rank_; }
  /// All eigenvalues, descending.
  const RealVector& eigenvalues() const noexcept { return eigen_.values; }
  /// Eigenvectors as columns, matching eigenvalues().
  const ComplexMatrix& eigenvectors() const noexcept { return eigen_.vectors; }

  /// The rank-R eigen-ensemble weights m_p (clamped at zero).
  RealVector support_weights() const;
  /// Phi_R * M_R^{1/2}: columns sqrt(m_p) phi^p for p < R.
  ComplexMatrix scaled_support() const;

 private:
  BipartiteDims dims_;
  ComplexMatrix matrix_;
  HermitianEigen eigen_;
  std::size_t rank_ = 0;
};

/// x~ with x~(i, j) = x(i * n2 + j).
ComplexMatrix tilde_reshape(const ComplexVector& x, BipartiteDims dims);

/// Inverse of tilde_reshape.
ComplexVector untilde(const ComplexMatrix& x);

/// Reduced state on A: x~ x~^dagger.
ComplexMatrix partial_trace_B(const PureState& psi);

/// Entanglement entropy in bits of the reduced state.
double pure_entanglement(const PureState& psi);

/// Transposes the B factor of an operator on the composite space.
ComplexMatrix partial_transpose_B(const ComplexMatrix& rho, BipartiteDims dims);
ComplexMatrix partial_transpose_A(const ComplexMatrix& rho, BipartiteDims dims);

/// Product operator a (x) b in the library's composite ordering.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);

struct PeresResult {
  bool is_ppt = true;
  double min_eigenvalue = 0.0;
};

/// Partial transpose on B; positive when the smallest eigenvalue is at least
/// -1e-10.
PeresResult peres_test(const DensityMatrix& rho);

/// 3x3 bound-entangled family rho(a), a in [0, 1].
DensityMatrix horodecki_state(double a);

/// e * rho + (1 - e) * I / (n1 n2), e in [0, 1].
DensityMatrix mix_with_identity(const DensityMatrix& rho, double e);

/// f * P+ + (1 - f) (I - P+) / (n^2 - 1) on an n x n system, f in [0, 1].
DensityMatrix isotropic_state(double f, std::size_t n);

/// sum_i |ii> / sqrt(n).
PureState maximally_entangled(std::size_t n);

/// (|01> - |10>) / sqrt(2).
PureState singlet();

}  // namespace eofsep
