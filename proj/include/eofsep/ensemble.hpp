#pragma once

#include "eofsep/linalg.hpp"
#include "eofsep/states.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace eofsep {

/// R x K right-unitary matrix (T T^dagger = I_R, K >= R) linking an ensemble
/// to the eigen-ensemble: Psi W^{1/2} = Phi M^{1/2} T.
class TMatrix {
 public:
  static constexpr double kUnitarityTolerance = 1e-8;

  /// Throws DimensionError when K < R and ValidityError when
  /// ||T T^dagger - I|| exceeds `tolerance`.
  explicit TMatrix(ComplexMatrix t, double tolerance = kUnitarityTolerance);

  /// Skips validation; for iterates produced by the unitary optimizer.
  static TMatrix trusted(ComplexMatrix t);
  static TMatrix identity(std::size_t r);
  /// First `r` rows of a square unitary.
  static TMatrix from_unitary(const ComplexMatrix& u, std::size_t r);

  std::size_t rank() const noexcept { return static_cast<std::size_t>(t_.rows()); }
  std::size_t cardinality() const noexcept { return static_cast<std::size_t>(t_.cols()); }
  const ComplexMatrix& matrix() const noexcept { return t_; }

 private:
  struct Unchecked {};
  TMatrix(ComplexMatrix t, Unchecked) : t_(std::move(t)) {}
  ComplexMatrix t_;
};

/// Members with weight below this are dropped from a reported ensemble.
inline constexpr double kNegligibleWeight = 1e-14;

struct Ensemble {
  BipartiteDims dims;
  std::vector<double> weights;
  std::vector<PureState> states;
  /// Column of T each member came from.
  std::vector<std::size_t> columns;

  std::size_t size() const noexcept { return weights.size(); }
  /// sum_k w_k psi_k psi_k^dagger
  ComplexMatrix density() const;
  double average_entanglement() const;
};

/// Splits the columns of Phi M^{1/2} T into weights (squared norms) and unit
/// vectors. Throws DimensionError when T's row count differs from rank(rho).
Ensemble ensemble_from_T(const DensityMatrix& rho, const TMatrix& t);

/// Matrix of all 2x2 minors, row pairs (i < i') and column pairs (j < j') in
/// lexicographic order.
ComplexMatrix second_compound(const ComplexMatrix& a);

enum class IndicatorMode {
  full,     ///< every tuple i < i', j < j'
  reduced,  ///< adjacent tuples (i, i+1, j, j+1) only
};

/// Index tuple alpha = (i, i', j, j'), zero-based.
struct IndexTuple {
  std::size_t i, i2, j, j2;
  friend bool operator==(const IndexTuple&, const IndexTuple&) = default;
};

/// Indicator matrices S^(alpha): x^T S y = C(x~, y~) + C(y~, x~) at tuple
/// alpha, where C(A, B) = A_ij B_i'j' - A_ij' B_i'j. Each S is stored through
/// its tuple; dense() materializes it.
class IndicatorSet {
 public:
  IndicatorSet(BipartiteDims dims, IndicatorMode mode = IndicatorMode::full);

  const BipartiteDims& dims() const noexcept { return dims_; }
  IndicatorMode mode() const noexcept { return mode_; }
  const std::vector<IndexTuple>& tuples() const noexcept { return tuples_; }
  std::size_t size() const noexcept { return tuples_.size(); }

  RealMatrix dense(std::size_t alpha) const;

  /// Composite indices of (ij), (i'j'), (ij'), (i'j) for a tuple.
  std::array<Eigen::Index, 4> corners(std::size_t alpha) const;

 private:
  BipartiteDims dims_;
  IndicatorMode mode_;
  std::vector<IndexTuple> tuples_;
};

/// Components (x^T S^(alpha) y) for unnormalized vectors.
ComplexVector bilinear_c(const ComplexVector& x, const ComplexVector& y,
                         const IndicatorSet& indicators);

/// Symmetrized bilinear minor form C(x, y), indexed like `mode`'s tuples.
ComplexVector symmetrized_c(const PureState& x, const PureState& y,
                            IndicatorMode mode = IndicatorMode::full);

/// Complex symmetric A^(alpha) = sqrt(M) Phi^T S^(alpha) Phi sqrt(M) on the
/// rank-R eigenspace.
struct AMatrixSet {
  BipartiteDims dims;
  IndicatorMode mode = IndicatorMode::full;
  std::size_t rank = 0;
  RealVector weights;  ///< eigenvalues m_p, p < R
  std::vector<IndexTuple> tuples;
  std::vector<ComplexMatrix> matrices;

  std::size_t size() const noexcept { return matrices.size(); }
};

AMatrixSet a_matrices(const DensityMatrix& rho, const IndicatorSet& indicators);

/// M x K matrix with entry (alpha, k) = (T^T A^(alpha) T)_kk.
ComplexMatrix minor_diagonals(const AMatrixSet& a_set, const TMatrix& t);

/// Ensemble weights w_k = (T^dagger M T)_kk.
RealVector ensemble_weights(const AMatrixSet& a_set, const TMatrix& t);

/// sum_{alpha,k} |(T^T A^(alpha) T)_kk|^2
double sep_objective_l2(const AMatrixSet& a_set, const TMatrix& t);

/// sum_{alpha,k} |(T^T A^(alpha) T)_kk|
double sep_objective_l1(const AMatrixSet& a_set, const TMatrix& t);

/// sum_{alpha,k} |(T^T A^(alpha) T)_kk / w_k|^2 over members with
/// non-negligible weight: the squared minors of the normalized members.
double sep_objective_l2_normalized(const AMatrixSet& a_set, const TMatrix& t);

}  // namespace eofsep
