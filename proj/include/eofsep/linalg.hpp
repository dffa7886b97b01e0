#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace eofsep {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Throws DimensionError naming `what` unless every entry is finite.
void require_finite(const ComplexMatrix& a, std::string_view what);

/// a = vectors * Diag(values) * vectors^dagger, values descending.
struct HermitianEigen {
  RealVector values;
  ComplexMatrix vectors;
};

/// a = u * Diag(sigma) * v^dagger, sigma descending. u and v are square.
struct SingularValueDecomposition {
  ComplexMatrix u;
  RealVector sigma;
  ComplexMatrix v;
};

/// Takagi factorization a = u^T * Diag(sigma) * u of a complex symmetric
/// matrix, u unitary, sigma descending.
struct TakagiFactors {
  ComplexMatrix u;
  RealVector sigma;
};

/// Eigendecomposition of the Hermitian part (a + a^dagger)/2. Ties keep the
/// solver's index order.
HermitianEigen eig_hermitian(const ComplexMatrix& a);

/// Eigenvalues only, descending.
RealVector eigvals_hermitian(const ComplexMatrix& a);

SingularValueDecomposition svd(const ComplexMatrix& a);

RealVector singular_values(const ComplexMatrix& a);

/// Requires ||a - a^T||_F <= 1e-10; throws ShapeError otherwise.
TakagiFactors takagi(const ComplexMatrix& a);

/// exp(t x) for skew-Hermitian x (||x + x^dagger||_F <= 1e-10, else
/// ShapeError). Computed through the spectrum of the Hermitian matrix i x, so
/// the result is unitary to working precision.
ComplexMatrix expm_skew_hermitian(const ComplexMatrix& x, double t);

/// Caches the spectral decomposition of a skew-Hermitian generator so that
/// exp(t x) can be evaluated cheaply for many t along a geodesic.
class SkewExponential {
 public:
  explicit SkewExponential(const ComplexMatrix& x);

  ComplexMatrix operator()(double t) const;

  /// Largest modulus of the (purely imaginary) eigenvalues of x.
  double spectral_radius() const noexcept { return radius_; }

 private:
  ComplexMatrix vectors_;
  RealVector frequencies_;
  double radius_ = 0.0;
};

/// Haar-distributed unitary from the QR factorization of a complex Ginibre
/// matrix with phase-corrected R. Deterministic for a fixed seed.
ComplexMatrix random_unitary(std::size_t n, std::uint64_t seed);
ComplexMatrix random_unitary(std::size_t n, std::mt19937_64& rng);

/// Standard complex Gaussian matrix (E|z|^2 = 1).
ComplexMatrix random_gaussian(std::size_t rows, std::size_t cols,
                              std::mt19937_64& rng);

/// Frobenius norm of u u^dagger - I.
double unitarity_defect(const ComplexMatrix& u);

/// Nearest unitary matrix in Frobenius norm (polar factor).
ComplexMatrix nearest_unitary(const ComplexMatrix& a);

/// Real part of Tr(x y^dagger).
double hs_inner(const ComplexMatrix& x, const ComplexMatrix& y);

/// (a - a^dagger) / 2.
ComplexMatrix skew_hermitian_part(const ComplexMatrix& a);

/// h(x) = -x log2 x with h(0) = 0.
double binary_h(double x);

/// Von Neumann entropy in bits of a spectrum; entries at or below `floor`
/// contribute nothing.
double entropy_bits(const RealVector& eigenvalues, double floor = 1e-15);

}  // namespace eofsep
