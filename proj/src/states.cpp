#include "eofsep/states.hpp"

#include "eofsep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace eofsep {

namespace {

void require_unit_interval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1], got " + std::to_string(v));
  }
}

}  // namespace

void BipartiteDims::validate() const {
  if (n1 < 2 || n2 < 2) {
    throw DimensionError("bipartite dimensions must both be at least 2, got " +
                         std::to_string(n1) + "x" + std::to_string(n2));
  }
}

PureState::PureState(BipartiteDims dims, ComplexVector vector)
    : dims_(dims), vector_(std::move(vector)) {
  dims_.validate();
  if (static_cast<std::size_t>(vector_.size()) != dims_.total()) {
    throw DimensionError("pure state length " + std::to_string(vector_.size()) +
                         " does not match " + std::to_string(dims_.total()));
  }
  if (!vector_.allFinite()) throw ValidityError("pure state has non-finite entries");
  if (std::abs(vector_.norm() - 1.0) > 1e-12) {
    throw ValidityError("pure state is not normalized");
  }
}

PureState PureState::normalized(BipartiteDims dims, const ComplexVector& vector) {
  const double norm = vector.norm();
  if (!(norm > 0.0)) throw ValidityError("cannot normalize the zero vector");
  return PureState(dims, vector / norm);
}

DensityMatrix::DensityMatrix(BipartiteDims dims, const ComplexMatrix& matrix,
                             double rank_tolerance)
    : dims_(dims) {
  dims_.validate();
  const auto n = static_cast<Eigen::Index>(dims_.total());
  if (matrix.rows() != n || matrix.cols() != n) {
    throw DimensionError("density matrix must be " + std::to_string(n) + "x" +
                         std::to_string(n));
  }
  if (!matrix.allFinite()) throw ValidityError("density matrix has non-finite entries");
  const double herm = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kTolerance) {
    throw ValidityError("density matrix is not Hermitian (defect " + std::to_string(herm) + ")");
  }
  matrix_ = (matrix + matrix.adjoint()) / 2.0;
  const double trace = matrix_.trace().real();
  if (std::abs(trace - 1.0) > kTolerance) {
    throw ValidityError("density matrix trace is " + std::to_string(trace) + ", expected 1");
  }
  eigen_ = eig_hermitian(matrix_);
  if (eigen_.values(n - 1) < -kTolerance) {
    throw ValidityError("density matrix has negative eigenvalue " +
                        std::to_string(eigen_.values(n - 1)));
  }
  const double cutoff = rank_tolerance * std::max(eigen_.values(0), 0.0);
  rank_ = 0;
  while (rank_ < dims_.total() &&
         eigen_.values(static_cast<Eigen::Index>(rank_)) > cutoff) {
    ++rank_;
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return DensityMatrix(psi.dims(), psi.vector() * psi.vector().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(BipartiteDims dims) {
  dims.validate();
  const auto n = static_cast<Eigen::Index>(dims.total());
  return DensityMatrix(dims, ComplexMatrix::Identity(n, n) / static_cast<double>(n));
}

RealVector DensityMatrix::support_weights() const {
  return eigen_.values.head(static_cast<Eigen::Index>(rank_)).cwiseMax(0.0);
}

ComplexMatrix DensityMatrix::scaled_support() const {
  const auto r = static_cast<Eigen::Index>(rank_);
  const RealVector root = support_weights().cwiseSqrt();
  return eigen_.vectors.leftCols(r) * root.cast<Complex>().asDiagonal();
}

ComplexMatrix tilde_reshape(const ComplexVector& x, BipartiteDims dims) {
  if (static_cast<std::size_t>(x.size()) != dims.total()) {
    throw DimensionError("tilde_reshape: vector length " + std::to_string(x.size()) +
                         " does not match " + std::to_string(dims.n1) + "x" +
                         std::to_string(dims.n2));
  }
  const auto n1 = static_cast<Eigen::Index>(dims.n1);
  const auto n2 = static_cast<Eigen::Index>(dims.n2);
  ComplexMatrix out(n1, n2);
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index j = 0; j < n2; ++j) out(i, j) = x(i * n2 + j);
  }
  return out;
}

ComplexVector untilde(const ComplexMatrix& x) {
  ComplexVector out(x.size());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) out(i * x.cols() + j) = x(i, j);
  }
  return out;
}

ComplexMatrix partial_trace_B(const PureState& psi) {
  const ComplexMatrix t = tilde_reshape(psi.vector(), psi.dims());
  return t * t.adjoint();
}

double pure_entanglement(const PureState& psi) {
  const RealVector s = singular_values(tilde_reshape(psi.vector(), psi.dims()));
  return entropy_bits(s.cwiseAbs2());
}

ComplexMatrix partial_transpose_B(const ComplexMatrix& rho, BipartiteDims dims) {
  const auto n1 = static_cast<Eigen::Index>(dims.n1);
  const auto n2 = static_cast<Eigen::Index>(dims.n2);
  if (rho.rows() != n1 * n2 || rho.cols() != n1 * n2) {
    throw DimensionError("partial_transpose_B: operator does not match dimensions");
  }
  ComplexMatrix out(rho.rows(), rho.cols());
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n2; ++j)
      for (Eigen::Index k = 0; k < n1; ++k)
        for (Eigen::Index l = 0; l < n2; ++l)
          out(i * n2 + j, k * n2 + l) = rho(i * n2 + l, k * n2 + j);
  return out;
}

ComplexMatrix partial_transpose_A(const ComplexMatrix& rho, BipartiteDims dims) {
  const auto n1 = static_cast<Eigen::Index>(dims.n1);
  const auto n2 = static_cast<Eigen::Index>(dims.n2);
  if (rho.rows() != n1 * n2 || rho.cols() != n1 * n2) {
    throw DimensionError("partial_transpose_A: operator does not match dimensions");
  }
  ComplexMatrix out(rho.rows(), rho.cols());
  for (Eigen::Index i = 0; i < n1; ++i)
    for (Eigen::Index j = 0; j < n2; ++j)
      for (Eigen::Index k = 0; k < n1; ++k)
        for (Eigen::Index l = 0; l < n2; ++l)
          out(i * n2 + j, k * n2 + l) = rho(k * n2 + j, i * n2 + l);
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

PeresResult peres_test(const DensityMatrix& rho) {
  const RealVector eig = eigvals_hermitian(partial_transpose_B(rho.matrix(), rho.dims()));
  const double min_eig = eig(eig.size() - 1);
  return {min_eig >= -DensityMatrix::kTolerance, min_eig};
}

DensityMatrix horodecki_state(double a) {
  require_unit_interval(a, "horodecki_state: a");
  const double b = (1.0 + a) / 2.0;
  const double c = std::sqrt(1.0 - a * a) / 2.0;
  ComplexMatrix m = ComplexMatrix::Zero(9, 9);
  for (int i = 0; i < 9; ++i) m(i, i) = a;
  for (int i : {0, 4, 8})
    for (int j : {0, 4, 8}) m(i, j) = a;
  m(6, 6) = b;
  m(8, 8) = b;
  m(6, 8) = c;
  m(8, 6) = c;
  return DensityMatrix({3, 3}, m / (1.0 + 8.0 * a));
}

DensityMatrix mix_with_identity(const DensityMatrix& rho, double e) {
  require_unit_interval(e, "mix_with_identity: e");
  const auto n = rho.matrix().rows();
  return DensityMatrix(rho.dims(), e * rho.matrix() + (1.0 - e) / static_cast<double>(n) *
                                                          ComplexMatrix::Identity(n, n));
}

PureState maximally_entangled(std::size_t n) {
  BipartiteDims dims{n, n};
  dims.validate();
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(n * n));
  for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i * n + i)) = 1.0;
  return PureState::normalized(dims, v);
}

PureState singlet() {
  ComplexVector v = ComplexVector::Zero(4);
  v(1) = 1.0;
  v(2) = -1.0;
  return PureState::normalized({2, 2}, v);
}

DensityMatrix isotropic_state(double f, std::size_t n) {
  require_unit_interval(f, "isotropic_state: f");
  const PureState phi = maximally_entangled(n);
  const auto dim = static_cast<Eigen::Index>(n * n);
  const ComplexMatrix p = phi.vector() * phi.vector().adjoint();
  const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
  return DensityMatrix({n, n}, f * p + (1.0 - f) / static_cast<double>(dim - 1) * (id - p));
}

}  // namespace eofsep
