#include "eofsep/linalg.hpp"

#include "eofsep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace eofsep {

namespace {

void require_square(const ComplexMatrix& a, std::string_view what) {
  if (a.rows() != a.cols()) {
    throw DimensionError(std::string(what) + ": matrix is " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
  }
}

std::vector<Eigen::Index> descending_order(const RealVector& values) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index l, Eigen::Index r) {
                     return values(l) > values(r);
                   });
  return order;
}

}  // namespace

void require_finite(const ComplexMatrix& a, std::string_view what) {
  if (!a.allFinite()) {
    throw DimensionError(std::string(what) + ": non-finite entry");
  }
}

HermitianEigen eig_hermitian(const ComplexMatrix& a) {
  require_square(a, "eig_hermitian");
  const ComplexMatrix h = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("eig_hermitian: eigensolver did not converge");
  }
  const auto order = descending_order(solver.eigenvalues());
  HermitianEigen out{RealVector(h.rows()), ComplexMatrix(h.rows(), h.cols())};
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    out.values(idx) = solver.eigenvalues()(order[i]);
    out.vectors.col(idx) = solver.eigenvectors().col(order[i]);
  }
  return out;
}

RealVector eigvals_hermitian(const ComplexMatrix& a) {
  require_square(a, "eigvals_hermitian");
  const ComplexMatrix h = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().reverse();
}

SingularValueDecomposition svd(const ComplexMatrix& a) {
  Eigen::JacobiSVD<ComplexMatrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

RealVector singular_values(const ComplexMatrix& a) {
  Eigen::JacobiSVD<ComplexMatrix> solver(a);
  return solver.singularValues();
}

TakagiFactors takagi(const ComplexMatrix& a) {
  require_square(a, "takagi");
  if ((a - a.transpose()).norm() > 1e-10) {
    throw ShapeError("takagi: input is not complex symmetric");
  }
  const Eigen::Index n = a.rows();
  if (n == 0) return {ComplexMatrix(0, 0), RealVector(0)};

  // With a = q Diag(sigma) q^T and a column q_j = x + i y, the real vector
  // (x, y) is an eigenvector of [[Re a, Im a], [Im a, -Re a]] for +sigma_j.
  // The spectrum of that embedding is symmetric, so the top half carries the
  // Takagi values.
  const ComplexMatrix sym = (a + a.transpose()) / 2.0;
  RealMatrix embed(2 * n, 2 * n);
  embed << sym.real(), sym.imag(), sym.imag(), -sym.real();
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(embed);

  RealVector sigma(n);
  ComplexMatrix q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index idx = 2 * n - 1 - i;
    sigma(i) = std::max(0.0, solver.eigenvalues()(idx));
    const auto v = solver.eigenvectors().col(idx);
    q.col(i) = v.head(n).cast<Complex>() + Complex(0.0, 1.0) * v.tail(n).cast<Complex>();
  }

  const double tol = 64.0 * std::numeric_limits<double>::epsilon() *
                     static_cast<double>(n) * std::max(sigma(0), 1e-300);
  Eigen::Index positive = 0;
  while (positive < n && sigma(positive) > tol) ++positive;

  if (positive < n) {
    // The kernel pairs (v, Jv) mix arbitrarily in the embedding; take the
    // conjugated kernel of a instead, which is orthogonal to range(a).
    Eigen::JacobiSVD<ComplexMatrix> kernel(sym, Eigen::ComputeFullV);
    ComplexMatrix null = kernel.matrixV().rightCols(n - positive).conjugate();
    const auto pos = q.leftCols(positive);
    null -= pos * (pos.adjoint() * null);
    Eigen::HouseholderQR<ComplexMatrix> qr(null);
    q.rightCols(n - positive) =
        qr.householderQ() * ComplexMatrix::Identity(n, n - positive);
    sigma.tail(n - positive).setZero();
  }
  return {q.transpose(), sigma};
}

ComplexMatrix expm_skew_hermitian(const ComplexMatrix& x, double t) {
  return SkewExponential(x)(t);
}

SkewExponential::SkewExponential(const ComplexMatrix& x) {
  require_square(x, "expm_skew_hermitian");
  if ((x + x.adjoint()).norm() > 1e-10) {
    throw ShapeError("expm_skew_hermitian: generator is not skew-Hermitian");
  }
  // x = -i h with h = i x Hermitian.
  const ComplexMatrix h = Complex(0.0, 1.0) * (x - x.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  vectors_ = solver.eigenvectors();
  frequencies_ = solver.eigenvalues();
  radius_ = frequencies_.size() > 0 ? frequencies_.cwiseAbs().maxCoeff() : 0.0;
}

ComplexMatrix SkewExponential::operator()(double t) const {
  ComplexVector phases(frequencies_.size());
  for (Eigen::Index i = 0; i < frequencies_.size(); ++i) {
    phases(i) = std::polar(1.0, -t * frequencies_(i));
  }
  return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

ComplexMatrix random_gaussian(std::size_t rows, std::size_t cols,
                              std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

ComplexMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
  if (n == 0) throw DimensionError("random_unitary: n must be at least 1");
  const ComplexMatrix g = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const double mod = std::abs(r(j, j));
    if (mod > 0.0) q.col(j) *= r(j, j) / mod;
  }
  return q;
}

ComplexMatrix random_unitary(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_unitary(n, rng);
}

double unitarity_defect(const ComplexMatrix& u) {
  return (u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.rows())).norm();
}

ComplexMatrix nearest_unitary(const ComplexMatrix& a) {
  Eigen::JacobiSVD<ComplexMatrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return solver.matrixU() * solver.matrixV().adjoint();
}

double hs_inner(const ComplexMatrix& x, const ComplexMatrix& y) {
  // Re Tr(x y^dagger) = Re sum_ij x_ij conj(y_ij)
  return (x.array() * y.array().conjugate()).real().sum();
}

ComplexMatrix skew_hermitian_part(const ComplexMatrix& a) {
  return (a - a.adjoint()) / 2.0;
}

double binary_h(double x) {
  return x > 0.0 ? -x * std::log2(x) : 0.0;
}

double entropy_bits(const RealVector& eigenvalues, double floor) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues(i) > floor) h += binary_h(eigenvalues(i));
  }
  return h;
}

}  // namespace eofsep
