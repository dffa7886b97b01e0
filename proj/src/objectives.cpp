#include "eofsep/objectives.hpp"

#include "eofsep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace eofsep {

namespace {

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// log2(lambda / w) for every eigenvalue, with the dominant term computed as
// log1p(-rest / w) so that nearly pure members keep full relative accuracy.
RealVector log_ratios(const RealVector& lambda, double w) {
  RealVector out(lambda.size());
  Eigen::Index top = 0;
  lambda.maxCoeff(&top);
  double rest = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double l = std::max(lambda(i), 0.0);
    if (i != top) rest += l;
    out(i) = std::log2(std::max(l, kEntropyClamp) / w);
  }
  out(top) = std::log1p(-std::min(rest / w, 1.0 - 1e-300)) / std::numbers::ln2;
  if (lambda(top) <= kEntropyClamp) out(top) = std::log2(kEntropyClamp / w);
  return out;
}

}  // namespace

double weighted_member_entropy(const RealVector& eigenvalues) {
  const double w = eigenvalues.cwiseMax(0.0).sum();
  if (!(w > 0.0)) return 0.0;
  const RealVector logs = log_ratios(eigenvalues, w);
  double g = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues(i) > kEntropyClamp) g -= eigenvalues(i) * logs(i);
  }
  return std::max(g, 0.0);
}

std::size_t default_cardinality(std::size_t rank) {
  return std::max(rank, std::min<std::size_t>(rank * rank, 16));
}

EofObjective::EofObjective(const DensityMatrix& rho, std::size_t k, bool enforce_uhlmann_range)
    : dims_(rho.dims()), rank_(rho.rank()), k_(k), support_(rho.scaled_support()) {
  if (k_ < rank_) {
    throw DomainError("cardinality " + std::to_string(k_) + " is below the rank " +
                      std::to_string(rank_));
  }
  if (enforce_uhlmann_range && k_ > rank_ * rank_) {
    throw DomainError("cardinality " + std::to_string(k_) + " exceeds rank^2 = " +
                      std::to_string(rank_ * rank_));
  }
}

void EofObjective::require_shape(const ComplexMatrix& t) const {
  const auto k = static_cast<Eigen::Index>(k_);
  if (t.rows() != k || t.cols() != k) {
    throw DimensionError("EoF objective expects a " + std::to_string(k_) + "x" +
                         std::to_string(k_) + " unitary");
  }
}

double EofObjective::value(const ComplexMatrix& t) const {
  require_shape(t);
  const auto n1 = static_cast<Eigen::Index>(dims_.n1);
  const auto n2 = static_cast<Eigen::Index>(dims_.n2);
  const ComplexMatrix y = support_ * t.topRows(static_cast<Eigen::Index>(rank_));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver;
  double total = 0.0;
  for (Eigen::Index k = 0; k < y.cols(); ++k) {
    const RowMajorMap member(y.col(k).data(), n1, n2);
    const ComplexMatrix delta =
        n1 <= n2 ? ComplexMatrix(member * member.adjoint()) : ComplexMatrix(member.adjoint() * member);
    solver.compute(delta, Eigen::EigenvaluesOnly);
    total += weighted_member_entropy(solver.eigenvalues());
  }
  return total;
}

double EofObjective::value_and_gradient(const ComplexMatrix& t, ComplexMatrix& gradient) const {
  require_shape(t);
  const auto n1 = static_cast<Eigen::Index>(dims_.n1);
  const auto n2 = static_cast<Eigen::Index>(dims_.n2);
  const ComplexMatrix y = support_ * t.topRows(static_cast<Eigen::Index>(rank_));

  // Column k of `weighted` holds vec(L_k y~_k) with L_k = log2(Delta_k / w_k).
  // Then d g = -2 Re sum_pk X_pk Tr(y~_k^dagger L_k y~_p).
  ComplexMatrix weighted = ComplexMatrix::Zero(y.rows(), y.cols());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver;
  double total = 0.0;
  for (Eigen::Index k = 0; k < y.cols(); ++k) {
    const RowMajorMap member(y.col(k).data(), n1, n2);
    const double w = y.col(k).squaredNorm();
    if (!(w > 0.0)) continue;
    const bool left = n1 <= n2;
    const ComplexMatrix delta =
        left ? ComplexMatrix(member * member.adjoint()) : ComplexMatrix(member.adjoint() * member);
    solver.compute(delta);
    const RealVector& lambda = solver.eigenvalues();
    total += weighted_member_entropy(lambda);
    const RealVector logs = log_ratios(lambda, lambda.cwiseMax(0.0).sum());
    const ComplexMatrix& v = solver.eigenvectors();
    const ComplexMatrix log_delta = v * logs.cast<Complex>().asDiagonal() * v.adjoint();
    const ComplexMatrix lw = left ? ComplexMatrix(log_delta * member) : ComplexMatrix(member * log_delta);
    for (Eigen::Index i = 0; i < n1; ++i) {
      for (Eigen::Index j = 0; j < n2; ++j) weighted(i * n2 + j, k) = lw(i, j);
    }
  }
  const ComplexMatrix c = y.transpose() * weighted.conjugate();
  const ComplexMatrix e = -2.0 * c.conjugate();
  gradient = skew_hermitian_part(e);
  return total;
}

SepObjective::SepObjective(AMatrixSet a_set, std::size_t k) : a_set_(std::move(a_set)), k_(k) {
  if (k_ < a_set_.rank) {
    throw DomainError("cardinality " + std::to_string(k_) + " is below the rank " +
                      std::to_string(a_set_.rank));
  }
}

void SepObjective::require_shape(const ComplexMatrix& t) const {
  const auto k = static_cast<Eigen::Index>(k_);
  if (t.rows() != k || t.cols() != k) {
    throw DimensionError("separability objective expects a " + std::to_string(k_) + "x" +
                         std::to_string(k_) + " unitary");
  }
}

double SepObjective::value(const ComplexMatrix& t) const {
  require_shape(t);
  return sep_objective_l2(a_set_, TMatrix::trusted(t.topRows(static_cast<Eigen::Index>(a_set_.rank))));
}

double SepObjective::value_and_gradient(const ComplexMatrix& t, ComplexMatrix& gradient) const {
  require_shape(t);
  const auto r = static_cast<Eigen::Index>(a_set_.rank);
  const auto top = t.topRows(r);
  // With B = T^T A T and d_k = B_kk:  d f = Re sum_pk X_pk 4 conj(d_k) B_pk.
  ComplexMatrix c = ComplexMatrix::Zero(t.cols(), t.cols());
  double total = 0.0;
  for (const ComplexMatrix& a : a_set_.matrices) {
    const ComplexMatrix b = top.transpose() * (a * top);
    const ComplexVector d = b.diagonal();
    total += d.squaredNorm();
    c.noalias() += 4.0 * b * d.conjugate().asDiagonal();
  }
  gradient = skew_hermitian_part(c.conjugate());
  return total;
}

double eof_objective(const DensityMatrix& rho, const ComplexMatrix& t, bool enforce_uhlmann_range) {
  return EofObjective(rho, static_cast<std::size_t>(t.rows()), enforce_uhlmann_range).value(t);
}

ComplexMatrix eof_gradient(const DensityMatrix& rho, const ComplexMatrix& t,
                           bool enforce_uhlmann_range) {
  ComplexMatrix g;
  EofObjective(rho, static_cast<std::size_t>(t.rows()), enforce_uhlmann_range)
      .value_and_gradient(t, g);
  return g;
}

}  // namespace eofsep
