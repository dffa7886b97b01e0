#include "eofsep/ensemble.hpp"

#include "eofsep/errors.hpp"

#include <cmath>
#include <string>

namespace eofsep {

TMatrix::TMatrix(ComplexMatrix t, double tolerance) : t_(std::move(t)) {
  if (t_.rows() == 0 || t_.cols() < t_.rows()) {
    throw DimensionError("T must be R x K with 1 <= R <= K, got " + std::to_string(t_.rows()) +
                         "x" + std::to_string(t_.cols()));
  }
  require_finite(t_, "TMatrix");
  const double defect = unitarity_defect(t_);
  if (defect > tolerance) {
    throw ValidityError("T is not right-unitary (defect " + std::to_string(defect) + ")");
  }
}

TMatrix TMatrix::trusted(ComplexMatrix t) { return TMatrix(std::move(t), Unchecked{}); }

TMatrix TMatrix::identity(std::size_t r) {
  const auto n = static_cast<Eigen::Index>(r);
  return TMatrix(ComplexMatrix::Identity(n, n));
}

TMatrix TMatrix::from_unitary(const ComplexMatrix& u, std::size_t r) {
  return TMatrix(u.topRows(static_cast<Eigen::Index>(r)));
}

ComplexMatrix Ensemble::density() const {
  const auto n = static_cast<Eigen::Index>(dims.total());
  ComplexMatrix rho = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k < size(); ++k) {
    rho += weights[k] * states[k].vector() * states[k].vector().adjoint();
  }
  return rho;
}

double Ensemble::average_entanglement() const {
  double e = 0.0;
  for (std::size_t k = 0; k < size(); ++k) e += weights[k] * pure_entanglement(states[k]);
  return e;
}

Ensemble ensemble_from_T(const DensityMatrix& rho, const TMatrix& t) {
  if (t.rank() != rho.rank()) {
    throw DimensionError("T has " + std::to_string(t.rank()) + " rows but the state has rank " +
                         std::to_string(rho.rank()));
  }
  const double defect = unitarity_defect(t.matrix());
  if (defect > TMatrix::kUnitarityTolerance) {
    throw ValidityError("T is not right-unitary (defect " + std::to_string(defect) + ")");
  }
  const ComplexMatrix columns = rho.scaled_support() * t.matrix();
  Ensemble out{rho.dims(), {}, {}, {}};
  for (Eigen::Index k = 0; k < columns.cols(); ++k) {
    const double w = columns.col(k).squaredNorm();
    if (w < kNegligibleWeight) continue;
    out.weights.push_back(w);
    out.states.push_back(PureState::normalized(rho.dims(), columns.col(k)));
    out.columns.push_back(static_cast<std::size_t>(k));
  }
  return out;
}

ComplexMatrix second_compound(const ComplexMatrix& a) {
  const Eigen::Index n1 = a.rows();
  const Eigen::Index n2 = a.cols();
  if (n1 < 2 || n2 < 2) {
    throw DimensionError("second_compound: both dimensions must be at least 2");
  }
  ComplexMatrix out(n1 * (n1 - 1) / 2, n2 * (n2 - 1) / 2);
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index i2 = i + 1; i2 < n1; ++i2, ++row) {
      Eigen::Index col = 0;
      for (Eigen::Index j = 0; j < n2; ++j) {
        for (Eigen::Index j2 = j + 1; j2 < n2; ++j2, ++col) {
          out(row, col) = a(i, j) * a(i2, j2) - a(i, j2) * a(i2, j);
        }
      }
    }
  }
  return out;
}

IndicatorSet::IndicatorSet(BipartiteDims dims, IndicatorMode mode) : dims_(dims), mode_(mode) {
  dims_.validate();
  for (std::size_t i = 0; i < dims_.n1; ++i) {
    for (std::size_t i2 = i + 1; i2 < dims_.n1; ++i2) {
      if (mode_ == IndicatorMode::reduced && i2 != i + 1) continue;
      for (std::size_t j = 0; j < dims_.n2; ++j) {
        for (std::size_t j2 = j + 1; j2 < dims_.n2; ++j2) {
          if (mode_ == IndicatorMode::reduced && j2 != j + 1) continue;
          tuples_.push_back({i, i2, j, j2});
        }
      }
    }
  }
}

std::array<Eigen::Index, 4> IndicatorSet::corners(std::size_t alpha) const {
  const IndexTuple& t = tuples_.at(alpha);
  const auto idx = [&](std::size_t i, std::size_t j) {
    return static_cast<Eigen::Index>(i * dims_.n2 + j);
  };
  return {idx(t.i, t.j), idx(t.i2, t.j2), idx(t.i, t.j2), idx(t.i2, t.j)};
}

RealMatrix IndicatorSet::dense(std::size_t alpha) const {
  const auto n = static_cast<Eigen::Index>(dims_.total());
  const auto [ij, i2j2, ij2, i2j] = corners(alpha);
  RealMatrix s = RealMatrix::Zero(n, n);
  s(ij, i2j2) = s(i2j2, ij) = 1.0;
  s(ij2, i2j) = s(i2j, ij2) = -1.0;
  return s;
}

ComplexVector bilinear_c(const ComplexVector& x, const ComplexVector& y,
                         const IndicatorSet& indicators) {
  const auto n = static_cast<Eigen::Index>(indicators.dims().total());
  if (x.size() != n || y.size() != n) {
    throw DimensionError("bilinear_c: vector length does not match indicator dimensions");
  }
  ComplexVector out(static_cast<Eigen::Index>(indicators.size()));
  for (std::size_t a = 0; a < indicators.size(); ++a) {
    const auto [ij, i2j2, ij2, i2j] = indicators.corners(a);
    out(static_cast<Eigen::Index>(a)) =
        x(ij) * y(i2j2) + x(i2j2) * y(ij) - x(ij2) * y(i2j) - x(i2j) * y(ij2);
  }
  return out;
}

ComplexVector symmetrized_c(const PureState& x, const PureState& y, IndicatorMode mode) {
  if (!(x.dims() == y.dims())) throw DimensionError("symmetrized_c: dimension mismatch");
  return bilinear_c(x.vector(), y.vector(), IndicatorSet(x.dims(), mode));
}

AMatrixSet a_matrices(const DensityMatrix& rho, const IndicatorSet& indicators) {
  if (!(rho.dims() == indicators.dims())) {
    throw DimensionError("a_matrices: indicator dimensions do not match the state");
  }
  const ComplexMatrix y = rho.scaled_support();
  AMatrixSet out;
  out.dims = rho.dims();
  out.mode = indicators.mode();
  out.rank = rho.rank();
  out.weights = rho.support_weights();
  out.tuples = indicators.tuples();
  out.matrices.reserve(indicators.size());
  for (std::size_t a = 0; a < indicators.size(); ++a) {
    const auto [ij, i2j2, ij2, i2j] = indicators.corners(a);
    const auto u = y.row(ij).transpose();
    const auto v = y.row(i2j2).transpose();
    const auto w = y.row(ij2).transpose();
    const auto z = y.row(i2j).transpose();
    out.matrices.push_back(u * v.transpose() + v * u.transpose() - w * z.transpose() -
                           z * w.transpose());
  }
  return out;
}

namespace {

void require_rank(const AMatrixSet& a_set, const TMatrix& t, const char* what) {
  if (t.rank() != a_set.rank) {
    throw DimensionError(std::string(what) + ": T has " + std::to_string(t.rank()) +
                         " rows, A-matrices have rank " + std::to_string(a_set.rank));
  }
}

}  // namespace

ComplexMatrix minor_diagonals(const AMatrixSet& a_set, const TMatrix& t) {
  require_rank(a_set, t, "minor_diagonals");
  const ComplexMatrix& tm = t.matrix();
  ComplexMatrix out(static_cast<Eigen::Index>(a_set.size()), tm.cols());
  for (std::size_t a = 0; a < a_set.size(); ++a) {
    out.row(static_cast<Eigen::Index>(a)) =
        (a_set.matrices[a] * tm).cwiseProduct(tm).colwise().sum();
  }
  return out;
}

RealVector ensemble_weights(const AMatrixSet& a_set, const TMatrix& t) {
  require_rank(a_set, t, "ensemble_weights");
  const ComplexMatrix& tm = t.matrix();
  return (a_set.weights.asDiagonal() * tm.cwiseAbs2()).colwise().sum().transpose();
}

double sep_objective_l2(const AMatrixSet& a_set, const TMatrix& t) {
  return minor_diagonals(a_set, t).squaredNorm();
}

double sep_objective_l1(const AMatrixSet& a_set, const TMatrix& t) {
  return minor_diagonals(a_set, t).cwiseAbs().sum();
}

double sep_objective_l2_normalized(const AMatrixSet& a_set, const TMatrix& t) {
  const ComplexMatrix d = minor_diagonals(a_set, t);
  const RealVector w = ensemble_weights(a_set, t);
  double total = 0.0;
  for (Eigen::Index k = 0; k < d.cols(); ++k) {
    if (w(k) < kNegligibleWeight) continue;
    total += d.col(k).squaredNorm() / (w(k) * w(k));
  }
  return total;
}

}  // namespace eofsep
