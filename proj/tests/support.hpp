#pragma once

#include "eofsep/ensemble.hpp"
#include "eofsep/linalg.hpp"
#include "eofsep/states.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

namespace eofsep::testing {

inline ComplexMatrix random_skew(std::size_t n, std::mt19937_64& rng) {
  return skew_hermitian_part(random_gaussian(n, n, rng));
}

inline ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  const ComplexMatrix g = random_gaussian(n, n, rng);
  return (g + g.adjoint()) / 2.0;
}

inline ComplexMatrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
  const ComplexMatrix g = random_gaussian(n, n, rng);
  return (g + g.transpose()) / 2.0;
}

inline ComplexVector random_vector(std::size_t n, std::mt19937_64& rng) {
  return random_gaussian(n, 1, rng).col(0);
}

inline PureState random_pure(BipartiteDims dims, std::mt19937_64& rng) {
  return PureState::normalized(dims, random_vector(dims.total(), rng));
}

inline ComplexVector random_product(BipartiteDims dims, std::mt19937_64& rng) {
  return kron(random_vector(dims.n1, rng), random_vector(dims.n2, rng)).normalized();
}

/// Random state of the given rank (Wishart-type).
inline DensityMatrix random_state(BipartiteDims dims, std::size_t rank, std::mt19937_64& rng) {
  const ComplexMatrix g = random_gaussian(dims.total(), rank, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(dims, rho);
}

struct SeparableInstance {
  DensityMatrix rho;
  std::vector<double> weights;
  std::vector<ComplexVector> members;
};

/// Mixture of `count` random product vectors with random weights.
inline SeparableInstance random_separable(BipartiteDims dims, std::size_t count,
                                          std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.2, 1.0);
  std::vector<double> w(count);
  std::vector<ComplexVector> members;
  double total = 0.0;
  for (double& x : w) total += (x = uni(rng));
  const auto n = static_cast<Eigen::Index>(dims.total());
  ComplexMatrix rho = ComplexMatrix::Zero(n, n);
  for (std::size_t k = 0; k < count; ++k) {
    w[k] /= total;
    members.push_back(random_product(dims, rng));
    rho += w[k] * members.back() * members.back().adjoint();
  }
  return {DensityMatrix(dims, rho), w, members};
}

/// Central difference of f(T exp(h X)) at h = 0.
inline double directional_fd(const std::function<double(const ComplexMatrix&)>& f,
                             const ComplexMatrix& t, const ComplexMatrix& x, double h = 1e-5) {
  return (f(t * expm_skew_hermitian(x, h)) - f(t * expm_skew_hermitian(x, -h))) / (2.0 * h);
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

}  // namespace eofsep::testing
