#include "doctest.h"

#include "support.hpp"

#include "eofsep/errors.hpp"
#include "eofsep/state_io.hpp"
#include "eofsep/states.hpp"

#include <cmath>
#include <sstream>

using namespace eofsep;
using namespace eofsep::testing;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

ComplexVector basis(std::size_t n, std::size_t i) {
  return ComplexVector::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i));
}

}  // namespace

TEST_CASE("tilde reshape uses the row-major composite index") {
  const ComplexMatrix e12 = tilde_reshape(kron(basis(2, 0), basis(2, 1)), {2, 2});
  CHECK(e12(0, 1) == Complex(1.0));
  CHECK(e12.cwiseAbs().sum() == doctest::Approx(1.0));

  const ComplexMatrix s = tilde_reshape(singlet().vector(), {2, 2});
  CHECK(s(0, 1).real() == doctest::Approx(kInvSqrt2));
  CHECK(s(1, 0).real() == doctest::Approx(-kInvSqrt2));
  CHECK(std::abs(s(0, 0)) == 0.0);

  std::mt19937_64 rng(21);
  const ComplexVector a = random_vector(3, rng);
  const ComplexVector b = random_vector(4, rng);
  const ComplexMatrix p = tilde_reshape(kron(a, b), {3, 4});
  CHECK((p - a * b.transpose()).norm() < 1e-14);
  CHECK(singular_values(p)(1) < 1e-14);
  CHECK((untilde(p) - kron(a, b)).norm() == 0.0);

  CHECK_THROWS_AS(tilde_reshape(ComplexVector::Zero(5), {2, 2}), DimensionError);
}

TEST_CASE("partial trace and pure entanglement") {
  std::mt19937_64 rng(22);
  const PureState product = PureState::normalized({2, 3}, random_product({2, 3}, rng));
  const ComplexMatrix ra = partial_trace_B(product);
  CHECK((ra * ra - ra).norm() < 1e-12);
  CHECK(pure_entanglement(product) < 1e-12);

  const ComplexMatrix rs = partial_trace_B(singlet());
  CHECK((rs - 0.5 * ComplexMatrix::Identity(2, 2)).norm() < 1e-15);
  CHECK(pure_entanglement(singlet()) == doctest::Approx(1.0));
  CHECK(pure_entanglement(maximally_entangled(3)) == doctest::Approx(std::log2(3.0)));

  for (int i = 0; i < 20; ++i) {
    const PureState psi = random_pure({3, 4}, rng);
    CHECK(partial_trace_B(psi).trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    const double e = pure_entanglement(psi);
    CHECK(e >= 0.0);
    CHECK(e <= std::log2(3.0) + 1e-12);
    // Schmidt form -2 sum s^2 log2 s.
    const RealVector s = singular_values(tilde_reshape(psi.vector(), psi.dims()));
    double schmidt = 0.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      if (s(k) > 0.0) schmidt -= 2.0 * s(k) * s(k) * std::log2(s(k));
    }
    CHECK(e == doctest::Approx(schmidt).epsilon(1e-10));
  }
}

TEST_CASE("density matrix validation") {
  ComplexMatrix m = 0.25 * ComplexMatrix::Identity(4, 4);
  CHECK(DensityMatrix({2, 2}, m).rank() == 4);
  CHECK_THROWS_AS(DensityMatrix({2, 2}, 0.9 * m), ValidityError);
  ComplexMatrix neg = m;
  neg(0, 0) = 0.5;
  neg(1, 1) = 0.0;
  neg(2, 2) = 0.5;
  neg(3, 3) = 0.0;
  neg(0, 1) = 0.4;
  neg(1, 0) = 0.4;
  CHECK_THROWS_AS(DensityMatrix({2, 2}, neg), ValidityError);
  ComplexMatrix nonherm = m;
  nonherm(0, 1) = Complex(0.0, 0.1);
  CHECK_THROWS_AS(DensityMatrix({2, 2}, nonherm), ValidityError);
  CHECK_THROWS_AS(DensityMatrix({2, 3}, m), DimensionError);
  CHECK_THROWS_AS(DensityMatrix({1, 4}, m), DimensionError);
  CHECK_THROWS_AS(PureState({2, 2}, 2.0 * basis(4, 0)), ValidityError);
}

TEST_CASE("Peres test") {
  const PeresResult mixed = peres_test(DensityMatrix::maximally_mixed({2, 3}));
  CHECK(mixed.is_ppt);
  CHECK(mixed.min_eigenvalue == doctest::Approx(1.0 / 6.0));

  const PeresResult s = peres_test(DensityMatrix::from_pure(singlet()));
  CHECK_FALSE(s.is_ppt);
  CHECK(s.min_eigenvalue == doctest::Approx(-0.5));

  for (double a = 0.05; a < 1.0; a += 0.1) CHECK(peres_test(horodecki_state(a)).is_ppt);

  std::mt19937_64 rng(23);
  for (int i = 0; i < 10; ++i) {
    const DensityMatrix rho = random_state({2, 3}, 2, rng);
    const ComplexMatrix local = kron(random_unitary(2, rng), random_unitary(3, rng));
    const DensityMatrix rotated(rho.dims(), local * rho.matrix() * local.adjoint());
    CHECK(peres_test(rho).is_ppt == peres_test(rotated).is_ppt);
    CHECK(peres_test(rho).min_eigenvalue == doctest::Approx(peres_test(rotated).min_eigenvalue));
    // Transposing either side gives the same spectrum.
    const RealVector eb = eigvals_hermitian(partial_transpose_B(rho.matrix(), rho.dims()));
    const RealVector ea = eigvals_hermitian(partial_transpose_A(rho.matrix(), rho.dims()));
    CHECK((eb - ea).norm() < 1e-12);
  }
}

TEST_CASE("Horodecki family") {
  for (double a : {0.1, 0.225, 0.5, 0.9}) {
    const DensityMatrix h = horodecki_state(a);
    CHECK(h.rank() == 7);
    CHECK(h.matrix().trace().real() == doctest::Approx(1.0));
  }
  const DensityMatrix one = horodecki_state(1.0);
  CHECK(one.matrix()(6, 6).real() == doctest::Approx(1.0 / 9.0));
  CHECK(std::abs(one.matrix()(6, 8)) < 1e-16);
  CHECK_THROWS_AS(horodecki_state(1.5), DomainError);
  CHECK_THROWS_AS(horodecki_state(-0.1), DomainError);
}

TEST_CASE("mixing with the identity") {
  const DensityMatrix h = horodecki_state(0.3);
  CHECK((mix_with_identity(h, 1.0).matrix() - h.matrix()).norm() < 1e-15);
  CHECK((mix_with_identity(h, 0.0).matrix() - ComplexMatrix::Identity(9, 9) / 9.0).norm() < 1e-15);
  const RealVector half = mix_with_identity(h, 0.5).eigenvalues();
  CHECK((half - (0.5 * h.eigenvalues().array() + 0.5 / 9.0).matrix()).norm() < 1e-12);
  CHECK(mix_with_identity(h, 0.5).rank() == 9);
  CHECK_THROWS_AS(mix_with_identity(h, 1.1), DomainError);
}

TEST_CASE("isotropic states") {
  const DensityMatrix top = isotropic_state(1.0, 3);
  const PureState phi = maximally_entangled(3);
  CHECK((top.matrix() - phi.vector() * phi.vector().adjoint()).norm() < 1e-14);
  CHECK((isotropic_state(1.0 / 9.0, 3).matrix() - ComplexMatrix::Identity(9, 9) / 9.0).norm() < 1e-14);
  CHECK(isotropic_state(8.0 / 9.0, 3).matrix().trace().real() == doctest::Approx(1.0));
  CHECK_THROWS_AS(isotropic_state(2.0, 3), DomainError);
}

TEST_CASE("state file round trip") {
  std::mt19937_64 rng(24);
  const DensityMatrix rho = random_state({2, 3}, 3, rng);
  std::stringstream io;
  write_state(io, rho.dims(), rho.matrix());
  const DensityMatrix back = read_state(io);
  CHECK(back.dims() == rho.dims());
  CHECK((back.matrix() - rho.matrix()).norm() == 0.0);
}

TEST_CASE("state file parsing errors carry line numbers") {
  std::istringstream comment("# singlet\nDIM 2 2  # header\n"
                             "0 0 0 0 0 0 0 0\n0 0 0.5 0 -0.5 0 0 0\n"
                             "0 0 -0.5 0 0.5 0 0 0\n0 0 0 0 0 0 0 0\n");
  CHECK(read_state(comment).rank() == 1);

  std::istringstream bad_number("DIM 2 2\n0.25 0 0 0 0 0 0 0\n0 0 0.25 zz 0 0 0 0\n"
                                "0 0 0 0 0.25 0 0 0\n0 0 0 0 0 0 0.25 0\n");
  try {
    (void)read_state(bad_number);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }

  std::istringstream no_header("2 2\n");
  CHECK_THROWS_AS(read_state(no_header), ParseError);

  std::istringstream trailing("DIM 2 2\n"
                              "0.25 0 0 0 0 0 0 0\n0 0 0.25 0 0 0 0 0\n"
                              "0 0 0 0 0.25 0 0 0\n0 0 0 0 0 0 0.25 0\n7\n");
  try {
    (void)read_state(trailing);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 6);
  }

  std::istringstream trace("DIM 2 2\n"
                           "0.25 0 0 0 0 0 0 0\n0 0 0.25 0 0 0 0 0\n"
                           "0 0 0 0 0.25 0 0 0\n0 0 0 0 0 0 0.15 0\n");
  CHECK_THROWS_AS(read_state(trace), ValidityError);

  CHECK_THROWS(read_state_file("/nonexistent/state.txt"));
}
