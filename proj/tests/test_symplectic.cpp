#include <doctest.h>

#include "hslyap/symplectic.hpp"

using namespace hslyap;

TEST_CASE("structured constants satisfy the defining identities") {
  for (int l : {1, 2, 3, 5}) {
    StructuredConstants k(2 * l);
    const Matrix id = Matrix::Identity(2 * l, 2 * l);
    CHECK(max_abs(k.C * k.J * k.C.adjoint() - (1.0 / iu) * k.G) < 1e-14);
    CHECK(max_abs(k.C.conjugate() * k.J * k.C.adjoint() - (1.0 / iu) * k.J) < 1e-14);
    CHECK(max_abs(k.J * k.J + id) == 0.0);
    CHECK(max_abs(k.G * k.G - id) == 0.0);
    CHECK(max_abs(k.I * k.I + id) == 0.0);
    CHECK(max_abs(k.C * k.C.adjoint() - id) < 1e-15);
  }
}

TEST_CASE("hermitian symplectic membership") {
  const int l = 4;
  const Matrix id = Matrix::Identity(2 * l, 2 * l);
  CHECK(is_hermitian_symplectic(id, SymmetryClass::Complex, 1e-12));
  const Matrix j = symplectic_J(2 * l);
  CHECK(is_hermitian_symplectic(j, SymmetryClass::Complex, 1e-12));

  // diag(2,1,...,1,1/2,1,...,1) preserves J; scaling it by 2 does not.
  Vector d = Vector::Ones(2 * l);
  d[0] = 2.0;
  d[l] = 0.5;
  Matrix t = d.asDiagonal();
  CHECK(is_hermitian_symplectic(t, SymmetryClass::Complex, 1e-12));
  CHECK_FALSE(is_hermitian_symplectic(Matrix(2.0 * t), SymmetryClass::Complex, 1e-12));

  CHECK_THROWS_AS(is_hermitian_symplectic(Matrix::Identity(3, 3), SymmetryClass::Complex, 1e-12),
                  DimensionError);
}

TEST_CASE("class symmetry subcases") {
  RngStream rng(11);
  const Matrix p_r = sample_lie_element(6, SymmetryClass::Real, rng);
  const Matrix t_r = sample_group_element(6, SymmetryClass::Real, rng, 0.7);
  CHECK(is_hermitian_symplectic(t_r, SymmetryClass::Real, 1e-10));
  const Matrix t_h = sample_group_element(8, SymmetryClass::Quaternion, rng, 0.7);
  CHECK(is_hermitian_symplectic(t_h, SymmetryClass::Quaternion, 1e-10));
  // a complex member generically fails the real test
  const Matrix t_c = sample_group_element(6, SymmetryClass::Complex, rng, 0.7);
  CHECK(is_hermitian_symplectic(t_c, SymmetryClass::Complex, 1e-10));
  CHECK(class_symmetry_residual(t_c, SymmetryClass::Real) > 1e-4);
}

TEST_CASE("quaternion matrix predicate") {
  CHECK(is_quaternion_matrix(quaternion_unit(2), 1e-12));
  Matrix d(2, 2);
  d << iu, 0, 0, iu;
  CHECK_FALSE(is_quaternion_matrix(d, 1e-12));
  Matrix r = 3.25 * quaternion_unit(0);
  CHECK(is_quaternion_matrix(r, 1e-12));
  CHECK_THROWS_AS(is_quaternion_matrix(Matrix::Identity(3, 3), 1e-12), DimensionError);
}

TEST_CASE("cayley conjugation") {
  const int n = 6;
  const Matrix id = Matrix::Identity(n, n);
  CHECK(max_abs(cayley_conjugate(id, CayleyDirection::ToLorentz) - id) < 1e-15);

  // for the form itself: C J C* = (1/i) G
  const Matrix j = symplectic_J(n);
  CHECK(max_abs(cayley_conjugate(j, CayleyDirection::ToLorentz) - (1.0 / iu) * lorentz_G(n)) < 1e-14);

  // round trip
  RngStream rng(3);
  const Matrix t = sample_group_element(n, SymmetryClass::Complex, rng, 1.0);
  const Matrix back = cayley_conjugate(cayley_conjugate(t, CayleyDirection::ToLorentz),
                                       CayleyDirection::ToSymplectic);
  CHECK(max_abs(back - t) < 1e-14);

  // conjugating an HS member yields a G-preserving member
  const Matrix tl = cayley_conjugate(t, CayleyDirection::ToLorentz);
  CHECK(is_lorentz_member(tl, 1e-10));
}

TEST_CASE("haar sampling basics") {
  RngStream rng(42);
  // n = 1: a uniform phase
  for (int k = 0; k < 16; ++k) {
    const Matrix u = sample_haar_unitary(1, rng);
    CHECK(std::abs(std::abs(u(0, 0)) - 1.0) < 1e-14);
  }
  // column norms
  const Matrix u = sample_haar_unitary(7, rng);
  for (int c = 0; c < 7; ++c) CHECK(std::abs(u.col(c).norm() - 1.0) < 1e-12);
  CHECK(max_abs(u.adjoint() * u - Matrix::Identity(7, 7)) < 1e-12);
  CHECK_THROWS_AS(sample_haar_unitary(0, rng), Error);
}

TEST_CASE("haar moments: E|U_11|^2 = 1/n at n = 4") {
  RngStream rng(7);
  const int n = 4, samples = 100000;
  double acc = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Matrix u = sample_haar_unitary(n, rng);
    acc += std::norm(u(0, 0));
  }
  acc /= samples;
  // Var|U11|^2 = 2/(n(n+1)) - 1/n^2 = 0.0375 at n = 4
  const double sigma = std::sqrt(0.0375 / samples);
  CHECK(std::abs(acc - 0.25) < 3.0 * sigma);
}

TEST_CASE("left invariance: VU moments match U moments") {
  RngStream rng(19);
  const int n = 3, samples = 60000;
  const Matrix v = sample_haar_unitary(n, rng);
  Complex mean = 0.0;
  double second = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Matrix u = v * sample_haar_unitary(n, rng);
    mean += u(1, 2);
    second += std::norm(u(1, 2));
  }
  mean /= double(samples);
  second /= samples;
  const double sigma1 = std::sqrt((1.0 / n) / samples);
  const double var2 = 2.0 / (n * (n + 1.0)) - 1.0 / (n * n);
  CHECK(std::abs(mean) < 4.0 * sigma1);
  CHECK(std::abs(second - 1.0 / n) < 3.0 * std::sqrt(var2 / samples));
}

TEST_CASE("membership is conjugation stable") {
  RngStream rng(5);
  const Matrix t = sample_group_element(8, SymmetryClass::Complex, rng, 1.2);
  REQUIRE(is_hermitian_symplectic(t, SymmetryClass::Complex, 1e-10));
  CHECK(is_lorentz_member(cayley_conjugate(t, CayleyDirection::ToLorentz), 1e-10));
}
