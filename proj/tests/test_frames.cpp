#include <doctest.h>

#include "hslyap/frames.hpp"

using namespace hslyap;

namespace {

// T_N ... T_1 with ts[0] applied first.
Matrix product_matrix(const std::vector<Matrix>& ts) {
  Matrix p = ts.front();
  for (size_t i = 1; i < ts.size(); ++i) p = ts[i] * p;
  return p;
}

}  // namespace

TEST_CASE("identity action fixes any frame") {
  RngStream rng(1);
  for (auto cls : {SymmetryClass::Real, SymmetryClass::Complex, SymmetryClass::Quaternion}) {
    IsotropicFrame f = random_frame(cls, 3, rng);
    f.validate(1e-10);
    auto [g, s] = act(Matrix::Identity(f.ambient(), f.ambient()), f);
    CHECK(max_abs(g.phi - f.phi) < 1e-12);
    CHECK(max_abs(s.S - Matrix::Identity(f.half(), f.half())) < 1e-12);
  }
}

TEST_CASE("pure expansion on an axis frame: L = 1, diag(2, 1/2)") {
  Matrix t(2, 2);
  t << 2.0, 0.0, 0.0, 0.5;
  IsotropicFrame f{Matrix::Zero(2, 1), SymmetryClass::Complex};
  f.phi(0, 0) = 1.0;
  auto [g, s] = act(t, f);
  CHECK(std::abs(s.S(0, 0) - 2.0) < 1e-14);
  CHECK(max_abs(g.phi - f.phi) < 1e-14);
  CHECK(additive_cocycle(s, 1, SymmetryClass::Complex) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("frame/UV correspondence round trips") {
  RngStream rng(2);
  for (auto cls : {SymmetryClass::Real, SymmetryClass::Complex, SymmetryClass::Quaternion}) {
    IsotropicFrame f = random_frame(cls, 4, rng);
    const UVPair uv = uv_of_frame(f);
    const int l = f.half();
    CHECK(max_abs(uv.U.adjoint() * uv.U - Matrix::Identity(l, l)) < 1e-10);
    CHECK(max_abs(uv.V.adjoint() * uv.V - Matrix::Identity(l, l)) < 1e-10);
    if (cls == SymmetryClass::Real) CHECK(max_abs(uv.V - uv.U.conjugate()) < 1e-10);
    if (cls == SymmetryClass::Quaternion) CHECK(max_abs(uv.V - quaternion_twist(uv.U)) < 1e-10);
    const IsotropicFrame back = frame_of_uv(uv, cls);
    CHECK(max_abs(back.phi - f.phi) < 1e-12);
  }
}

TEST_CASE("frame built from U = V = 1") {
  UVPair uv{Matrix::Identity(3, 3), Matrix::Identity(3, 3)};
  const IsotropicFrame f = frame_of_uv(uv, SymmetryClass::Complex);
  f.validate(1e-12);
  Matrix stack(6, 3);
  stack.topRows(3) = Matrix::Identity(3, 3);
  stack.bottomRows(3) = Matrix::Identity(3, 3);
  CHECK(max_abs(f.phi - cayley_C(6).adjoint() * stack / std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("class R frame from a real orthogonal U is real") {
  RngStream rng(9);
  // a Householder-free real orthogonal: permutation-with-signs
  Matrix u = Matrix::Zero(3, 3);
  u(0, 1) = 1.0;
  u(1, 0) = -1.0;
  u(2, 2) = 1.0;
  const IsotropicFrame f = frame_of_uv({u, u.conjugate()}, SymmetryClass::Real);
  CHECK(f.symmetry_residual() < 1e-14);
  f.validate(1e-12);
}

TEST_CASE("frame_of_uv rejects non-unitary input") {
  Matrix u = 2.0 * Matrix::Identity(2, 2);
  CHECK_THROWS_AS(frame_of_uv({u, u}, SymmetryClass::Complex), InvariantViolation);
}

TEST_CASE("multiplicative cocycle identity on random triples") {
  RngStream rng(33);
  struct Setup { SymmetryClass cls; int channels; int trials; };
  for (auto setup : {Setup{SymmetryClass::Complex, 3, 100},
                     Setup{SymmetryClass::Real, 3, 40},
                     Setup{SymmetryClass::Quaternion, 3, 40}}) {
    const int n = 2 * ambient_size(setup.cls, setup.channels);
    for (int trial = 0; trial < setup.trials; ++trial) {
      const Matrix t = sample_group_element(n, setup.cls, rng, 0.8);
      const Matrix tp = sample_group_element(n, setup.cls, rng, 0.8);
      IsotropicFrame f = random_frame(setup.cls, setup.channels, rng);
      auto [f1, s_inner] = act(tp, f);
      auto [f2, s_outer] = act(t, f1);
      auto [f12, s_prod] = act(Matrix(t * tp), f);
      CHECK(max_abs(s_prod.S - s_outer.S * s_inner.S) < 1e-9);
      CHECK(max_abs(f12.phi - f2.phi) < 1e-9);
    }
  }
}

TEST_CASE("unitary hermitian-symplectic action has trivial cocycle") {
  RngStream rng(4);
  const int l = 4;
  // diag(U, V) in the Lorentz picture is unitary and G-preserving
  const Matrix u = sample_haar_unitary(l, rng);
  const Matrix v = sample_haar_unitary(l, rng);
  Matrix d = Matrix::Zero(2 * l, 2 * l);
  d.topLeftCorner(l, l) = u;
  d.bottomRightCorner(l, l) = v;
  const Matrix t = cayley_conjugate(d, CayleyDirection::ToSymplectic);
  REQUIRE(is_hermitian_symplectic(t, SymmetryClass::Complex, 1e-10));
  IsotropicFrame f = random_frame(SymmetryClass::Complex, l, rng);
  auto [g, s] = act(t, f);
  CHECK(max_abs(s.S - Matrix::Identity(l, l)) < 1e-10);
  for (int p = 1; p <= l; ++p)
    CHECK(std::abs(additive_cocycle(s, p, SymmetryClass::Complex)) < 1e-12);
}

TEST_CASE("torus covariance of the cocycle") {
  RngStream rng(77);

  SUBCASE("identity torus gives zero deviation") {
    const Matrix t = sample_group_element(6, SymmetryClass::Complex, rng, 1.0);
    IsotropicFrame f = random_frame(SymmetryClass::Complex, 3, rng);
    CHECK(torus_covariance_check(t, f, Matrix::Identity(3, 3)) < 1e-12);
  }

  SUBCASE("random phase diagonal, class C, L = 3") {
    const Matrix t = sample_group_element(6, SymmetryClass::Complex, rng, 1.0);
    IsotropicFrame f = random_frame(SymmetryClass::Complex, 3, rng);
    Matrix torus = Matrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) torus(i, i) = std::exp(iu * (2.1 * i + 0.4));
    CHECK(torus_covariance_check(t, f, torus) < 1e-9);
  }

  SUBCASE("class R with t = diag(1, -1)") {
    const Matrix t = sample_group_element(4, SymmetryClass::Real, rng, 1.0);
    IsotropicFrame f = random_frame(SymmetryClass::Real, 2, rng);
    Matrix torus = Matrix::Identity(2, 2);
    torus(1, 1) = -1.0;
    CHECK(torus_covariance_check(t, f, torus) < 1e-9);
  }

  SUBCASE("class H quaternion torus diag(a, conj a)") {
    const Matrix t = sample_group_element(8, SymmetryClass::Quaternion, rng, 1.0);
    IsotropicFrame f = random_frame(SymmetryClass::Quaternion, 2, rng);
    Matrix torus = Matrix::Zero(4, 4);
    const Complex a0 = std::exp(iu * 0.9), a1 = std::exp(iu * 2.3);
    torus(0, 0) = a0; torus(1, 1) = std::conj(a0);
    torus(2, 2) = a1; torus(3, 3) = std::conj(a1);
    CHECK(torus_covariance_check(t, f, torus) < 1e-9);
  }

  SUBCASE("inadmissible torus element is rejected") {
    const Matrix t = sample_group_element(4, SymmetryClass::Real, rng, 1.0);
    IsotropicFrame f = random_frame(SymmetryClass::Real, 2, rng);
    Matrix torus = Matrix::Zero(2, 2);
    torus(0, 0) = std::exp(iu * 0.3);
    torus(1, 1) = 1.0;
    CHECK_THROWS_AS(torus_covariance_check(t, f, torus), Error);
  }
}

TEST_CASE("class H cocycle diagonal: tau of 3 q0 block") {
  // Build a quaternion expansion diag(3,3,1/3,1/3) acting on the axis frame.
  Matrix t = Matrix::Zero(4, 4);
  t(0, 0) = 3.0; t(1, 1) = 3.0; t(2, 2) = 1.0 / 3.0; t(3, 3) = 1.0 / 3.0;
  REQUIRE(is_hermitian_symplectic(t, SymmetryClass::Quaternion, 1e-12));
  IsotropicFrame f{Matrix::Zero(4, 2), SymmetryClass::Quaternion};
  f.phi(0, 0) = 1.0;
  f.phi(1, 1) = 1.0;
  auto [g, s] = act(t, f);
  CHECK(additive_cocycle(s, 1, SymmetryClass::Quaternion) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("frame invariants survive long chains with periodic reprojection") {
  RngStream rng(1234);
  for (auto cls : {SymmetryClass::Complex, SymmetryClass::Quaternion}) {
    const int channels = 3;
    const int n = 2 * ambient_size(cls, channels);
    IsotropicFrame f = random_frame(cls, channels, rng);
    std::vector<Matrix> ts;
    for (int k = 0; k < 7; ++k) ts.push_back(sample_group_element(n, cls, rng, 0.5));
    double worst = 0.0;
    for (int step = 1; step <= 10000; ++step) {
      f = act(ts[step % ts.size()], f).first;
      if (step % 100 == 0) {
        worst = std::max({worst, f.orthonormality_residual(), f.isotropy_residual(),
                          f.symmetry_residual()});
        reproject_frame(f);
      }
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("partial cocycle sums equal Gram determinant growth") {
  RngStream rng(50);
  for (auto cls : {SymmetryClass::Complex, SymmetryClass::Real}) {
    const int l = 4, nsteps = 50;
    IsotropicFrame f0 = random_frame(cls, l, rng);
    std::vector<Matrix> ts;
    for (int k = 0; k < nsteps; ++k) ts.push_back(sample_group_element(2 * l, cls, rng, 0.35));

    // chain cocycle sums
    IsotropicFrame f = f0;
    RealVector sums = RealVector::Zero(l);
    for (const Matrix& t : ts) {
      auto [g, s] = act(t, f);
      for (int p = 1; p <= l; ++p) sums[p - 1] += additive_cocycle(s, p, cls);
      f = g;
    }

    const Matrix prod = product_matrix(ts);
    const Matrix y = prod * f0.phi;
    // 1/2 log det of the Gram matrix of the first p propagated columns,
    // evaluated through QR diagonals for numerical stability.
    Eigen::HouseholderQR<Matrix> qr(y);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int p = 1; p <= l; ++p) {
      const double lhs = sums.head(p).sum();
      double rhs = 0.0;
      for (int j = 0; j < p; ++j) rhs += std::log(std::abs(r(j, j)));
      CHECK(std::abs(lhs - rhs) < 1e-6 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("gram-schmidt reports singular action") {
  Matrix t = Matrix::Zero(4, 4);  // rank deficient on purpose
  RngStream rng(8);
  IsotropicFrame f = random_frame(SymmetryClass::Complex, 2, rng);
  CHECK_THROWS_AS(act(t, f), SingularAction);
}

TEST_CASE("acting with a real transfer matrix keeps class R frames real") {
  RngStream rng(21);
  const Matrix t = sample_group_element(6, SymmetryClass::Real, rng, 1.0);
  IsotropicFrame f = random_frame(SymmetryClass::Real, 3, rng);
  auto [g, s] = act(t, f);
  CHECK(g.symmetry_residual() < 1e-12);
  CHECK(max_abs(Matrix(s.S.imag().cast<Complex>())) < 1e-12);
}
