#include "hslyap/frames.hpp"

namespace hslyap {

double IsotropicFrame::orthonormality_residual() const {
  return max_abs(phi.adjoint() * phi - Matrix::Identity(half(), half()));
}

double IsotropicFrame::isotropy_residual() const {
  const Matrix j = symplectic_J(ambient());
  return max_abs(phi.adjoint() * j * phi);
}

double IsotropicFrame::symmetry_residual() const {
  switch (cls) {
    case SymmetryClass::Complex: return 0.0;
    case SymmetryClass::Real: return max_abs(phi.conjugate() - phi);
    case SymmetryClass::Quaternion: return max_abs(quaternion_twist(phi) - phi);
  }
  return 0.0;
}

void IsotropicFrame::validate(double tol) const {
  if (phi.rows() != 2 * phi.cols())
    throw DimensionError("IsotropicFrame", 2 * phi.cols(), phi.rows());
  if (orthonormality_residual() > tol)
    throw InvariantViolation("frame columns not orthonormal");
  if (isotropy_residual() > tol)
    throw InvariantViolation("frame not isotropic");
  if (symmetry_residual() > tol)
    throw InvariantViolation("frame violates class symmetry");
}

double TriangularCocycle::diagonal(int p) const {
  const int n = channels();
  if (p < 1 || p > n) throw Error("cocycle channel index out of range");
  if (cls == SymmetryClass::Quaternion) {
    return 0.5 * (S(2 * p - 2, 2 * p - 2) + S(2 * p - 1, 2 * p - 1)).real();
  }
  return S(p - 1, p - 1).real();
}

namespace {

const Matrix& i2_matrix() {
  static const Matrix i2 = quaternion_I(2);
  return i2;
}

// 2x2 projection onto the quaternion subspace: (c + I2* conj(c) I2) / 2.
inline Eigen::Matrix2cd quaternion_project(const Eigen::Matrix2cd& c) {
  static const Eigen::Matrix2cd i2 = i2_matrix();
  return 0.5 * (c + i2.adjoint() * c.conjugate() * i2);
}

constexpr double kRankTol = 1e-12;

TriangularCocycle gram_schmidt_scalar(Matrix& y, SymmetryClass cls) {
  const int n = static_cast<int>(y.cols());
  Matrix s = Matrix::Zero(n, n);
  for (int p = 0; p < n; ++p) {
    const double in_norm = y.col(p).norm();
    Vector v = y.col(p);
    for (int pass = 0; pass < 2; ++pass) {
      for (int q = 0; q < p; ++q) {
        const Complex c = y.col(q).dot(v);
        v.noalias() -= c * y.col(q);
        s(q, p) += c;
      }
    }
    const double nrm = v.norm();
    if (!(nrm > kRankTol * std::max(1.0, in_norm)))
      throw SingularAction(p + 1, nrm);
    s(p, p) = nrm;
    y.col(p) = v / nrm;
  }
  return {std::move(s), cls};
}

TriangularCocycle gram_schmidt_quaternion(Matrix& y) {
  const int n = static_cast<int>(y.cols());
  if (n % 2 != 0) throw DimensionError("gram_schmidt (class H)", n + 1, n);
  const int nq = n / 2;
  Matrix s = Matrix::Zero(n, n);
  for (int p = 0; p < nq; ++p) {
    const double in_norm = y.block(0, 2 * p, y.rows(), 2).norm();
    Matrix v = y.block(0, 2 * p, y.rows(), 2);
    for (int pass = 0; pass < 2; ++pass) {
      for (int q = 0; q < p; ++q) {
        Eigen::Matrix2cd c = y.block(0, 2 * q, y.rows(), 2).adjoint() * v;
        c = quaternion_project(c);
        v.noalias() -= y.block(0, 2 * q, y.rows(), 2) * c;
        s.block<2, 2>(2 * q, 2 * p) += c;
      }
    }
    // v*v = alpha q0 for a quaternion column block; alpha = Re tr / 2.
    const double alpha = 0.5 * (v.col(0).squaredNorm() + v.col(1).squaredNorm());
    const double nrm = std::sqrt(alpha);
    if (!(nrm > kRankTol * std::max(1.0, in_norm)))
      throw SingularAction(p + 1, nrm);
    s(2 * p, 2 * p) = nrm;
    s(2 * p + 1, 2 * p + 1) = nrm;
    y.block(0, 2 * p, y.rows(), 2) = v / nrm;
  }
  return {std::move(s), SymmetryClass::Quaternion};
}

}  // namespace

TriangularCocycle gram_schmidt_cocycle(Matrix& y, SymmetryClass cls) {
  return cls == SymmetryClass::Quaternion ? gram_schmidt_quaternion(y)
                                          : gram_schmidt_scalar(y, cls);
}

std::pair<IsotropicFrame, TriangularCocycle> act(const Matrix& t, const IsotropicFrame& phi) {
  if (t.cols() != phi.phi.rows())
    throw DimensionError("act", phi.phi.rows(), t.cols());
  Matrix y = t * phi.phi;
  TriangularCocycle s = gram_schmidt_cocycle(y, phi.cls);
  return {IsotropicFrame{std::move(y), phi.cls}, std::move(s)};
}

double additive_cocycle(const TriangularCocycle& s, int p, SymmetryClass cls) {
  if (cls != s.cls) throw Error("additive_cocycle: class mismatch");
  const double d = s.diagonal(p);
  if (!(d > 0.0))
    throw InvariantViolation("additive_cocycle: nonpositive diagonal entry");
  // diagonal(p) already extracts the q0 coefficient in class H, which is
  // exactly the tau = (1/2) Tr_2 reduction of the 2x2 diagonal block.
  return std::log(d);
}

UVPair uv_of_frame(const IsotropicFrame& phi) {
  const int n = phi.ambient();
  const int l = phi.half();
  const Matrix stack = std::sqrt(2.0) * (cayley_C(n) * phi.phi);
  return {stack.topRows(l), stack.bottomRows(l)};
}

IsotropicFrame frame_of_uv(const UVPair& uv, SymmetryClass cls) {
  const int l = static_cast<int>(uv.U.rows());
  if (uv.U.cols() != l || uv.V.rows() != l || uv.V.cols() != l)
    throw DimensionError("frame_of_uv", l, uv.V.rows());
  const double tol = 1e-10;
  if (max_abs(uv.U.adjoint() * uv.U - Matrix::Identity(l, l)) > tol ||
      max_abs(uv.V.adjoint() * uv.V - Matrix::Identity(l, l)) > tol)
    throw InvariantViolation("frame_of_uv: input not unitary");
  if (cls == SymmetryClass::Real && max_abs(uv.V - uv.U.conjugate()) > tol)
    throw InvariantViolation("frame_of_uv: class R requires V = conj(U)");
  if (cls == SymmetryClass::Quaternion &&
      max_abs(uv.V - quaternion_twist(uv.U)) > tol)
    throw InvariantViolation("frame_of_uv: class H requires V = I* conj(U) I");
  Matrix stack(2 * l, l);
  stack.topRows(l) = uv.U;
  stack.bottomRows(l) = uv.V;
  IsotropicFrame f{cayley_C(2 * l).adjoint() * stack / std::sqrt(2.0), cls};
  return f;
}

namespace {

void validate_torus(const Matrix& torus, SymmetryClass cls) {
  const int n = static_cast<int>(torus.rows());
  const double tol = 1e-12;
  if (torus.cols() != n) throw Error("torus element must be square");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && std::abs(torus(i, j)) > tol)
        throw Error("torus element must be diagonal");
    }
    if (std::abs(std::abs(torus(i, i)) - 1.0) > tol)
      throw Error("torus element must be unitary");
    if (cls == SymmetryClass::Real && std::abs(torus(i, i).imag()) > tol)
      throw Error("class R torus element must be diagonal +-1");
  }
  if (cls == SymmetryClass::Quaternion &&
      max_abs(quaternion_twist(torus) - torus) > tol)
    throw Error("class H torus element must satisfy I* conj(t) I = t");
}

}  // namespace

double torus_covariance_check(const Matrix& t_op, const IsotropicFrame& phi,
                              const Matrix& torus) {
  validate_torus(torus, phi.cls);
  IsotropicFrame shifted{phi.phi * torus, phi.cls};
  const TriangularCocycle s_shift = act(t_op, shifted).second;
  const TriangularCocycle s_base = act(t_op, phi).second;
  const Matrix expected = torus.adjoint() * s_base.S * torus;
  return max_abs(s_shift.S - expected);
}

IsotropicFrame random_frame(SymmetryClass cls, int channels, RngStream& rng) {
  const int l = ambient_size(cls, channels);
  UVPair uv;
  uv.U = sample_haar_unitary(l, rng);
  switch (cls) {
    case SymmetryClass::Complex: uv.V = sample_haar_unitary(l, rng); break;
    case SymmetryClass::Real: uv.V = uv.U.conjugate(); break;
    case SymmetryClass::Quaternion: uv.V = quaternion_twist(uv.U); break;
  }
  return frame_of_uv(uv, cls);
}

void reproject_frame(IsotropicFrame& f) {
  switch (f.cls) {
    case SymmetryClass::Complex: break;
    case SymmetryClass::Real: f.phi = f.phi.real().cast<Complex>(); break;
    case SymmetryClass::Quaternion:
      f.phi = 0.5 * (f.phi + quaternion_twist(f.phi));
      break;
  }
  const Matrix j = symplectic_J(f.ambient());
  const Matrix eps = f.phi.adjoint() * j * f.phi;
  f.phi += 0.5 * j * f.phi * eps;
  gram_schmidt_cocycle(f.phi, f.cls);
}

}  // namespace hslyap
