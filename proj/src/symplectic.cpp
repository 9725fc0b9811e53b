#include "hslyap/symplectic.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace hslyap {

Matrix quaternion_unit(int j) {
  Matrix q(2, 2);
  switch (j) {
    case 0: q << 1, 0, 0, 1; break;
    case 1: q << iu, 0, 0, -iu; break;
    case 2: q << 0, 1, -1, 0; break;
    case 3: q << 0, iu, iu, 0; break;
    default: throw Error("quaternion_unit: index out of range");
  }
  return q;
}

static void require_even(const char* where, int n) {
  if (n <= 0 || n % 2 != 0)
    throw DimensionError(where, n + (n % 2), n);
}

Matrix symplectic_J(int n) {
  require_even("symplectic_J", n);
  const int l = n / 2;
  Matrix j = Matrix::Zero(n, n);
  j.topRightCorner(l, l) = -Matrix::Identity(l, l);
  j.bottomLeftCorner(l, l) = Matrix::Identity(l, l);
  return j;
}

Matrix lorentz_G(int n) {
  require_even("lorentz_G", n);
  const int l = n / 2;
  Matrix g = Matrix::Zero(n, n);
  g.topLeftCorner(l, l) = Matrix::Identity(l, l);
  g.bottomRightCorner(l, l) = -Matrix::Identity(l, l);
  return g;
}

Matrix cayley_C(int n) {
  require_even("cayley_C", n);
  const int l = n / 2;
  const double s = 1.0 / std::sqrt(2.0);
  Matrix c = Matrix::Zero(n, n);
  c.topLeftCorner(l, l) = s * Matrix::Identity(l, l);
  c.topRightCorner(l, l) = -iu * s * Matrix::Identity(l, l);
  c.bottomLeftCorner(l, l) = s * Matrix::Identity(l, l);
  c.bottomRightCorner(l, l) = iu * s * Matrix::Identity(l, l);
  return c;
}

Matrix quaternion_I(int n) {
  require_even("quaternion_I", n);
  // I = ((0,-1),(1,0)) per 2x2 block (= -q2).
  Matrix m = Matrix::Zero(n, n);
  for (int k = 0; k < n; k += 2) {
    m(k, k + 1) = -1.0;
    m(k + 1, k) = 1.0;
  }
  return m;
}

StructuredConstants::StructuredConstants(int n_) : n(n_) {
  J = symplectic_J(n);
  G = lorentz_G(n);
  C = cayley_C(n);
  I = quaternion_I(n);
  for (int j = 0; j < 4; ++j) q[j] = quaternion_unit(j);

  const double tol = 1e-14;
  const Matrix id = Matrix::Identity(n, n);
  if (max_abs(C * J * C.adjoint() - (1.0 / iu) * G) > tol)
    throw InvariantViolation("StructuredConstants: C J C* != (1/i) G");
  if (max_abs(C.conjugate() * J * C.adjoint() - (1.0 / iu) * J) > tol)
    throw InvariantViolation("StructuredConstants: conj(C) J C* != (1/i) J");
  if (max_abs(J * J + id) > tol) throw InvariantViolation("J^2 != -1");
  if (max_abs(G * G - id) > tol) throw InvariantViolation("G^2 != 1");
  if (max_abs(C * C.adjoint() - id) > tol) throw InvariantViolation("C not unitary");
  if (max_abs(I * I + id) > tol) throw InvariantViolation("I^2 != -1");
  if (max_abs(q[1] * q[1] + q[0]) > tol || max_abs(q[2] * q[2] + q[0]) > tol ||
      max_abs(q[3] * q[3] + q[0]) > tol || max_abs(q[1] * q[2] * q[3] + q[0]) > tol)
    throw InvariantViolation("quaternion unit relations fail");
}

Matrix quaternion_twist(const Matrix& a) {
  if (a.rows() % 2 != 0 || a.cols() % 2 != 0)
    throw DimensionError("quaternion_twist", a.rows() + (a.rows() % 2), a.rows());
  const Matrix il = quaternion_I(static_cast<int>(a.rows()));
  const Matrix ir = quaternion_I(static_cast<int>(a.cols()));
  return il.adjoint() * a.conjugate() * ir;
}

bool is_quaternion_matrix(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  if (a.rows() % 2 != 0)
    throw DimensionError("is_quaternion_matrix", a.rows() + 1, a.rows());
  return max_abs(quaternion_twist(a) - a) <= tol;
}

double symplectic_residual(const Matrix& t) {
  const Matrix j = symplectic_J(static_cast<int>(t.rows()));
  return max_abs(t.adjoint() * j * t - j);
}

double lorentz_residual(const Matrix& t) {
  const Matrix g = lorentz_G(static_cast<int>(t.rows()));
  return max_abs(t.adjoint() * g * t - g);
}

double class_symmetry_residual(const Matrix& t, SymmetryClass cls) {
  switch (cls) {
    case SymmetryClass::Complex: return 0.0;
    case SymmetryClass::Real: return max_abs(t.conjugate() - t);
    case SymmetryClass::Quaternion: return max_abs(quaternion_twist(t) - t);
  }
  return 0.0;
}

bool is_hermitian_symplectic(const Matrix& t, SymmetryClass cls, double tol) {
  if (t.rows() != t.cols() || t.rows() % 2 != 0)
    throw DimensionError("is_hermitian_symplectic", t.rows() + (t.rows() % 2), t.rows());
  if (cls == SymmetryClass::Quaternion && t.rows() % 4 != 0)
    throw DimensionError("is_hermitian_symplectic (class H)", t.rows() + 2, t.rows());
  return symplectic_residual(t) <= tol && class_symmetry_residual(t, cls) <= tol;
}

bool is_lorentz_member(const Matrix& t, double tol) {
  if (t.rows() != t.cols() || t.rows() % 2 != 0)
    throw DimensionError("is_lorentz_member", t.rows() + (t.rows() % 2), t.rows());
  return lorentz_residual(t) <= tol;
}

Matrix cayley_conjugate(const Matrix& t, CayleyDirection dir) {
  if (t.rows() != t.cols() || t.rows() % 2 != 0)
    throw DimensionError("cayley_conjugate", t.rows() + (t.rows() % 2), t.rows());
  const Matrix c = cayley_C(static_cast<int>(t.rows()));
  return dir == CayleyDirection::ToLorentz ? Matrix(c * t * c.adjoint())
                                           : Matrix(c.adjoint() * t * c);
}

Matrix sample_haar_unitary(int n, RngStream& rng) {
  if (n < 1) throw Error("sample_haar_unitary: n must be >= 1");
  Matrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      a(i, j) = Complex(rng.normal(), rng.normal()) / std::sqrt(2.0);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    Complex d = r(j, j);
    double ad = std::abs(d);
    q.col(j) *= (ad > 0 ? d / ad : Complex(1.0));
  }
  return q;
}

Matrix sample_lie_element(int n, SymmetryClass cls, RngStream& rng) {
  require_even("sample_lie_element", n);
  Matrix h(n, n);
  if (cls == SymmetryClass::Real) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i <= j; ++i) {
        double v = rng.normal();
        h(i, j) = v;
        h(j, i) = v;
      }
  } else {
    for (int j = 0; j < n; ++j) {
      h(j, j) = rng.normal();
      for (int i = 0; i < j; ++i) {
        Complex v(rng.normal(), rng.normal());
        h(i, j) = v;
        h(j, i) = std::conj(v);
      }
    }
    if (cls == SymmetryClass::Quaternion)
      h = 0.5 * (h + quaternion_twist(h));  // hermitian and quaternion
  }
  Matrix p = symplectic_J(n) * h;
  return p / std::max(1.0, p.operatorNorm());
}

Matrix sample_group_element(int n, SymmetryClass cls, RngStream& rng, double spread) {
  Matrix p = spread * sample_lie_element(n, cls, rng);
  return p.exp();
}

}  // namespace hslyap
