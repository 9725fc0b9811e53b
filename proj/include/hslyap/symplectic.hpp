#ifndef HSLYAP_SYMPLECTIC_HPP
#define HSLYAP_SYMPLECTIC_HPP

#include "hslyap/rng.hpp"
#include "hslyap/types.hpp"

namespace hslyap {

// Quaternion units as 2x2 complex matrices, q1^2 = q2^2 = q3^2 = q1 q2 q3 = -q0.
Matrix quaternion_unit(int j);

// Block constant matrices of even size n = 2L':
//   J = ((0,-1),(1,0)),  G = ((1,0),(0,-1)),  C = (1/sqrt2) ((1,-i),(1,i))
// in L'xL' blocks, and I = diag(I2, I2, ...) with I2 = ((0,-1),(1,0)).
Matrix symplectic_J(int n);
Matrix lorentz_G(int n);
Matrix cayley_C(int n);
Matrix quaternion_I(int n);

// All constants for one ambient size, identities checked at construction.
struct StructuredConstants {
  explicit StructuredConstants(int n);
  int n;
  Matrix J, G, C, I;
  Matrix q[4];
};

// I^* conj(A) I for the blockwise I of matching sizes.  Defined for any
// matrix with even numbers of rows and columns (frames included).
Matrix quaternion_twist(const Matrix& a);

bool is_quaternion_matrix(const Matrix& a, double tol = 1e-10);

// Membership in HS(2L',K): T^* J T = J plus the class symmetry
// (R: conj(T) = T, H: I^* conj(T) I = T).
bool is_hermitian_symplectic(const Matrix& t, SymmetryClass cls, double tol = 1e-10);

// Membership in U(L',L',K): T^* G T = G (Cayley picture).
bool is_lorentz_member(const Matrix& t, double tol = 1e-10);

// Residuals used by the predicates, handy for reporting.
double symplectic_residual(const Matrix& t);
double lorentz_residual(const Matrix& t);
double class_symmetry_residual(const Matrix& t, SymmetryClass cls);

enum class CayleyDirection { ToLorentz, ToSymplectic };

// C T C^* (ToLorentz) or C^* T C (ToSymplectic).
Matrix cayley_conjugate(const Matrix& t, CayleyDirection dir);

// Haar unitary via QR of a complex Ginibre matrix with the R-diagonal phase
// absorbed (diagonal of R forced positive).
Matrix sample_haar_unitary(int n, RngStream& rng);

// Haar-distributed member of U(n) with the class constraint built in is not
// needed; frames sample U (and V for class C) directly.

// Random member of hs(2L',K): J*H with H hermitian (and real / quaternion for
// the restricted classes), scaled to unit spectral-norm order.
Matrix sample_lie_element(int n, SymmetryClass cls, RngStream& rng);

// Random member of HS(2L',K) built as exp of a Lie element; `spread` controls
// how far from the identity.
Matrix sample_group_element(int n, SymmetryClass cls, RngStream& rng, double spread = 1.0);

}  // namespace hslyap

#endif
