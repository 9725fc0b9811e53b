#ifndef HSLYAP_FRAMES_HPP
#define HSLYAP_FRAMES_HPP

#include "hslyap/symplectic.hpp"
#include "hslyap/types.hpp"

namespace hslyap {

// Maximal isotropic frame: 2L' x L' with Phi* Phi = 1 and Phi* J Phi = 0,
// plus the class symmetry (R: conj(Phi) = Phi, H: I* conj(Phi) I = Phi).
struct IsotropicFrame {
  Matrix phi;
  SymmetryClass cls = SymmetryClass::Complex;

  int ambient() const { return static_cast<int>(phi.rows()); }
  int half() const { return static_cast<int>(phi.cols()); }
  int channels() const {
    return cls == SymmetryClass::Quaternion ? half() / 2 : half();
  }

  double orthonormality_residual() const;
  double isotropy_residual() const;
  double symmetry_residual() const;
  void validate(double tol = 1e-10) const;
};

// Upper triangular cocycle S(T, Phi); for class H the entries are quaternion
// 2x2 blocks and the diagonal blocks are positive multiples of q0.
struct TriangularCocycle {
  Matrix S;
  SymmetryClass cls = SymmetryClass::Complex;

  int channels() const {
    return cls == SymmetryClass::Quaternion ? static_cast<int>(S.rows()) / 2
                                            : static_cast<int>(S.rows());
  }
  // Positive diagonal entry of channel p (1-based); the q0 coefficient for H.
  double diagonal(int p) const;
};

struct UVPair {
  Matrix U, V;
};

// Gram-Schmidt orthonormalization of the columns of y (in place), modified
// Gram-Schmidt with one reorthogonalization pass.  Class H runs over 2-column
// quaternion blocks with quaternion-valued inner products.  Returns the
// triangular cocycle.
TriangularCocycle gram_schmidt_cocycle(Matrix& y, SymmetryClass cls);

// The group action: T . Phi = T Phi S(T,Phi)^{-1}.
std::pair<IsotropicFrame, TriangularCocycle> act(const Matrix& t, const IsotropicFrame& phi);

// g_p(T, Phi) = tau log(e_p* S e_p), 1-based channel index.
double additive_cocycle(const TriangularCocycle& s, int p, SymmetryClass cls);

UVPair uv_of_frame(const IsotropicFrame& phi);
IsotropicFrame frame_of_uv(const UVPair& uv, SymmetryClass cls);

// max-norm of S(T, Phi t) - t^{-1} S(T, Phi) t for a torus element t
// (diagonal unitary; R: diagonal +-1; H: quaternion diag(a, conj a) blocks).
double torus_covariance_check(const Matrix& t_op, const IsotropicFrame& phi,
                              const Matrix& torus);

IsotropicFrame random_frame(SymmetryClass cls, int channels, RngStream& rng);

// Maintenance used on long chains: re-impose the class symmetry and the
// isotropy constraint (first-order projection Phi += J Phi (Phi*J Phi)/2),
// then re-orthonormalize.
void reproject_frame(IsotropicFrame& phi);

}  // namespace hslyap

#endif
