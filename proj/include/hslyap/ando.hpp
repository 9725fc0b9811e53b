#ifndef HSLYAP_ANDO_HPP
#define HSLYAP_ANDO_HPP

#include "hslyap/types.hpp"

namespace hslyap {

// The 4x4 transfer block of the spin-orbit Laplacian at frequency eta,
// with e = E - 2 cos(eta) and f = 2 t sin(eta).
Matrix ando_s_eta(double E, double t, double eta);

enum class AndoCase { G1, G2, G3, G4 };

const char* ando_case_name(AndoCase c);

struct AndoBlockSpectrum {
  double a = 0.0, b = 0.0;      // char. polynomial l^4 - a l^3 + b l^2 - a l + 1
  Complex nu_plus, nu_minus;    // roots of x^2 - a x + (b - 2)
  Complex kappa_plus, kappa_minus;  // first-branch eigenvalues, Im >= 0
  AndoCase constellation = AndoCase::G2;
  bool plus_elliptic = false, minus_elliptic = false;
};

// Coefficients from traces of S_eta (the printed closed form for b is not
// used; see verify notes), branch conventions Im kappa >= 0 and |kappa| >= 1
// for real roots.  Throws DegenerateBlock within case_tol of a constellation
// boundary.
AndoBlockSpectrum ando_block_spectrum(double E, double t, double eta,
                                      double case_tol = 1e-8);

struct AndoBlockBasis {
  AndoBlockSpectrum spectrum;
  Matrix Ntilde;   // 8x8 in HS(4,H)
  Matrix Dtilde;   // 8x8 normal form, two quaternion channels
  // Per quaternion channel (0,1): expansion modulus (>= 1; 1 if elliptic),
  // rotation angle (elliptic) and a representative eigenvalue.
  double kappa_mod[2] = {1.0, 1.0};
  double angle[2] = {0.0, 0.0};
  Complex rep[2];
  bool elliptic[2] = {false, false};
};

// Diagonalizing pair (Ntilde, Dtilde) for the checkerboard sum of S_eta and
// S_{-eta}; Ntilde^{-1} (A* S_eta (+) S_{-eta} A) Ntilde = Dtilde.
AndoBlockBasis ando_block_basis(double E, double t, double eta,
                                double case_tol = 1e-8);

// Quaternion normal form of an unpaired (eta = 0 or pi) 4x4 block; one
// quaternion channel.
struct AndoFundamentalBasis {
  AndoBlockSpectrum spectrum;
  Matrix Ntilde;   // 4x4 in HS(2,H)
  Matrix Dtilde;
  double kappa_mod = 1.0;
  double angle = 0.0;    // mean rotation angle (elliptic)
  Complex rep;
  bool elliptic_channel = false;
};

AndoFundamentalBasis ando_fundamental_basis(double E, double t, double eta,
                                            double case_tol = 1e-8);

// Interleaved symplectic direct sum: coordinates (u_A, u_B, l_A, l_B).
Matrix checkerboard_sum(const Matrix& a, const Matrix& b);

// Assembly unitaries of Appendix B for the 8x8 pair block.
Matrix ando_pair_A();  // diag(a,a), a = 2^{-1/2} ((-i,1),(i,1)) x 1_2
Matrix ando_pair_B();  // diag(b,b), b = i * P_23

}  // namespace hslyap

#endif
