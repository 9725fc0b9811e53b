#ifndef HSLYAP_MODELS_HPP
#define HSLYAP_MODELS_HPP

#include <optional>
#include <vector>

#include "hslyap/frames.hpp"
#include "hslyap/rng.hpp"
#include "hslyap/symplectic.hpp"
#include "hslyap/types.hpp"

namespace hslyap {

enum class Model { AndersonMagnetic, AndersonReal, Ando, Slab };

const char* model_name(Model m);
std::optional<Model> model_from_name(const std::string& name);

struct ModelParams {
  Model model = Model::AndersonReal;
  int L = 1;                  // channels (Slab: N^(d-1), filled by normalize())
  double E = 0.0;
  double lambda = 0.0;
  double phi = 0.0;           // magnetic flux (AndersonMagnetic)
  std::vector<double> phis;   // slab fluxes phi_2..phi_d
  int N = 0;                  // slab transverse width
  int d = 0;                  // slab dimension
  double t = 0.0;             // Ando spin-orbit coupling
  Disorder disorder = Disorder::UniformSqrt3;
  double parabolic_tol = 1e-6;
  double case_tol = 1e-8;

  SymmetryClass symmetry_class() const;
  // Slab: L = N^(d-1); also validates basic ranges.
  void normalize();
  int ambient() const { return 2 * ambient_size(symmetry_class(), L); }
};

enum class ChannelType { Elliptic, Hyperbolic };

struct ChannelData {
  RealVector mu;            // ordered by modulus, hyperbolic first (Ando: Re nu)
  Vector rho;               // eigenvalue representative per channel
  RealVector kappa;         // expansion factor, |kappa| >= 1; 1 on elliptic
  RealVector eta;           // rotation angle on elliptic channels, else 0
  std::vector<ChannelType> type;
  std::vector<int> perm;    // slot -> natural (Fourier) channel index
  int L_e = 0, L_h = 0;

  int channels() const { return static_cast<int>(type.size()); }
  bool elliptic(int slot) const { return type[slot] == ChannelType::Elliptic; }
  // 0/1 diagonal of the elliptic projection on channel slots.
  RealVector pi_e() const;
  RealVector pi_h() const;
  // Ambient projections Pi_e = diag(pi_e, pi_e) etc., with the class width.
  Matrix Pi_e(SymmetryClass cls) const;
  Matrix Pi_h(SymmetryClass cls) const;
};

// Everything needed to run the normal-form chain of one model at one energy.
struct NormalFormBundle {
  ModelParams params;
  SymmetryClass cls = SymmetryClass::Complex;
  int n = 0;  // ambient complex size 2L'

  Matrix M, Q, N;            // S = M Q N (R e^{lambda P}) (M Q N)^{-1}
  Matrix N_inv;
  Matrix R, R_h, R_e;
  ChannelData channels;

  // Disorder pipeline: P = N^{-1} [[0,0],[pref * V, 0]] N with
  // V = perm^t W perm (tensored with 1_2 in class H) and W = fourier^* w fourier.
  Matrix fourier;            // m, m-hat or tensor DFT (site space, LxL)
  double pref = 1.0;         // Ando carries 1/(1+t^2)

  // Structured fast path (spinless models): N as four diagonals.
  bool diagonal_kernel = false;
  Vector n11, n12, n21, n22, ninv11, ninv12, ninv21, ninv22;

  // Cached step-kernel tables.
  std::vector<int> kernel_dims;   // fiber dimensions ({L} for the ring)
  Matrix dft_phases;              // what = dft_phases * w (class C circulant path)
  Eigen::MatrixXi diffP;          // permuted circulant index table
  RealMatrix fourier_real;        // real-basis GEMM path
  Vector r_ce, r_se, r_ka, r_ki;      // rotation/expansion diagonals

  void init_kernel_tables(const std::vector<int>& dims);
  std::vector<int> detail_flat_digits(int idx) const;

  int half() const { return n / 2; }
  Matrix basis() const { return M * Q * N; }

  // Dense disorder generator for a given sample w (length L sites).
  Matrix perturbation(const RealVector& w) const;
  // V = perm^t (fourier^* w fourier) perm in channel-slot order (site space).
  Matrix disorder_block(const RealVector& w) const;

  // One chain step in normal coordinates: phi <- R (phi + lambda P phi),
  // exact for the nilpotent P of all four models (P^2 = 0).
  void apply_step(Matrix& phi, const RealVector& w) const;
  // Apply R only (the lambda = 0 step).
  void apply_rotation(Matrix& phi) const;
};

// Dense random transfer matrix of the model at disorder sample w (length L).
Matrix transfer_matrix(const ModelParams& params, const RealVector& w);

NormalFormBundle build_normal_form_magnetic(const ModelParams& params);
NormalFormBundle build_normal_form_real(const ModelParams& params);
NormalFormBundle build_normal_form_ando(const ModelParams& params);
NormalFormBundle build_normal_form_slab(const ModelParams& params);
NormalFormBundle build_normal_form(const ModelParams& params);

namespace detail {
// Shared lattice pipeline; magnetic = lattice({L}, {phi}), slab = lattice(dims, phis).
// `real_basis` switches to the cosine/sine Fourier basis (class R).
NormalFormBundle build_lattice_normal_form(const ModelParams& params,
                                           const std::vector<int>& dims,
                                           const std::vector<double>& phases,
                                           bool real_basis, bool allow_zero_phi);
// Real Fourier basis m-hat (orthogonal) and the unitary a with m-hat = m a.
Matrix dft_matrix(int L);
Matrix real_fourier_matrix(int L);
Matrix real_fourier_recombination(int L);  // a
}  // namespace detail

struct PerturbationGenerator {
  Matrix P;
  RealVector w;
};

PerturbationGenerator sample_perturbation(const NormalFormBundle& bundle, RngStream& rng);

}  // namespace hslyap

#endif
