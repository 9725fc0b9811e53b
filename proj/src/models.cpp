#include "hslyap/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hslyap/ando.hpp"

namespace hslyap {

const char* model_name(Model m) {
  switch (m) {
    case Model::AndersonMagnetic: return "anderson-magnetic";
    case Model::AndersonReal: return "anderson-real";
    case Model::Ando: return "ando";
    case Model::Slab: return "slab";
  }
  return "?";
}

std::optional<Model> model_from_name(const std::string& name) {
  if (name == "anderson-magnetic" || name == "magnetic") return Model::AndersonMagnetic;
  if (name == "anderson-real" || name == "real") return Model::AndersonReal;
  if (name == "ando") return Model::Ando;
  if (name == "slab") return Model::Slab;
  return std::nullopt;
}

SymmetryClass ModelParams::symmetry_class() const {
  switch (model) {
    case Model::AndersonMagnetic: return SymmetryClass::Complex;
    case Model::AndersonReal: return SymmetryClass::Real;
    case Model::Ando: return SymmetryClass::Quaternion;
    case Model::Slab: return SymmetryClass::Complex;
  }
  return SymmetryClass::Complex;
}

void ModelParams::normalize() {
  if (model == Model::Slab) {
    if (d < 2) throw Error("slab model needs dimension d >= 2");
    if (N < 2) throw Error("slab model needs transverse width N >= 2");
    if (static_cast<int>(phis.size()) != d - 1)
      throw Error("slab model needs d-1 flux phases");
    long fiber = 1;
    for (int j = 1; j < d; ++j) fiber *= N;
    if (fiber > 4096) throw Error("slab fiber dimension exceeds 4096");
    L = static_cast<int>(fiber);
  }
  if (L < 1) throw Error("channel count must be positive");
  if (lambda < 0) throw Error("disorder coupling must be >= 0");
}

RealVector ChannelData::pi_e() const {
  RealVector v(channels());
  for (int i = 0; i < channels(); ++i) v[i] = elliptic(i) ? 1.0 : 0.0;
  return v;
}

RealVector ChannelData::pi_h() const {
  RealVector v(channels());
  for (int i = 0; i < channels(); ++i) v[i] = elliptic(i) ? 0.0 : 1.0;
  return v;
}

static Matrix ambient_projection(const RealVector& diag, SymmetryClass cls) {
  const int w = channel_width(cls);
  const int l = static_cast<int>(diag.size()) * w;
  Matrix p = Matrix::Zero(2 * l, 2 * l);
  for (int c = 0; c < diag.size(); ++c)
    for (int s = 0; s < w; ++s) {
      p(w * c + s, w * c + s) = diag[c];
      p(l + w * c + s, l + w * c + s) = diag[c];
    }
  return p;
}

Matrix ChannelData::Pi_e(SymmetryClass cls) const { return ambient_projection(pi_e(), cls); }
Matrix ChannelData::Pi_h(SymmetryClass cls) const { return ambient_projection(pi_h(), cls); }

namespace detail {

Matrix dft_matrix(int L) {
  Matrix m(L, L);
  const double w = 2.0 * M_PI / L;
  const double s = 1.0 / std::sqrt(double(L));
  for (int j = 0; j < L; ++j)        // column j is f_{j+1}
    for (int k = 0; k < L; ++k)      // row k is site k+1
      m(k, j) = s * std::exp(iu * (w * double((j + 1) * (k + 1))));
  return m;
}

Matrix real_fourier_matrix(int L) {
  Matrix m = Matrix::Zero(L, L);
  const double w = 2.0 * M_PI / L;
  const double s1 = 1.0 / std::sqrt(double(L));
  const double s2 = std::sqrt(2.0 / double(L));
  for (int j = 0; j < L; ++j) {
    const int l = j + 1;
    for (int k = 0; k < L; ++k) {
      const int site = k + 1;
      if (l == L) m(k, j) = s1;
      else if (2 * l == L) m(k, j) = (site % 2 == 0 ? s1 : -s1);
      else if (2 * l < L) m(k, j) = s2 * std::sin(w * double(l) * site);
      else m(k, j) = s2 * std::cos(w * double(L - l) * site);
    }
  }
  return m;
}

Matrix real_fourier_recombination(int L) {
  Matrix a = Matrix::Zero(L, L);
  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < L; ++j) {
    const int l = j + 1;
    if (l == L || 2 * l == L) {
      a(j, j) = 1.0;
    } else if (2 * l < L) {
      a(j, j) = -iu * s;          // f-hat_l = (-i f_l + i f_{L-l})/sqrt2
      a(L - l - 1, j) = iu * s;
    } else {
      a(L - l - 1, j) = s;        // f-hat_l = (f_{L-l} + f_l)/sqrt2
      a(j, j) = s;
    }
  }
  return a;
}

namespace {

// Cyclic shift with S2 f_l = exp(2 pi i l / L) f_l.
Matrix shift_matrix(int L) {
  Matrix s = Matrix::Zero(L, L);
  for (int k = 0; k < L; ++k) s(k, (k + 1) % L) = 1.0;
  return s;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct SlotData {
  double mu;
  Complex rho;
  double kappa;   // signed, |kappa| > 1 (hyperbolic), 1 (elliptic)
  double eta;     // rotation angle (elliptic), 0 otherwise
  double h;
  double sigma;   // sign flip of the second N column (hyperbolic mu < -2)
  bool elliptic;
};

SlotData classify_channel(double mu, double parabolic_tol, int natural_index) {
  SlotData s{};
  s.mu = mu;
  const double gap = std::abs(std::abs(mu) - 2.0);
  if (gap <= parabolic_tol) throw InternalBandEdge(natural_index, std::abs(mu));
  if (std::abs(mu) < 2.0) {
    s.elliptic = true;
    const double im = 0.5 * std::sqrt(4.0 - mu * mu);
    s.rho = Complex(0.5 * mu, im);
    s.eta = std::atan2(im, 0.5 * mu);
    s.kappa = 1.0;
    s.h = 1.0 / std::sqrt(im);   // sin(eta) = Im rho on |rho| = 1
    s.sigma = 1.0;
  } else {
    s.elliptic = false;
    const double root = std::sqrt(0.25 * mu * mu - 1.0);
    const double rho = 0.5 * mu + (mu > 0 ? root : -root);
    s.rho = rho;
    s.kappa = rho;
    s.eta = 0.0;
    const double x = rho - 1.0 / rho;
    s.h = 1.0 / std::sqrt(std::abs(x));
    s.sigma = x > 0 ? 1.0 : -1.0;
  }
  return s;
}

std::vector<int> flat_digits(int idx, const std::vector<int>& dims) {
  std::vector<int> digits(dims.size());
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    digits[k] = idx % dims[k];
    idx /= dims[k];
  }
  return digits;
}

}  // namespace

NormalFormBundle build_lattice_normal_form(const ModelParams& params_in,
                                           const std::vector<int>& dims,
                                           const std::vector<double>& phases,
                                           bool real_basis, bool allow_zero_phi) {
  ModelParams params = params_in;
  params.normalize();
  const int L = params.L;
  if (real_basis && dims.size() != 1)
    throw Error("real Fourier basis is only used on the ring");
  if (!real_basis && !allow_zero_phi) {
    bool all_zero = true;
    for (double p : phases) all_zero &= (p == 0.0);
    if (all_zero)
      throw Error("zero flux degenerates to class R; use the real builder");
  }

  // Fourier basis of the fiber and the free diagonal mu0.
  Matrix fourier;
  RealVector mu0(L);
  if (dims.size() == 1) {
    fourier = real_basis ? real_fourier_matrix(L) : dft_matrix(L);
    for (int j = 0; j < L; ++j)
      mu0[j] = params.E - 2.0 * std::cos(phases[0] + 2.0 * M_PI * (j + 1) / L);
  } else {
    fourier = dft_matrix(dims[0]);
    for (size_t k = 1; k < dims.size(); ++k) fourier = kron(fourier, dft_matrix(dims[k]));
    for (int j = 0; j < L; ++j) {
      const std::vector<int> digits = flat_digits(j, dims);
      double acc = params.E;
      for (size_t k = 0; k < dims.size(); ++k)
        acc -= 2.0 * std::cos(phases[k] + 2.0 * M_PI * (digits[k] + 1) / dims[k]);
      mu0[j] = acc;
    }
  }

  // Ordering permutation: modulus non-increasing, stable in Fourier index.
  std::vector<int> perm(L);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    return std::abs(mu0[a]) > std::abs(mu0[b]);
  });

  NormalFormBundle b;
  b.params = params;
  b.cls = real_basis ? SymmetryClass::Real : SymmetryClass::Complex;
  b.n = 2 * L;
  b.fourier = fourier;
  b.pref = 1.0;
  b.diagonal_kernel = true;

  ChannelData& ch = b.channels;
  ch.mu.resize(L);
  ch.rho.resize(L);
  ch.kappa.resize(L);
  ch.eta.resize(L);
  ch.type.resize(L);
  ch.perm = perm;

  b.n11.resize(L); b.n12.resize(L); b.n21.resize(L); b.n22.resize(L);
  for (int slot = 0; slot < L; ++slot) {
    const int nat = perm[slot];
    const SlotData s = classify_channel(mu0[nat], params.parabolic_tol, nat + 1);
    ch.mu[slot] = s.mu;
    ch.rho[slot] = s.rho;
    ch.kappa[slot] = s.kappa;
    ch.eta[slot] = s.eta;
    ch.type[slot] = s.elliptic ? ChannelType::Elliptic : ChannelType::Hyperbolic;
    if (s.elliptic) {
      b.n11[slot] = s.h;
      b.n12[slot] = 0.0;
      b.n21[slot] = s.h * std::cos(s.eta);
      b.n22[slot] = s.h * std::sin(s.eta);
    } else {
      b.n11[slot] = s.h;
      b.n12[slot] = s.sigma * s.h;
      b.n21[slot] = s.h / s.kappa;
      b.n22[slot] = s.sigma * s.h * s.kappa;
    }
  }
  ch.L_e = static_cast<int>(std::count(ch.type.begin(), ch.type.end(), ChannelType::Elliptic));
  ch.L_h = L - ch.L_e;

  // Exact per-channel inverse of the 2x2 blocks of N.
  b.ninv11.resize(L); b.ninv12.resize(L); b.ninv21.resize(L); b.ninv22.resize(L);
  for (int slot = 0; slot < L; ++slot) {
    const Complex det = b.n11[slot] * b.n22[slot] - b.n12[slot] * b.n21[slot];
    b.ninv11[slot] = b.n22[slot] / det;
    b.ninv12[slot] = -b.n12[slot] / det;
    b.ninv21[slot] = -b.n21[slot] / det;
    b.ninv22[slot] = b.n11[slot] / det;
  }

  // Dense copies of the basis changes and the normal form factors.
  Matrix qm = Matrix::Zero(L, L);
  for (int slot = 0; slot < L; ++slot) qm(perm[slot], slot) = 1.0;
  b.M = Matrix::Zero(2 * L, 2 * L);
  b.M.topLeftCorner(L, L) = fourier;
  b.M.bottomRightCorner(L, L) = fourier;
  b.Q = Matrix::Zero(2 * L, 2 * L);
  b.Q.topLeftCorner(L, L) = qm;
  b.Q.bottomRightCorner(L, L) = qm;
  b.N = Matrix::Zero(2 * L, 2 * L);
  b.N_inv = Matrix::Zero(2 * L, 2 * L);
  for (int slot = 0; slot < L; ++slot) {
    b.N(slot, slot) = b.n11[slot];
    b.N(slot, L + slot) = b.n12[slot];
    b.N(L + slot, slot) = b.n21[slot];
    b.N(L + slot, L + slot) = b.n22[slot];
    b.N_inv(slot, slot) = b.ninv11[slot];
    b.N_inv(slot, L + slot) = b.ninv12[slot];
    b.N_inv(L + slot, slot) = b.ninv21[slot];
    b.N_inv(L + slot, L + slot) = b.ninv22[slot];
  }
  b.R_h = Matrix::Zero(2 * L, 2 * L);
  b.R_e = Matrix::Zero(2 * L, 2 * L);
  for (int slot = 0; slot < L; ++slot) {
    b.R_h(slot, slot) = ch.kappa[slot];
    b.R_h(L + slot, L + slot) = 1.0 / ch.kappa[slot];
    b.R_e(slot, slot) = std::cos(ch.eta[slot]);
    b.R_e(slot, L + slot) = -std::sin(ch.eta[slot]);
    b.R_e(L + slot, slot) = std::sin(ch.eta[slot]);
    b.R_e(L + slot, L + slot) = std::cos(ch.eta[slot]);
  }
  b.R = b.R_h * b.R_e;

  b.init_kernel_tables(dims);
  return b;
}

}  // namespace detail

void NormalFormBundle::init_kernel_tables(const std::vector<int>& dims) {
  const int L = params.L;
  kernel_dims = dims;
  if (cls == SymmetryClass::Complex) {
    // Circulant path: V(i,j) = what[diffP(i,j)], what = dft_phases * w.
    dft_phases.resize(L, L);
    for (int t = 0; t < L; ++t) {
      const std::vector<int> td = detail_flat_digits(t);
      for (int s = 0; s < L; ++s) {
        const std::vector<int> sd = detail_flat_digits(s);
        double angle = 0.0;
        for (size_t k = 0; k < dims.size(); ++k)
          angle += 2.0 * M_PI * double(td[k]) * double(sd[k] + 1) / dims[k];
        dft_phases(t, s) = std::exp(iu * angle) / double(L);
      }
    }
    diffP.resize(L, L);
    for (int i = 0; i < L; ++i) {
      const std::vector<int> di = detail_flat_digits(channels.perm[i]);
      for (int j = 0; j < L; ++j) {
        const std::vector<int> dj = detail_flat_digits(channels.perm[j]);
        int flat = 0;
        for (size_t k = 0; k < dims.size(); ++k)
          flat = flat * dims[k] + ((dj[k] - di[k]) % dims[k] + dims[k]) % dims[k];
        diffP(i, j) = flat;
      }
    }
  } else {
    // Real-basis path: V = perm^t (fourier^t w fourier) perm with real fourier.
    fourier_real = fourier.real();
  }
  if (diagonal_kernel) {
    r_ce.resize(L); r_se.resize(L); r_ka.resize(L); r_ki.resize(L);
    for (int i = 0; i < L; ++i) {
      r_ce[i] = Complex(std::cos(channels.eta[i]), 0.0);
      r_se[i] = Complex(std::sin(channels.eta[i]), 0.0);
      r_ka[i] = Complex(channels.kappa[i], 0.0);
      r_ki[i] = Complex(1.0 / channels.kappa[i], 0.0);
    }
  }
}

std::vector<int> NormalFormBundle::detail_flat_digits(int idx) const {
  std::vector<int> digits(kernel_dims.size());
  for (int k = static_cast<int>(kernel_dims.size()) - 1; k >= 0; --k) {
    digits[k] = idx % kernel_dims[k];
    idx /= kernel_dims[k];
  }
  return digits;
}

Matrix transfer_matrix(const ModelParams& params_in, const RealVector& w) {
  ModelParams params = params_in;
  params.normalize();
  const int L = params.L;
  if (w.size() != L) throw DimensionError("transfer_matrix disorder", L, w.size());

  if (params.model == Model::Ando) {
    const double t = params.t;
    const Matrix s2 = detail::shift_matrix(L);
    const Matrix q2 = quaternion_unit(2), q3 = quaternion_unit(3);
    const Matrix id2 = Matrix::Identity(2, 2);
    auto kron2 = [](const Matrix& a, const Matrix& b) {
      Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
      for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
          out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
      return out;
    };
    const Matrix hop = kron2(Matrix::Identity(L, L), id2 + t * q2);
    const Matrix hop_inv = kron2(Matrix::Identity(L, L), (id2 - t * q2) / (1.0 + t * t));
    Matrix a = params.E * Matrix::Identity(2 * L, 2 * L) -
               kron2(Matrix(s2 + s2.adjoint()), id2) -
               t * kron2(Matrix(s2 - s2.adjoint()), q3) -
               params.lambda * kron2(Matrix(w.cast<Complex>().asDiagonal()), id2);
    Matrix s = Matrix::Zero(4 * L, 4 * L);
    s.topLeftCorner(2 * L, 2 * L) = a * hop_inv;
    s.topRightCorner(2 * L, 2 * L) = -hop.adjoint();
    s.bottomLeftCorner(2 * L, 2 * L) = hop_inv;
    return s;
  }

  // Spinless block form ((E - Delta - lambda w, -1), (1, 0)).
  Matrix delta;
  if (params.model == Model::Slab) {
    delta = Matrix::Zero(L, L);
    const int nd = params.d - 1;
    for (int k = 0; k < nd; ++k) {
      Matrix factor = Matrix::Identity(1, 1);
      for (int j = 0; j < nd; ++j) {
        const Matrix hop_j = std::exp(iu * params.phis[k]) * detail::shift_matrix(params.N) +
                             std::exp(-iu * params.phis[k]) * detail::shift_matrix(params.N).adjoint();
        const Matrix piece = (j == k) ? hop_j : Matrix(Matrix::Identity(params.N, params.N));
        Matrix out(factor.rows() * piece.rows(), factor.cols() * piece.cols());
        for (int r = 0; r < factor.rows(); ++r)
          for (int c = 0; c < factor.cols(); ++c)
            out.block(r * piece.rows(), c * piece.cols(), piece.rows(), piece.cols()) =
                factor(r, c) * piece;
        factor = std::move(out);
      }
      delta += factor;
    }
  } else {
    const double phi = params.model == Model::AndersonMagnetic ? params.phi : 0.0;
    const Matrix s2 = detail::shift_matrix(L);
    delta = std::exp(iu * phi) * s2 + std::exp(-iu * phi) * s2.adjoint();
  }
  Matrix s = Matrix::Zero(2 * L, 2 * L);
  s.topLeftCorner(L, L) = params.E * Matrix::Identity(L, L) - delta -
                          params.lambda * Matrix(w.cast<Complex>().asDiagonal());
  s.topRightCorner(L, L) = -Matrix::Identity(L, L);
  s.bottomLeftCorner(L, L) = Matrix::Identity(L, L);
  return s;
}

NormalFormBundle build_normal_form_magnetic(const ModelParams& params) {
  if (params.model != Model::AndersonMagnetic)
    throw Error("build_normal_form_magnetic: wrong model tag");
  return detail::build_lattice_normal_form(params, {params.L}, {params.phi},
                                           /*real_basis=*/false, /*allow_zero_phi=*/false);
}

NormalFormBundle build_normal_form_real(const ModelParams& params) {
  if (params.model != Model::AndersonReal)
    throw Error("build_normal_form_real: wrong model tag");
  if (params.phi != 0.0) throw Error("real Anderson model requires phi = 0");
  return detail::build_lattice_normal_form(params, {params.L}, {0.0},
                                           /*real_basis=*/true, /*allow_zero_phi=*/true);
}

NormalFormBundle build_normal_form_slab(const ModelParams& params_in) {
  ModelParams params = params_in;
  if (params.model != Model::Slab) throw Error("build_normal_form_slab: wrong model tag");
  params.normalize();
  std::vector<int> dims(params.d - 1, params.N);
  return detail::build_lattice_normal_form(params, dims, params.phis,
                                           /*real_basis=*/false, /*allow_zero_phi=*/true);
}

NormalFormBundle build_normal_form(const ModelParams& params) {
  switch (params.model) {
    case Model::AndersonMagnetic: return build_normal_form_magnetic(params);
    case Model::AndersonReal: return build_normal_form_real(params);
    case Model::Ando: return build_normal_form_ando(params);
    case Model::Slab: return build_normal_form_slab(params);
  }
  throw Error("unknown model");
}

Matrix NormalFormBundle::disorder_block(const RealVector& w) const {
  const int L = params.L;
  if (w.size() != L) throw DimensionError("disorder_block", L, w.size());
  Matrix V(L, L);
  if (cls == SymmetryClass::Complex) {
    const Vector what = dft_phases * w.cast<Complex>();
    for (int j = 0; j < L; ++j)
      for (int i = 0; i < L; ++i) V(i, j) = what[diffP(i, j)];
  } else {
    const RealMatrix scaled = fourier_real.transpose() * (w.asDiagonal() * fourier_real);
    for (int j = 0; j < L; ++j)
      for (int i = 0; i < L; ++i)
        V(i, j) = scaled(channels.perm[i], channels.perm[j]);
  }
  return V;
}

Matrix NormalFormBundle::perturbation(const RealVector& w) const {
  const int half_n = half();
  Matrix V = disorder_block(w);
  Matrix B = Matrix::Zero(n, n);
  if (cls == SymmetryClass::Quaternion) {
    for (int i = 0; i < params.L; ++i)
      for (int j = 0; j < params.L; ++j)
        for (int s = 0; s < 2; ++s)
          B(half_n + 2 * i + s, 2 * j + s) = pref * V(i, j);
  } else {
    B.bottomLeftCorner(half_n, half_n) = pref * V;
  }
  return N_inv * B * N;
}

void NormalFormBundle::apply_step(Matrix& phi, const RealVector& w) const {
  const int half_n = half();
  const Matrix V = disorder_block(w);
  if (diagonal_kernel) {
    auto up = phi.topRows(half_n);
    auto lo = phi.bottomRows(half_n);
    Matrix psi = up.array().colwise() * n11.array();
    psi.array() += lo.array().colwise() * n12.array();
    const Matrix chi = V * psi;
    up.array() += params.lambda * (chi.array().colwise() * ninv12.array());
    lo.array() += params.lambda * (chi.array().colwise() * ninv22.array());
  } else {
    const Matrix psi_up = N.topRows(half_n) * phi;
    Matrix chi(half_n, phi.cols());
    if (cls == SymmetryClass::Quaternion) {
      Matrix part(params.L, phi.cols());
      for (int s = 0; s < 2; ++s) {
        for (int i = 0; i < params.L; ++i) part.row(i) = psi_up.row(2 * i + s);
        part = V * part;
        for (int i = 0; i < params.L; ++i) chi.row(2 * i + s) = part.row(i);
      }
    } else {
      chi = V * psi_up;
    }
    phi.noalias() += (params.lambda * pref) * (N_inv.rightCols(half_n) * chi);
  }
  apply_rotation(phi);
}

void NormalFormBundle::apply_rotation(Matrix& phi) const {
  const int half_n = half();
  if (diagonal_kernel) {
    auto up = phi.topRows(half_n);
    auto lo = phi.bottomRows(half_n);
    Matrix tmp = up.array().colwise() * r_ce.array();
    tmp.array() -= lo.array().colwise() * r_se.array();
    Matrix tmp2 = up.array().colwise() * r_se.array();
    tmp2.array() += lo.array().colwise() * r_ce.array();
    up = tmp.array().colwise() * r_ka.array();
    lo = tmp2.array().colwise() * r_ki.array();
  } else {
    phi = R * phi;
  }
}

PerturbationGenerator sample_perturbation(const NormalFormBundle& bundle, RngStream& rng) {
  RealVector w(bundle.params.L);
  for (int i = 0; i < w.size(); ++i) w[i] = draw_disorder(bundle.params.disorder, rng);
  return {bundle.perturbation(w), w};
}

}  // namespace hslyap
