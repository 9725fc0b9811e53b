#include "hslyap/ando.hpp"

#include <algorithm>
#include <numeric>

#include "hslyap/models.hpp"
#include "hslyap/symplectic.hpp"

namespace hslyap {

const char* ando_case_name(AndoCase c) {
  switch (c) {
    case AndoCase::G1: return "G1";
    case AndoCase::G2: return "G2";
    case AndoCase::G3: return "G3";
    case AndoCase::G4: return "G4";
  }
  return "?";
}

Matrix ando_s_eta(double E, double t, double eta) {
  const double e = E - 2.0 * std::cos(eta);
  const double f = 2.0 * t * std::sin(eta);
  const double d = 1.0 + t * t;
  Matrix s(4, 4);
  s << (e - f * t) / d, (-e * t - f) / d, -1.0, t,
       (e * t - f) / d, (e + f * t) / d, -t, -1.0,
       1.0 / d, -t / d, 0.0, 0.0,
       t / d, 1.0 / d, 0.0, 0.0;
  return s;
}

namespace {

// Root of x^2 - nu x + 1 on the first branch: Im >= 0, and |kappa| >= 1 when
// both roots are real.
Complex kappa_branch(Complex nu) {
  const Complex r = std::sqrt(nu * nu / 4.0 - 1.0);
  const Complex k1 = nu / 2.0 + r;
  const Complex k2 = nu / 2.0 - r;
  if (std::abs(k1.imag()) > 1e-14 || std::abs(k2.imag()) > 1e-14)
    return k1.imag() >= 0 ? k1 : k2;
  return std::abs(k1) >= std::abs(k2) ? k1 : k2;
}

Vector eigvec_of(const Matrix& s, Complex kappa) {
  const Matrix m = s - kappa * Matrix::Identity(4, 4);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  Vector v = svd.matrixV().col(3);
  if ((s * v - kappa * v).norm() > 1e-8 * std::max(1.0, s.norm()))
    throw DegenerateBlock("eigenvector residual too large");
  return v;
}

Vector realize(Vector v) {
  int imax = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  v *= std::conj(v[imax]) / std::abs(v[imax]);
  if (v.imag().cwiseAbs().maxCoeff() > 1e-8)
    throw DegenerateBlock("real eigenvector has large imaginary part");
  return v.real().cast<Complex>();
}

// Elliptic channel columns (w, w') with w = Re v, w' = -Im v and
// w^t J w' = -1; the eigenvalue of the returned v is kappa (Im > 0) when the
// sign of the symplectic pairing allows it, else conj(kappa).
struct EllipticPair {
  Vector w, wp;
  Complex eigenvalue;
};

EllipticPair elliptic_pair(const Matrix& j4, Vector v, Complex kappa) {
  double r = ((v.adjoint() * j4 * v)(0, 0)).imag();
  if (std::abs(r) < 1e-10)
    throw DegenerateBlock("elliptic normalization pairing numerically zero");
  Complex eig = kappa;
  if (r < 0) {
    v = v.conjugate();
    eig = std::conj(kappa);
    r = -r;
  }
  v *= std::sqrt(2.0 / r);
  EllipticPair p;
  p.w = v.real().cast<Complex>();
  p.wp = (-v.imag()).cast<Complex>();
  p.eigenvalue = eig;
  return p;
}

// Hyperbolic channel columns (v, v') for real kappa with |kappa| > 1,
// v real eigenvector of kappa, v' of 1/kappa, scaled so v^t J v' = -1.
struct HyperbolicPair {
  Vector v, vp;
};

HyperbolicPair hyperbolic_pair(const Matrix& j4, const Matrix& s, Complex kappa) {
  HyperbolicPair p;
  p.v = realize(eigvec_of(s, kappa));
  p.vp = realize(eigvec_of(s, 1.0 / kappa));
  const Complex pair = (p.v.adjoint() * j4 * p.vp)(0, 0);
  if (std::abs(pair) < 1e-10)
    throw DegenerateBlock("hyperbolic normalization pairing numerically zero");
  p.vp *= -1.0 / pair;
  return p;
}

}  // namespace

AndoBlockSpectrum ando_block_spectrum(double E, double t, double eta, double case_tol) {
  AndoBlockSpectrum sp;
  const Matrix s = ando_s_eta(E, t, eta);
  sp.a = s.trace().real();
  sp.b = 0.5 * (sp.a * sp.a - (s * s).trace().real());
  const double disc = 0.25 * sp.a * sp.a + 2.0 - sp.b;
  if (std::abs(disc) <= case_tol)
    throw DegenerateBlock("kappa collision (discriminant within tolerance of 0)");
  if (disc < 0.0) {
    const double root = std::sqrt(-disc);
    sp.nu_plus = Complex(0.5 * sp.a, root);
    sp.nu_minus = std::conj(sp.nu_plus);
    sp.kappa_plus = kappa_branch(sp.nu_plus);
    sp.kappa_minus = kappa_branch(sp.nu_minus);
    sp.constellation = AndoCase::G1;
    sp.plus_elliptic = sp.minus_elliptic = false;
    if (std::abs(std::abs(sp.kappa_plus) - 1.0) <= case_tol ||
        std::abs(sp.kappa_plus.imag()) <= case_tol)
      throw DegenerateBlock("G1 block within tolerance of a degenerate constellation");
  } else {
    const double root = std::sqrt(disc);
    sp.nu_plus = 0.5 * sp.a + root;
    sp.nu_minus = 0.5 * sp.a - root;
    if (std::abs(std::abs(sp.nu_plus.real()) - 2.0) <= case_tol ||
        std::abs(std::abs(sp.nu_minus.real()) - 2.0) <= case_tol)
      throw DegenerateBlock("eigenvalue within tolerance of +-1");
    sp.plus_elliptic = std::abs(sp.nu_plus.real()) < 2.0;
    sp.minus_elliptic = std::abs(sp.nu_minus.real()) < 2.0;
    sp.kappa_plus = kappa_branch(sp.nu_plus);
    sp.kappa_minus = kappa_branch(sp.nu_minus);
    if (sp.plus_elliptic && sp.minus_elliptic) sp.constellation = AndoCase::G2;
    else if (!sp.plus_elliptic && !sp.minus_elliptic) sp.constellation = AndoCase::G4;
    else sp.constellation = AndoCase::G3;
  }
  return sp;
}

Matrix checkerboard_sum(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows() ||
      a.rows() % 2 != 0)
    throw DimensionError("checkerboard_sum", a.rows(), b.rows());
  const int m = static_cast<int>(a.rows()) / 2;
  Matrix out = Matrix::Zero(4 * m, 4 * m);
  out.block(0, 0, m, m) = a.block(0, 0, m, m);
  out.block(0, 2 * m, m, m) = a.block(0, m, m, m);
  out.block(2 * m, 0, m, m) = a.block(m, 0, m, m);
  out.block(2 * m, 2 * m, m, m) = a.block(m, m, m, m);
  out.block(m, m, m, m) = b.block(0, 0, m, m);
  out.block(m, 3 * m, m, m) = b.block(0, m, m, m);
  out.block(3 * m, m, m, m) = b.block(m, 0, m, m);
  out.block(3 * m, 3 * m, m, m) = b.block(m, m, m, m);
  return out;
}

Matrix ando_pair_A() {
  const double s = 1.0 / std::sqrt(2.0);
  const Matrix id2 = Matrix::Identity(2, 2);
  Matrix a4 = Matrix::Zero(4, 4);
  a4.block(0, 0, 2, 2) = -iu * s * id2;
  a4.block(0, 2, 2, 2) = s * id2;
  a4.block(2, 0, 2, 2) = iu * s * id2;
  a4.block(2, 2, 2, 2) = s * id2;
  Matrix a = Matrix::Zero(8, 8);
  a.block(0, 0, 4, 4) = a4;
  a.block(4, 4, 4, 4) = a4;
  return a;
}

Matrix ando_pair_B() {
  Matrix p = Matrix::Zero(4, 4);
  p(0, 0) = 1.0; p(1, 2) = 1.0; p(2, 1) = 1.0; p(3, 3) = 1.0;
  Matrix b = Matrix::Zero(8, 8);
  b.block(0, 0, 4, 4) = iu * p;
  b.block(4, 4, 4, 4) = iu * p;
  return b;
}

AndoBlockBasis ando_block_basis(double E, double t, double eta, double case_tol) {
  AndoBlockBasis out;
  out.spectrum = ando_block_spectrum(E, t, eta, case_tol);
  const AndoBlockSpectrum& sp = out.spectrum;
  const Matrix s = ando_s_eta(E, t, eta);
  const Matrix s_neg = ando_s_eta(E, t, -eta);
  const Matrix j4 = symplectic_J(4);

  // Case matrix M with channel order (plus, minus): columns (c+, c-, c+', c-').
  Matrix m(4, 4);
  switch (sp.constellation) {
    case AndoCase::G1: {
      Vector vp = eigvec_of(s, sp.kappa_plus);
      Vector vm = eigvec_of(s, sp.kappa_minus);
      const Complex pair = (vp.adjoint() * j4 * vm)(0, 0);
      if (std::abs(pair) < 1e-10)
        throw DegenerateBlock("G1 normalization pairing numerically zero");
      vm *= -1.0 / pair;
      m.col(0) = vp;
      m.col(1) = vp.conjugate();
      m.col(2) = vm;
      m.col(3) = vm.conjugate();
      out.rep[0] = sp.kappa_plus;
      out.rep[1] = sp.kappa_plus;  // degenerate moduli across the pair
      out.kappa_mod[0] = out.kappa_mod[1] = std::abs(sp.kappa_plus);
      out.elliptic[0] = out.elliptic[1] = false;
      break;
    }
    case AndoCase::G2: {
      const EllipticPair p = elliptic_pair(j4, eigvec_of(s, sp.kappa_plus), sp.kappa_plus);
      const EllipticPair q = elliptic_pair(j4, eigvec_of(s, sp.kappa_minus), sp.kappa_minus);
      m.col(0) = p.w; m.col(1) = q.w; m.col(2) = p.wp; m.col(3) = q.wp;
      out.rep[0] = p.eigenvalue; out.rep[1] = q.eigenvalue;
      out.angle[0] = std::arg(p.eigenvalue); out.angle[1] = std::arg(q.eigenvalue);
      out.elliptic[0] = out.elliptic[1] = true;
      break;
    }
    case AndoCase::G3: {
      const bool plus_ell = sp.plus_elliptic;
      const Complex ek = plus_ell ? sp.kappa_plus : sp.kappa_minus;
      const Complex hk = plus_ell ? sp.kappa_minus : sp.kappa_plus;
      const EllipticPair p = elliptic_pair(j4, eigvec_of(s, ek), ek);
      const HyperbolicPair h = hyperbolic_pair(j4, s, hk);
      const int ec = plus_ell ? 0 : 1, hc = plus_ell ? 1 : 0;
      m.col(ec) = p.w; m.col(2 + ec) = p.wp;
      m.col(hc) = h.v; m.col(2 + hc) = h.vp;
      out.rep[ec] = p.eigenvalue; out.rep[hc] = hk;
      out.angle[ec] = std::arg(p.eigenvalue);
      out.kappa_mod[hc] = std::abs(hk);
      out.elliptic[ec] = true; out.elliptic[hc] = false;
      break;
    }
    case AndoCase::G4: {
      const HyperbolicPair hp = hyperbolic_pair(j4, s, sp.kappa_plus);
      const HyperbolicPair hm = hyperbolic_pair(j4, s, sp.kappa_minus);
      m.col(0) = hp.v; m.col(1) = hm.v; m.col(2) = hp.vp; m.col(3) = hm.vp;
      out.rep[0] = sp.kappa_plus; out.rep[1] = sp.kappa_minus;
      out.kappa_mod[0] = std::abs(sp.kappa_plus);
      out.kappa_mod[1] = std::abs(sp.kappa_minus);
      out.elliptic[0] = out.elliptic[1] = false;
      break;
    }
  }
  if (max_abs(m.adjoint() * j4 * m - j4) > 1e-8)
    throw DegenerateBlock("case matrix failed the symplectic normalization");

  // M_{-eta} = diag(q2, q2) M_eta by the similarity of S_eta and S_{-eta}.
  Matrix gamma = Matrix::Zero(4, 4);
  gamma.block(0, 0, 2, 2) = quaternion_unit(2);
  gamma.block(2, 2, 2, 2) = quaternion_unit(2);
  const Matrix m_neg = gamma * m;

  const Matrix a = ando_pair_A();
  const Matrix b = ando_pair_B();
  out.Ntilde = a.adjoint() * checkerboard_sum(m.conjugate(), m_neg) * b;
  const Matrix s_free = a.adjoint() * checkerboard_sum(s, s_neg) * a;
  out.Dtilde = out.Ntilde.partialPivLu().solve(s_free * out.Ntilde);
  return out;
}

AndoFundamentalBasis ando_fundamental_basis(double E, double t, double eta,
                                            double case_tol) {
  AndoFundamentalBasis out;
  out.spectrum = ando_block_spectrum(E, t, eta, case_tol);
  const AndoBlockSpectrum& sp = out.spectrum;
  const Matrix s = ando_s_eta(E, t, eta);
  const Matrix j4 = symplectic_J(4);
  const Matrix i4 = quaternion_I(4);

  if (sp.constellation == AndoCase::G2) {
    // Two spin-split elliptic phases in one quaternion channel.
    auto lorentz_column = [&](Complex kappa) {
      Vector v = eigvec_of(s, kappa);
      double r = ((v.adjoint() * j4 * v)(0, 0)).imag();
      if (std::abs(r) < 1e-10)
        throw DegenerateBlock("fundamental normalization pairing numerically zero");
      Complex eig = kappa;
      if (r > 0) {  // need v* J v = -i |r|
        v = v.conjugate();
        eig = std::conj(kappa);
        r = -r;
      }
      v /= std::sqrt(-r);
      return std::make_pair(v, eig);
    };
    auto [y1, alpha] = lorentz_column(sp.kappa_plus);
    auto [y2, beta] = lorentz_column(sp.kappa_minus);
    Matrix y(4, 4);
    y.col(0) = y1;
    y.col(1) = y2;
    y.col(2) = -(i4 * y2.conjugate());
    y.col(3) = i4 * y1.conjugate();
    const Matrix target = -iu * lorentz_G(4);
    if (max_abs(y.adjoint() * j4 * y - target) > 1e-8)
      throw DegenerateBlock("fundamental frame failed the symplectic normalization");
    out.Ntilde = y * cayley_C(4);
    out.elliptic_channel = true;
    out.kappa_mod = 1.0;
    out.angle = 0.5 * (std::arg(alpha) + std::arg(beta));
    out.rep = alpha;
  } else if (sp.constellation == AndoCase::G1) {
    const Complex kappa = sp.kappa_plus;  // |kappa| > 1
    Vector v = eigvec_of(s, kappa);
    Vector u = eigvec_of(s, sp.kappa_minus);  // 1/conj(kappa)
    const Complex pair = (v.adjoint() * j4 * u)(0, 0);
    if (std::abs(pair) < 1e-10)
      throw DegenerateBlock("fundamental normalization pairing numerically zero");
    u *= -1.0 / pair;
    Matrix ntil(4, 4);
    ntil.col(0) = v;
    ntil.col(1) = i4 * v.conjugate();
    ntil.col(2) = u;
    ntil.col(3) = i4 * u.conjugate();
    if (max_abs(ntil.adjoint() * j4 * ntil - j4) > 1e-8)
      throw DegenerateBlock("fundamental frame failed the symplectic normalization");
    out.Ntilde = ntil;
    out.elliptic_channel = false;
    out.kappa_mod = std::abs(kappa);
    out.rep = kappa;
  } else {
    // Kramers degeneracy rules out split real pairs on quaternion blocks.
    throw DegenerateBlock("fundamental block in a non-quaternionic constellation");
  }
  out.Dtilde = out.Ntilde.partialPivLu().solve(s * out.Ntilde);
  return out;
}

NormalFormBundle build_normal_form_ando(const ModelParams& params_in) {
  ModelParams params = params_in;
  if (params.model != Model::Ando) throw Error("build_normal_form_ando: wrong model tag");
  params.normalize();
  if (params.phi != 0.0) throw Error("Ando model requires phi = 0");
  if (params.t == 0.0)
    throw Error("Ando model requires t != 0 (use the real builder at t = 0)");
  const int L = params.L;
  const int n = 4 * L;

  struct BlockEntry {
    std::vector<int> sites;  // natural site-frequency indices (0-based)
    Matrix ntil, dtil;       // 8x8 (pair) or 4x4 (fundamental)
    std::vector<double> kappa_mod, angle;
    std::vector<Complex> rep;
    std::vector<double> mu;  // Re(nu) per channel
    std::vector<bool> elliptic;
  };
  std::vector<BlockEntry> blocks;

  try {
    for (int l = 1; 2 * l < L; ++l) {
      // site l carries the -eta block in the S2 f_l = e^{i eta} f_l convention
      const double eta = -2.0 * M_PI * l / L;
      AndoBlockBasis bb = ando_block_basis(params.E, params.t, eta, params.case_tol);
      BlockEntry e;
      e.sites = {l - 1, L - l - 1};
      e.ntil = bb.Ntilde;
      e.dtil = bb.Dtilde;
      e.kappa_mod = {bb.kappa_mod[0], bb.kappa_mod[1]};
      e.angle = {bb.angle[0], bb.angle[1]};
      e.rep = {bb.rep[0], bb.rep[1]};
      e.mu = {bb.spectrum.nu_plus.real(), bb.spectrum.nu_minus.real()};
      e.elliptic = {bb.elliptic[0], bb.elliptic[1]};
      blocks.push_back(std::move(e));
    }
    std::vector<int> fundamentals;
    if (L % 2 == 0) fundamentals.push_back(L / 2 - 1);
    fundamentals.push_back(L - 1);
    for (int site : fundamentals) {
      const double eta = 2.0 * M_PI * (site + 1) / L;
      AndoFundamentalBasis fb =
          ando_fundamental_basis(params.E, params.t, eta, params.case_tol);
      BlockEntry e;
      e.sites = {site};
      e.ntil = fb.Ntilde;
      e.dtil = fb.Dtilde;
      e.kappa_mod = {fb.kappa_mod};
      e.angle = {fb.angle};
      e.rep = {fb.rep};
      e.mu = {fb.spectrum.nu_plus.real()};
      e.elliptic = {fb.elliptic_channel};
      blocks.push_back(std::move(e));
    }
  } catch (const DegenerateBlock&) {
    throw;
  }

  // Gathered layout: blocks in list order; each block occupies its sites'
  // channel slots consecutively.
  std::vector<int> gather;       // site slot -> natural site index
  for (const auto& bl : blocks)
    for (int s : bl.sites) gather.push_back(s);

  // Channel ordering: expansion modulus non-increasing, stable otherwise.
  struct ChanRef { int block, idx, gathered_slot; };
  std::vector<ChanRef> chans;
  {
    int slot = 0;
    for (int bi = 0; bi < static_cast<int>(blocks.size()); ++bi)
      for (int ci = 0; ci < static_cast<int>(blocks[bi].sites.size()); ++ci)
        chans.push_back({bi, ci, slot++});
  }
  std::vector<int> order(chans.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ca = chans[a];
    const auto& cb = chans[b];
    return blocks[ca.block].kappa_mod[ca.idx] > blocks[cb.block].kappa_mod[cb.idx];
  });

  NormalFormBundle bun;
  bun.params = params;
  bun.cls = SymmetryClass::Quaternion;
  bun.n = n;
  bun.pref = 1.0 / (1.0 + params.t * params.t);
  bun.diagonal_kernel = false;
  bun.fourier = detail::real_fourier_matrix(L);

  // N_bd and D_bd in the gathered layout.
  Matrix n_bd = Matrix::Zero(n, n);
  Matrix d_bd = Matrix::Zero(n, n);
  {
    int slot = 0;
    for (const auto& bl : blocks) {
      const int k = static_cast<int>(bl.sites.size());  // sites in block
      std::vector<int> coords;                          // complex coords (block local order)
      for (int s = 0; s < k; ++s)
        for (int sp = 0; sp < 2; ++sp) coords.push_back(2 * (slot + s) + sp);
      for (int s = 0; s < k; ++s)
        for (int sp = 0; sp < 2; ++sp) coords.push_back(2 * L + 2 * (slot + s) + sp);
      for (int r = 0; r < 4 * k; ++r)
        for (int c = 0; c < 4 * k; ++c) {
          n_bd(coords[r], coords[c]) = bl.ntil(r, c);
          d_bd(coords[r], coords[c]) = bl.dtil(r, c);
        }
      slot += k;
    }
  }

  // Channel-ordering permutation Sigma (complex coords).
  Matrix sigma = Matrix::Zero(n, n);
  for (int c = 0; c < static_cast<int>(order.size()); ++c) {
    const int g = chans[order[c]].gathered_slot;
    for (int sp = 0; sp < 2; ++sp) {
      sigma(2 * g + sp, 2 * c + sp) = 1.0;
      sigma(2 * L + 2 * g + sp, 2 * L + 2 * c + sp) = 1.0;
    }
  }

  bun.N = n_bd * sigma;
  bun.N_inv = sigma.transpose() * n_bd.partialPivLu().inverse();
  bun.R = sigma.transpose() * d_bd * sigma;

  ChannelData& ch = bun.channels;
  ch.mu.resize(L);
  ch.rho.resize(L);
  ch.kappa.resize(L);
  ch.eta.resize(L);
  ch.type.resize(L);
  ch.perm = gather;
  for (int c = 0; c < L; ++c) {
    const auto& cr = chans[order[c]];
    const auto& bl = blocks[cr.block];
    ch.mu[c] = bl.mu[cr.idx];
    ch.rho[c] = bl.rep[cr.idx];
    ch.kappa[c] = bl.kappa_mod[cr.idx];
    ch.eta[c] = bl.angle[cr.idx];
    ch.type[c] = bl.elliptic[cr.idx] ? ChannelType::Elliptic : ChannelType::Hyperbolic;
  }
  ch.L_e = static_cast<int>(std::count(ch.type.begin(), ch.type.end(), ChannelType::Elliptic));
  ch.L_h = L - ch.L_e;
  for (int c = 0; c < L; ++c) {
    if (!ch.elliptic(c) && ch.kappa[c] < 1.0)
      throw Error("internal: hyperbolic channel oriented with contraction on top");
  }

  bun.R_h = Matrix::Zero(n, n);
  for (int c = 0; c < L; ++c)
    for (int sp = 0; sp < 2; ++sp) {
      bun.R_h(2 * c + sp, 2 * c + sp) = ch.kappa[c];
      bun.R_h(2 * L + 2 * c + sp, 2 * L + 2 * c + sp) = 1.0 / ch.kappa[c];
    }
  bun.R_e = bun.R_h.partialPivLu().solve(bun.R);

  const Matrix mhat = bun.fourier;
  Matrix mhat2 = Matrix::Zero(2 * L, 2 * L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j)
      for (int sp = 0; sp < 2; ++sp) mhat2(2 * i + sp, 2 * j + sp) = mhat(i, j);
  bun.M = Matrix::Zero(n, n);
  bun.M.topLeftCorner(2 * L, 2 * L) = mhat2;
  bun.M.bottomRightCorner(2 * L, 2 * L) = mhat2;

  Matrix gq = Matrix::Zero(2 * L, 2 * L);
  for (int slot = 0; slot < L; ++slot)
    for (int sp = 0; sp < 2; ++sp) gq(2 * gather[slot] + sp, 2 * slot + sp) = 1.0;
  bun.Q = Matrix::Zero(n, n);
  bun.Q.topLeftCorner(2 * L, 2 * L) = gq;
  bun.Q.bottomRightCorner(2 * L, 2 * L) = gq;

  bun.init_kernel_tables({L});
  return bun;
}

}  // namespace hslyap
