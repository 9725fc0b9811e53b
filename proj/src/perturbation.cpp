#include "hslyap/perturbation.hpp"

#include <cmath>

namespace hslyap {

namespace {

// tau of a channel-diagonal block: the scalar itself for R/C, half the trace
// of the 2x2 quaternion block for H.
double tau_block(const Matrix& block, SymmetryClass cls) {
  if (cls == SymmetryClass::Quaternion) return 0.5 * block.trace().real();
  return block(0, 0).real();
}

double traced(const Matrix& a, SymmetryClass cls) {
  const double t = a.trace().real();
  return cls == SymmetryClass::Quaternion ? 0.5 * t : t;
}

}  // namespace

ExpansionTerms cocycle_expansion_terms(const Matrix& p_op, const IsotropicFrame& phi) {
  ExpansionTerms t;
  const Matrix& f = phi.phi;
  t.P1 = 0.5 * (f.adjoint() * (p_op + p_op.adjoint()) * f);
  t.P2 = 0.25 * (f.adjoint() *
                 (2.0 * p_op.adjoint() * p_op + p_op * p_op +
                  p_op.adjoint() * p_op.adjoint()) *
                 f);
  return t;
}

double cocycle_expansion(const Matrix& p_op, const IsotropicFrame& phi, int p,
                         double lambda) {
  const SymmetryClass cls = phi.cls;
  const int w = channel_width(cls);
  const int nch = phi.channels();
  if (p < 1 || p > nch) throw Error("cocycle_expansion: channel index out of range");
  const ExpansionTerms t = cocycle_expansion_terms(p_op, phi);
  const int i0 = w * (p - 1);
  const Matrix p1_pp = t.P1.block(i0, i0, w, w);
  const Matrix p2_pp = t.P2.block(i0, i0, w, w);
  // p_p = sum_{q <= p} e_q e_q^*: the leading w*p columns.
  const Matrix m_pp =
      t.P1.block(i0, 0, w, w * p) * t.P1.block(0, i0, w * p, w);
  const double first = tau_block(p1_pp, cls);
  const double second =
      tau_block(p2_pp, cls) + tau_block(Matrix(p1_pp * p1_pp), cls) -
      2.0 * tau_block(m_pp, cls);
  return lambda * first + lambda * lambda * second;
}

double moment_integral_Ip(const Matrix& a_op, const ChannelData& channels,
                          SymmetryClass cls) {
  const Matrix pe = channels.Pi_e(cls);
  if (channels.L_e == 0) throw Error("moment_integral_Ip: no elliptic channels");
  return traced(Matrix(pe * a_op * pe), cls) / (2.0 * channels.L_e);
}

double moment_integral_Ipq(const Matrix& b_op, int p, int q,
                           const ChannelData& channels, SymmetryClass cls) {
  if (p < 1 || p > channels.channels() || q < 1 || q > channels.channels())
    throw Error("moment_integral_Ipq: channel index out of range");
  if (!channels.elliptic(p - 1) || !channels.elliptic(q - 1))
    throw Error("moment_integral_Ipq requires elliptic channels");
  const double le = channels.L_e;
  const Matrix pe = channels.Pi_e(cls);
  const Matrix be = pe * b_op * pe;
  const double tr2 = traced(Matrix(be * be), cls);
  const double dpq = (p == q) ? 1.0 : 0.0;
  double pref = 0.0;
  switch (cls) {
    case SymmetryClass::Complex: pref = 1.0 / (4.0 * le * le); break;
    case SymmetryClass::Real: pref = (1.0 + dpq) / (4.0 * le * (le + 1.0)); break;
    case SymmetryClass::Quaternion: pref = (2.0 - dpq) / (4.0 * le * (2.0 * le - 1.0)); break;
  }
  return pref * tr2;
}

double moment_integral_hyperbolic_sum(const Matrix& b_op, int p,
                                      const ChannelData& channels, SymmetryClass cls) {
  if (!channels.elliptic(p - 1))
    throw Error("moment_integral_hyperbolic_sum requires an elliptic channel p");
  const Matrix pe = channels.Pi_e(cls);
  const Matrix ph = channels.Pi_h(cls);
  return traced(Matrix(pe * b_op * ph * b_op * pe), cls) / (4.0 * channels.L_e);
}

double theorem1_gamma(double trace, const GammaFormulaInputs& in) {
  if (in.p <= in.L_h) throw Error("theorem1_gamma: channel p must be elliptic");
  const double dC = in.cls == SymmetryClass::Complex ? 1.0 : 0.0;
  const double dR = in.cls == SymmetryClass::Real ? 1.0 : 0.0;
  const double dH = in.cls == SymmetryClass::Quaternion ? 1.0 : 0.0;
  const double le = in.L_e;
  return in.lambda * in.lambda / (4.0 * le * (le + dR - 0.5 * dH)) *
         (in.L - in.p + 0.5 * dC + dR + 0.25 * dH) * trace;
}

double theorem1_gamma_via_moments(const NormalFormBundle& bundle, int p, int mc_samples,
                                  RngStream& rng) {
  const ChannelData& ch = bundle.channels;
  const SymmetryClass cls = bundle.cls;
  if (!ch.elliptic(p - 1)) throw Error("channel p must be elliptic");
  double acc = 0.0;
  for (int s = 0; s < mc_samples; ++s) {
    const PerturbationGenerator pg = sample_perturbation(bundle, rng);
    const Matrix& pm = pg.P;
    const Matrix a_op = 2.0 * pm.adjoint() * pm + pm * pm + pm.adjoint() * pm.adjoint();
    const Matrix b_op = pm.adjoint() + pm;
    const double term_a = moment_integral_Ip(a_op, ch, cls);
    const double term_h = 2.0 * moment_integral_hyperbolic_sum(b_op, p, ch, cls);
    double term_e = moment_integral_Ipq(b_op, p, p, ch, cls);
    const int first_e = ch.L_h + 1;
    if (p > first_e)
      term_e += 2.0 * (p - first_e) *
                moment_integral_Ipq(b_op, p, first_e, ch, cls);
    acc += term_a - term_h - term_e;
  }
  acc /= mc_samples;
  const double l2 = bundle.params.lambda * bundle.params.lambda;
  return 0.25 * l2 * acc;
}

EllipticSumData elliptic_sum_data(int L, double E, double phi, double band_edge_tol) {
  EllipticSumData out;
  for (int l = 1; l <= L; ++l) {
    const double mu = E - 2.0 * std::cos(phi + 2.0 * M_PI * l / L);
    if (std::abs(mu) >= 2.0) {
      ++out.L_h;
      continue;
    }
    const double sin_k = std::sqrt(1.0 - 0.25 * mu * mu);
    if (sin_k < band_edge_tol) throw InternalBandEdge(l, std::abs(mu));
    ++out.L_e;
    out.h2_sum += 1.0 / sin_k;
    out.min_sin = std::min(out.min_sin, sin_k);
  }
  // channels with |mu| within rounding of 2 also diverge
  for (int l = 1; l <= L; ++l) {
    const double mu = E - 2.0 * std::cos(phi + 2.0 * M_PI * l / L);
    if (std::abs(mu) >= 2.0 && std::abs(std::abs(mu) - 2.0) < band_edge_tol * band_edge_tol)
      throw InternalBandEdge(l, std::abs(mu));
  }
  return out;
}

double closed_form_gamma(SymmetryClass cls, int L, double E, double lambda, double phi,
                         int p, GammaForm form, double band_edge_tol) {
  const double use_phi = form == GammaForm::ExactH ? phi : 0.0;
  const EllipticSumData d = elliptic_sum_data(L, E, use_phi, band_edge_tol);
  if (d.L_e == 0) throw Error("closed_form_gamma: no elliptic channels");
  if (p <= d.L_h || p > L) throw Error("closed_form_gamma: channel p must be elliptic");
  GammaFormulaInputs in;
  in.cls = cls;
  in.L = L;
  in.L_e = d.L_e;
  in.L_h = d.L_h;
  in.p = p;
  in.lambda = lambda;
  const double trace = d.h2_sum * d.h2_sum / L;
  return theorem1_gamma(trace, in);
}

double closed_form_gamma(const ModelParams& params, int p, SymmetryClass cls,
                         GammaForm form, double band_edge_tol) {
  return closed_form_gamma(cls, params.L, params.E, params.lambda,
                           params.model == Model::AndersonMagnetic ? params.phi : 0.0,
                           p, form, band_edge_tol);
}

namespace {

struct Accumulator {
  double sum = 0.0, sum2 = 0.0;
  long n = 0;
  void add(double x) {
    sum += x;
    sum2 += x * x;
    ++n;
  }
  double mean() const { return sum / n; }
  double sigma() const {
    const double m = mean();
    return std::sqrt(std::max(0.0, sum2 / n - m * m) / n);
  }
};

}  // namespace

HaarMomentReport haar_moment_check(int n, int samples, RngStream& rng) {
  if (n < 2) throw Error("haar_moment_check needs n >= 2");
  if (samples < 1) throw Error("haar_moment_check needs samples >= 1");

  // fixed coefficient matrices for the Lemma identities
  auto random_matrix = [&](int size) {
    Matrix a(size, size);
    for (int j = 0; j < size; ++j)
      for (int i = 0; i < size; ++i) a(i, j) = Complex(rng.normal(), rng.normal());
    return a;
  };
  const Matrix A = random_matrix(n), B = random_matrix(n), C = random_matrix(n),
               D = random_matrix(n);

  enum {
    kM1, kM1Vanish, kM2, kM3, kM3Imag, kM4, kM5, kM6,
    kL1Re, kL1Im, kL2Re, kL2Im, kL3Re, kL3Im, kL4Re, kL4Im, kL5Re, kL5Im,
    kConjRe, kConjIm, kCount
  };
  Accumulator acc[kCount];

  for (int s = 0; s < samples; ++s) {
    const Matrix u = sample_haar_unitary(n, rng);
    acc[kM1].add(std::norm(u(0, 0)));
    acc[kM1Vanish].add((std::conj(u(0, 0)) * u(1, 1)).real());
    acc[kM2].add(std::norm(u(0, 0)) * std::norm(u(1, 1)));
    const Complex m3 = std::conj(u(0, 0)) * std::conj(u(1, 1)) * u(0, 1) * u(1, 0);
    acc[kM3].add(m3.real());
    acc[kM3Imag].add(m3.imag());
    acc[kM4].add(std::norm(u(0, 0)) * std::norm(u(0, 1)));
    acc[kM5].add(std::norm(u(0, 0)) * std::norm(u(1, 0)));
    acc[kM6].add(std::norm(u(0, 0)) * std::norm(u(0, 0)));

    const Matrix ua = u.adjoint();
    const Complex l1 = (ua * A * u * B).trace();
    const Complex l2 = (u.conjugate() * A * u * B).trace();
    const Complex l3 = (ua * A * u * B * ua * C * u * D).trace();
    const Complex l4 = (ua * A * u * B * u.transpose() * C * u.conjugate() * D).trace();
    const Complex l5 = (ua * A * u.conjugate() * B * u.transpose() * C * u * D).trace();
    const Complex lc = (u.transpose() * A * u.conjugate() * B * u.transpose() * C *
                        u.conjugate() * D).trace();
    acc[kL1Re].add(l1.real()); acc[kL1Im].add(l1.imag());
    acc[kL2Re].add(l2.real()); acc[kL2Im].add(l2.imag());
    acc[kL3Re].add(l3.real()); acc[kL3Im].add(l3.imag());
    acc[kL4Re].add(l4.real()); acc[kL4Im].add(l4.imag());
    acc[kL5Re].add(l5.real()); acc[kL5Im].add(l5.imag());
    acc[kConjRe].add(lc.real()); acc[kConjIm].add(lc.imag());
  }

  const double nn = n;
  const Complex trA = A.trace(), trB = B.trace(), trC = C.trace(), trD = D.trace();
  const Complex trAC = (A * C).trace(), trBD = (B * D).trace();
  const Complex trACt = (A * C.transpose()).trace(), trBDt = (B * D.transpose()).trace();
  const Complex exact_l1 = trA * trB / nn;
  const Complex exact_l2 = (A * B.transpose()).trace() / nn;
  const double c1 = 1.0 / (nn * nn - 1.0);
  const double c2 = 1.0 / (nn * (nn * nn - 1.0));
  const Complex exact_l3 = c1 * (trA * trC * trBD + trAC * trB * trD) -
                           c2 * (trAC * trBD + trA * trB * trC * trD);
  const Complex exact_l4 = c1 * (trA * trC * trBD + trACt * trBDt) -
                           c2 * (trACt * trBD + trA * trC * trBDt);
  const Complex exact_l5 = c1 * (trACt * trBDt + trAC * trB * trD) -
                           c2 * (trAC * trBDt + trACt * trB * trD);

  HaarMomentReport rep;
  auto push = [&](const char* name, const Accumulator& a, double exact) {
    rep.entries.push_back({name, a.mean(), exact, a.sigma()});
  };
  push("M1 <|U11|^2>", acc[kM1], 1.0 / nn);
  push("M1 <conj(U11) U22>", acc[kM1Vanish], 0.0);
  push("M2 <|U11|^2 |U22|^2>", acc[kM2], 1.0 / (nn * nn - 1.0));
  push("M3 Re", acc[kM3], -1.0 / (nn * (nn * nn - 1.0)));
  push("M3 Im", acc[kM3Imag], 0.0);
  push("M4 <|U11|^2 |U12|^2>", acc[kM4], 1.0 / (nn * (nn + 1.0)));
  push("M5 <|U11|^2 |U21|^2>", acc[kM5], 1.0 / (nn * (nn + 1.0)));
  push("M6 <|U11|^4>", acc[kM6], 2.0 / (nn * (nn + 1.0)));
  push("L2(i) Re", acc[kL1Re], exact_l1.real());
  push("L2(i) Im", acc[kL1Im], exact_l1.imag());
  push("L2(ii) Re", acc[kL2Re], exact_l2.real());
  push("L2(ii) Im", acc[kL2Im], exact_l2.imag());
  push("L2(iii) Re", acc[kL3Re], exact_l3.real());
  push("L2(iii) Im", acc[kL3Im], exact_l3.imag());
  push("L2(iv) Re", acc[kL4Re], exact_l4.real());
  push("L2(iv) Im", acc[kL4Im], exact_l4.imag());
  push("L2(v) Re", acc[kL5Re], exact_l5.real());
  push("L2(v) Im", acc[kL5Im], exact_l5.imag());
  push("L2(iii,conj) Re", acc[kConjRe], exact_l3.real());
  push("L2(iii,conj) Im", acc[kConjIm], exact_l3.imag());
  return rep;
}

}  // namespace hslyap
