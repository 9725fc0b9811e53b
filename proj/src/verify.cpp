#include "hslyap/verify.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "hslyap/frames.hpp"
#include "hslyap/lyapunov.hpp"
#include "hslyap/models.hpp"
#include "hslyap/ando.hpp"
#include "hslyap/perturbation.hpp"
#include "hslyap/symplectic.hpp"

namespace hslyap {

namespace {

CheckResult check(const std::string& name, double value, double tol,
                  const std::string& note = "") {
  return {name, value <= tol, false, value, tol, note};
}

ChannelData synthetic_channels(int l_h, int l_e) {
  ChannelData ch;
  const int L = l_h + l_e;
  ch.mu.resize(L);
  ch.rho.resize(L);
  ch.kappa.resize(L);
  ch.eta.resize(L);
  ch.type.resize(L);
  ch.perm.resize(L);
  for (int i = 0; i < L; ++i) {
    ch.perm[i] = i;
    const bool hyp = i < l_h;
    ch.type[i] = hyp ? ChannelType::Hyperbolic : ChannelType::Elliptic;
    ch.mu[i] = hyp ? 3.0 + i : 1.0;
    ch.kappa[i] = hyp ? 2.0 + i : 1.0;
    ch.eta[i] = hyp ? 0.0 : 1.0;
    ch.rho[i] = hyp ? Complex(ch.kappa[i]) : std::exp(iu);
  }
  ch.L_h = l_h;
  ch.L_e = l_e;
  return ch;
}

double cocycle_identity_residual(SymmetryClass cls, int trials, RngStream& rng) {
  const int channels = 3;
  const int n = 2 * ambient_size(cls, channels);
  double worst = 0.0;
  for (int k = 0; k < trials; ++k) {
    const Matrix t = sample_group_element(n, cls, rng, 0.8);
    const Matrix tp = sample_group_element(n, cls, rng, 0.8);
    IsotropicFrame f = random_frame(cls, channels, rng);
    auto [f1, s_inner] = act(tp, f);
    auto [f2, s_outer] = act(t, f1);
    auto [f12, s_prod] = act(Matrix(t * tp), f);
    worst = std::max(worst, max_abs(s_prod.S - s_outer.S * s_inner.S));
  }
  return worst;
}

double torus_residual(SymmetryClass cls, int trials, RngStream& rng) {
  const int channels = 3;
  const int n = 2 * ambient_size(cls, channels);
  double worst = 0.0;
  for (int k = 0; k < trials; ++k) {
    const Matrix t = sample_group_element(n, cls, rng, 0.9);
    IsotropicFrame f = random_frame(cls, channels, rng);
    const int l = ambient_size(cls, channels);
    Matrix torus = Matrix::Zero(l, l);
    if (cls == SymmetryClass::Real) {
      for (int i = 0; i < l; ++i) torus(i, i) = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    } else if (cls == SymmetryClass::Complex) {
      for (int i = 0; i < l; ++i) torus(i, i) = std::exp(iu * (2.0 * M_PI * rng.uniform01()));
    } else {
      for (int c = 0; c < channels; ++c) {
        const Complex a = std::exp(iu * (2.0 * M_PI * rng.uniform01()));
        torus(2 * c, 2 * c) = a;
        torus(2 * c + 1, 2 * c + 1) = std::conj(a);
      }
    }
    worst = std::max(worst, torus_covariance_check(t, f, torus));
  }
  return worst;
}

double sum_rule_residual(SymmetryClass cls, RngStream& rng) {
  const ChannelData ch = synthetic_channels(2, 3);
  const int n = 2 * ambient_size(cls, ch.channels());
  const Matrix b = sample_lie_element(n, cls, rng);
  const Matrix bh = b + b.adjoint();  // self-adjoint hs test operator
  const Matrix pe = ch.Pi_e(cls);
  const Matrix be = pe * bh * pe;
  double tr2 = (be * be).trace().real();
  if (cls == SymmetryClass::Quaternion) tr2 *= 0.5;
  const int p = ch.L_h + 1;
  double lhs = 0.0;
  for (int q = ch.L_h + 1; q <= ch.channels(); ++q)
    lhs += moment_integral_Ipq(bh, p, q, ch, cls);
  const double rhs = tr2 / (4.0 * ch.L_e);
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

std::vector<ModelParams> model_suite() {
  std::vector<ModelParams> out;
  ModelParams magnetic;
  magnetic.model = Model::AndersonMagnetic;
  magnetic.L = 8;
  magnetic.E = 1.31;
  magnetic.phi = 1.1;
  magnetic.lambda = 0.3;
  out.push_back(magnetic);

  ModelParams real;
  real.model = Model::AndersonReal;
  real.L = 8;
  real.E = 0.8;
  real.lambda = 0.3;
  out.push_back(real);

  ModelParams ando;
  ando.model = Model::Ando;
  ando.L = 5;
  ando.E = 1.2;
  ando.t = 0.25;
  ando.lambda = 0.2;
  out.push_back(ando);

  ModelParams slab;
  slab.model = Model::Slab;
  slab.N = 3;
  slab.d = 3;
  slab.phis = {0.4, 0.9};
  slab.E = 0.9;
  slab.lambda = 0.25;
  out.push_back(slab);
  return out;
}

double reconstruction_residual(const ModelParams& params, int draws, RngStream& rng) {
  NormalFormBundle b = build_normal_form(params);
  const Matrix basis = b.basis();
  double worst = 0.0;
  for (int k = 0; k < draws; ++k) {
    const PerturbationGenerator pg = sample_perturbation(b, rng);
    ModelParams p2 = params;
    p2.normalize();
    const Matrix s = transfer_matrix(p2, pg.w);
    const Matrix lhs = basis.partialPivLu().solve(s * basis);
    const Matrix rhs = b.R * (Matrix::Identity(b.n, b.n) + params.lambda * pg.P);
    worst = std::max(worst, max_abs(lhs - rhs));
  }
  return worst;
}

double membership_residual(const ModelParams& params, int draws, RngStream& rng) {
  ModelParams p2 = params;
  p2.normalize();
  double worst = 0.0;
  for (int k = 0; k < draws; ++k) {
    RealVector w(p2.L);
    for (int i = 0; i < p2.L; ++i) w[i] = draw_disorder(p2.disorder, rng);
    const Matrix s = transfer_matrix(p2, w);
    worst = std::max(worst, symplectic_residual(s));
    worst = std::max(worst, class_symmetry_residual(s, p2.symmetry_class()));
  }
  return worst;
}

double chain_invariant_drift(const ModelParams& params, std::uint64_t seed) {
  NormalFormBundle b = build_normal_form(params);
  ChainConfig cfg;
  cfg.steps = 100;
  cfg.seed = seed;
  Chain chain(b, cfg, 0);
  double worst = 0.0;
  for (int seg = 0; seg < 100; ++seg) {
    chain.advance(100, nullptr);
    const IsotropicFrame& f = chain.frame();
    worst = std::max({worst, f.orthonormality_residual(), f.isotropy_residual(),
                      f.symmetry_residual()});
  }
  return worst;
}

double expansion_order_slope(RngStream& rng) {
  // log-log slope of |g_p - expansion| over lambda in [1e-3, 1e-1]
  const int l = 4;
  double worst_gap = 0.0;
  double slopes = 0.0;
  const int reps = 5;
  for (int rep = 0; rep < reps; ++rep) {
    const Matrix p_op = sample_lie_element(2 * l, SymmetryClass::Complex, rng);
    IsotropicFrame f = random_frame(SymmetryClass::Complex, l, rng);
    const int p = 1 + static_cast<int>(rng.uniform01() * l);
    std::vector<double> xs, ys;
    for (double lam : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
      const Matrix t = Matrix(lam * p_op).exp();
      auto [g, s] = act(t, f);
      const double exact = additive_cocycle(s, p, SymmetryClass::Complex);
      const double approx = cocycle_expansion(p_op, f, p, lam);
      const double err = std::abs(exact - approx);
      if (err > 1e-300) {
        xs.push_back(std::log(lam));
        ys.push_back(std::log(err));
      }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(xs.size());
    for (int i = 0; i < n; ++i) {
      sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    slopes += slope;
    worst_gap = std::max(worst_gap, std::abs(slope - 3.0));
  }
  (void)slopes;
  return worst_gap;
}

}  // namespace

std::vector<CheckResult> run_verification(VerifyLevel level, std::uint64_t seed) {
  std::vector<CheckResult> out;
  RngStream rng(seed);

  try {
    StructuredConstants k(8);
    out.push_back(check("symplectic-core: constant identities", 0.0, 1e-14));
  } catch (const std::exception& e) {
    out.push_back({"symplectic-core: constant identities", false, false, 1.0, 0.0, e.what()});
  }

  for (auto cls : {SymmetryClass::Complex, SymmetryClass::Real, SymmetryClass::Quaternion}) {
    const std::string tag = std::string(" class ") + class_name(cls);
    out.push_back(check("frames: multiplicative cocycle identity" + tag,
                        cocycle_identity_residual(cls, 12, rng), 1e-9));
    out.push_back(check("frames: torus covariance" + tag, torus_residual(cls, 8, rng), 1e-9));
    out.push_back(check("perturbation: sum rule" + tag, sum_rule_residual(cls, rng), 1e-12));
  }

  for (const ModelParams& params : model_suite()) {
    const std::string tag = std::string(" (") + model_name(params.model) + ")";
    out.push_back(check("models: transfer membership" + tag,
                        membership_residual(params, 25, rng), 1e-12));
    out.push_back(check("models: normal-form reconstruction" + tag,
                        reconstruction_residual(params, 5, rng), 1e-9));
  }

  {
    ModelParams params = model_suite()[1];  // real model
    out.push_back(check("lyapunov: frame invariants over 1e4-step chain",
                        chain_invariant_drift(params, seed ^ 0x9e37), 1e-8));
  }

  if (level == VerifyLevel::Full) {
    {
      HaarMomentReport rep = haar_moment_check(8, 100000, rng);
      out.push_back(check("perturbation: Haar moments (M1)-(M6), Lemma 2 (i)-(v), n=8",
                          rep.worst_sigmas(), 3.0, "deviation in sigma units"));
      HaarMomentReport rep4 = haar_moment_check(4, 100000, rng);
      double m3dev = 0.0;
      for (const auto& e : rep4.entries)
        if (e.name == "M3 Re") m3dev = e.deviation_sigmas();
      out.push_back(check("perturbation: (M3) at n=4 equals -1/60", m3dev, 3.0,
                          "deviation in sigma units"));
    }
    {
      // E[w-hat_p w-hat_q] = delta_{p+q mod L} / L
      const int L = 8, samples = 100000;
      ModelParams params;
      params.model = Model::AndersonMagnetic;
      params.L = L;
      params.E = 1.1;
      params.phi = 0.7;
      params.lambda = 0.1;
      NormalFormBundle b = build_normal_form(params);
      Matrix acc = Matrix::Zero(L, L);
      RealVector w(L);
      for (int s = 0; s < samples; ++s) {
        for (int i = 0; i < L; ++i) w[i] = draw_disorder(params.disorder, rng);
        const Vector what = b.dft_phases * w.cast<Complex>();
        acc += what * what.transpose();
      }
      acc /= double(samples);
      double worst = 0.0;
      for (int p = 0; p < L; ++p)
        for (int q = 0; q < L; ++q) {
          const double expect = ((p + q) % L == 0) ? 1.0 / L : 0.0;
          worst = std::max(worst, std::abs(acc(p, q) - expect));
        }
      const double sigma = 1.0 / (L * std::sqrt(double(samples)));
      out.push_back(check("models: Fourier disorder covariance", worst, 5.0 * sigma));
    }
    for (const ModelParams& params : model_suite()) {
      NormalFormBundle b = build_normal_form(params);
      Matrix mean = Matrix::Zero(b.n, b.n);
      double p2 = 0.0, member = 0.0;
      const int draws = 200;
      for (int k = 0; k < draws; ++k) {
        const PerturbationGenerator pg = sample_perturbation(b, rng);
        mean += pg.P;
        p2 = std::max(p2, max_abs(Matrix(pg.P * pg.P)));
        if (k < 3)
          for (double lam : {0.1, 1.0}) {
            const Matrix e = Matrix::Identity(b.n, b.n) + lam * pg.P;
            member = std::max(member, symplectic_residual(e));
            member = std::max(member, class_symmetry_residual(e, b.cls));
          }
      }
      mean /= draws;
      const std::string tag = std::string(" (") + model_name(params.model) + ")";
      out.push_back(check("models: perturbation nilpotency" + tag, p2, 1e-12));
      out.push_back(check("models: exp(lambda P) membership" + tag, member, 1e-10));
      out.push_back(check("models: E[P] = 0" + tag, max_abs(mean),
                          6.0 / std::sqrt(double(draws)),
                          "Monte Carlo mean against 6 sigma"));
    }
    {
      // trace-derived quartic coefficient vs the printed closed form
      const double E = 1.7, t = 0.35, eta = 0.9;
      const AndoBlockSpectrum sp = ando_block_spectrum(E, t, eta);
      const double e = E - 2.0 * std::cos(eta), f = 2.0 * t * std::sin(eta);
      const double printed =
          (e * e * t * t - f * f + 2.0 - 2.0 * std::pow(t, 4)) / ((1.0 + t * t) * (1.0 + t * t));
      CheckResult r;
      r.name = "ando: quartic coefficient b, trace-derived vs printed closed form";
      r.pass = true;
      r.warning_only = true;
      r.value = std::abs(sp.b - printed);
      r.tol = 0.0;
      r.note = "expected nonzero: printed form fails its t=0 limit; traces are used";
      out.push_back(r);
    }
    out.push_back(check("perturbation: expansion error order (slope-3 fit)",
                        expansion_order_slope(rng), 0.3,
                        "worst |slope - 3| over 5 draws"));
  }

  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass && !r.warning_only) return false;
  return true;
}

}  // namespace hslyap
