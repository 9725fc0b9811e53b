#ifndef HSLYAP_PERTURBATION_HPP
#define HSLYAP_PERTURBATION_HPP

#include <string>
#include <vector>

#include "hslyap/frames.hpp"
#include "hslyap/models.hpp"

namespace hslyap {

// Self-adjoint expansion terms P1 = Phi*(P+P*)Phi/2 and
// P2 = Phi*(2P*P + P^2 + (P*)^2)Phi/4.
struct ExpansionTerms {
  Matrix P1, P2;
};

ExpansionTerms cocycle_expansion_terms(const Matrix& p_op, const IsotropicFrame& phi);

// Second-order expansion of g_p(e^{lambda P}, Phi); exact through lambda^2.
double cocycle_expansion(const Matrix& p_op, const IsotropicFrame& phi, int p,
                         double lambda);

// Lemma-1 closed forms for the frame averages under the RPP.  Traces carry
// the extra 1/2 in class H.
double moment_integral_Ip(const Matrix& a_op, const ChannelData& channels,
                          SymmetryClass cls);
double moment_integral_Ipq(const Matrix& b_op, int p, int q,
                           const ChannelData& channels, SymmetryClass cls);
// Hyperbolic sum of I_{p,q'} over q' <= L_h.
double moment_integral_hyperbolic_sum(const Matrix& b_op, int p,
                                      const ChannelData& channels, SymmetryClass cls);

struct GammaFormulaInputs {
  SymmetryClass cls = SymmetryClass::Complex;
  int L = 1;
  int L_e = 1;
  int L_h = 0;
  int p = 1;       // 1-based channel index, must be elliptic (p > L_h)
  double lambda = 0.0;
};

// Theorem-1 prefactor times the trace input.
double theorem1_gamma(double trace, const GammaFormulaInputs& inputs);

// gamma_p assembled term by term from the Lemma-1 values for a concrete
// disorder second moment E[...] evaluated by Monte Carlo over P samples.
double theorem1_gamma_via_moments(const NormalFormBundle& bundle, int p, int mc_samples,
                                  RngStream& rng);

// Closed forms: exact h_k(phi) route or the phi -> 0 / t -> 0 limit forms.
enum class GammaForm { ExactH, SmallParameterLimit };

double closed_form_gamma(SymmetryClass cls, int L, double E, double lambda, double phi,
                         int p, GammaForm form, double band_edge_tol = 1e-3);
double closed_form_gamma(const ModelParams& params, int p, SymmetryClass cls,
                         GammaForm form = GammaForm::ExactH, double band_edge_tol = 1e-3);

// Elliptic channel weights sum(h_k^2) and counts used by the closed forms.
struct EllipticSumData {
  int L_e = 0, L_h = 0;
  double h2_sum = 0.0;  // sum over elliptic channels of h_k(phi)^2
  double min_sin = 1.0;
};
EllipticSumData elliptic_sum_data(int L, double E, double phi, double band_edge_tol);

// Monte Carlo verification of the Haar moment identities.
struct MomentCheckEntry {
  std::string name;
  double mc = 0.0;       // Monte Carlo estimate
  double exact = 0.0;    // closed form
  double sigma = 0.0;    // standard error of the estimate
  double deviation_sigmas() const {
    return sigma > 0 ? std::abs(mc - exact) / sigma : std::abs(mc - exact);
  }
};

struct HaarMomentReport {
  std::vector<MomentCheckEntry> entries;
  double worst_sigmas() const {
    double w = 0.0;
    for (const auto& e : entries) w = std::max(w, e.deviation_sigmas());
    return w;
  }
};

HaarMomentReport haar_moment_check(int n, int samples, RngStream& rng);

}  // namespace hslyap

#endif
