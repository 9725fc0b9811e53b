#ifndef HSLYAP_RPP_STATS_HPP
#define HSLYAP_RPP_STATS_HPP

#include <functional>
#include <string>
#include <vector>

#include "hslyap/lyapunov.hpp"
#include "hslyap/models.hpp"

namespace hslyap {

struct SpacingHistogram {
  std::vector<double> edges;      // bin edges, size bins+1
  std::vector<double> density;    // normalized to unit integral
  long count = 0;                 // pooled samples
  double mean_raw = 0.0;          // mean spacing before normalization
  long dropped = 0;               // coincident-phase spacings dropped
  std::vector<double> samples;    // normalized spacings, sorted (for KS)
};

struct SurmiseCurve {
  int beta = 2;
  double pdf(double s) const;
  double cdf(double s) const;
};

SurmiseCurve surmise(int beta);

// One-sample Kolmogorov-Smirnov distance of sorted samples against a CDF.
double ks_statistic(const std::vector<double>& sorted_samples,
                    const std::function<double(double)>& cdf);
// Std of the KS statistic under the hypothesis, ~0.26/sqrt(n).
double ks_sampling_sigma(long n);

// Unitary polar factor (SVD-based) and its distance from the input.
struct PolarFactor {
  Matrix unitary;
  double deviation = 0.0;
};
PolarFactor unitary_polar_factor(const Matrix& a);

enum class BlockSelection { Full, Elliptic };

// Channel bookkeeping the statistics need: sizes of the elliptic block in
// complex coordinates (slot order puts hyperbolic channels first).
struct EnsembleChannels {
  SymmetryClass cls = SymmetryClass::Complex;
  int L_e = 0, L_h = 0;
  int width() const { return channel_width(cls); }
  int dim() const { return width() * (L_e + L_h); }
  int elliptic_dim() const { return width() * L_e; }
  int elliptic_offset() const { return width() * L_h; }
};
EnsembleChannels ensemble_channels(const NormalFormBundle& bundle);

// Streaming collector for all frame-ensemble statistics; feed snapshots in
// deterministic order, then finalize.
class RppCollector {
 public:
  struct Options {
    bool spacings_full = true;
    bool spacings_elliptic = true;
    bool phases = true;
    bool entries = true;
    bool uv_product = true;
    bool blocks = true;
  };

  explicit RppCollector(const EnsembleChannels& channels);
  RppCollector(const EnsembleChannels& channels, Options opt);

  void consume(const FrameSnapshot& snap);
  long snapshots() const { return snapshots_; }

  // finalized statistics
  SpacingHistogram spacing_histogram(BlockSelection block) const;
  SpacingHistogram uv_spacing_histogram() const;
  std::vector<double> pooled_phases(BlockSelection block) const;  // sorted
  std::vector<double> pooled_entry_moduli() const;                // sorted
  double offblock_rms() const;
  double hyperbolic_deviation_rms() const;
  double mean_polar_deviation() const;

 private:
  EnsembleChannels ch_;
  Options opt_;
  long snapshots_ = 0;
  std::vector<double> spac_full_, spac_ell_, spac_uv_;
  std::vector<double> phases_full_, phases_ell_;
  std::vector<double> entries_;
  long dropped_full_ = 0, dropped_ell_ = 0, dropped_uv_ = 0;
  double offblock_sq_ = 0.0, hyp_dev_sq_ = 0.0, polar_dev_ = 0.0;
  long polar_count_ = 0;
};

// Vector-based operations on a materialized ensemble.
SpacingHistogram eigenphase_spacings(const FrameEnsemble& ensemble,
                                     const EnsembleChannels& channels,
                                     BlockSelection block);

struct DensityResult {
  std::vector<double> edges;
  std::vector<double> density;
  long count = 0;
  double ks_vs_uniform = 0.0;
};
DensityResult eigenphase_density(const FrameEnsemble& ensemble,
                                 const EnsembleChannels& channels,
                                 BlockSelection block);

struct EntryModulusResult {
  std::vector<double> edges;
  std::vector<double> density;
  long count = 0;
  double ks = 0.0;  // against 1 - (1 - r^2)^(n_e - 1)
};
EntryModulusResult entry_modulus_distribution(const FrameEnsemble& ensemble,
                                              const EnsembleChannels& channels);

// Analytic CDF of |entry| of a Haar unitary of dimension n.
double haar_entry_modulus_cdf(double r, int n);

struct UVCorrelationResult {
  SpacingHistogram histogram;
  double ks_cue = 0.0, ks_coe = 0.0;
  int selected_beta = 0;  // 2 for CUE, 1 for COE
  double margin_sigmas = 0.0;
};
UVCorrelationResult uv_correlation_statistics(const FrameEnsemble& ensemble,
                                              const EnsembleChannels& channels);
UVCorrelationResult uv_correlation_from_collector(const RppCollector& collector);

struct BlockStructureResult {
  double offblock_rms = 0.0;
  double hyperbolic_deviation = 0.0;
};
BlockStructureResult block_structure_check(const FrameEnsemble& ensemble,
                                           const EnsembleChannels& channels);

// Polar decomposition of a Lorentz-group member (Cayley picture):
// X = diag(u,v) ((sqrt(1+L), sqrt(L)), (sqrt(L), sqrt(1+L))) diag(u',v').
struct PolarDecomposition {
  RealVector Lambda;  // non-decreasing, >= 0
  Matrix u, v, up, vp;
  double residual = 0.0;
};
PolarDecomposition polar_diagnostic(const Matrix& lorentz_member);

// Histogram util shared by the statistics (density normalized by total count).
void histogram(const std::vector<double>& samples, double lo, double hi, int bins,
               std::vector<double>& edges, std::vector<double>& density);

}  // namespace hslyap

#endif
