#include "hslyap/rpp_stats.hpp"

#include <algorithm>
#include <cmath>

namespace hslyap {

namespace {

constexpr double kCoincidentTol = 1e-13;

double sq(double x) { return x * x; }

}  // namespace

double SurmiseCurve::pdf(double s) const {
  if (s < 0) return 0.0;
  switch (beta) {
    case 1: return 0.5 * M_PI * s * std::exp(-0.25 * M_PI * s * s);
    case 2: return (32.0 / (M_PI * M_PI)) * s * s * std::exp(-4.0 * s * s / M_PI);
    case 4: {
      const double c = 262144.0 / (729.0 * M_PI * M_PI * M_PI);
      return c * std::pow(s, 4) * std::exp(-64.0 * s * s / (9.0 * M_PI));
    }
  }
  throw Error("surmise: beta must be 1, 2 or 4");
}

double SurmiseCurve::cdf(double s) const {
  if (s <= 0) return 0.0;
  switch (beta) {
    case 1: return 1.0 - std::exp(-0.25 * M_PI * s * s);
    case 2: {
      const double x = 4.0 * s * s / M_PI;
      return std::erf(std::sqrt(x)) - 2.0 / std::sqrt(M_PI) * std::sqrt(x) * std::exp(-x);
    }
    case 4: {
      const double x = 64.0 * s * s / (9.0 * M_PI);
      const double rx = std::sqrt(x);
      return std::erf(rx) - 2.0 / std::sqrt(M_PI) * rx * std::exp(-x) -
             4.0 / (3.0 * std::sqrt(M_PI)) * x * rx * std::exp(-x);
    }
  }
  throw Error("surmise: beta must be 1, 2 or 4");
}

SurmiseCurve surmise(int beta) {
  if (beta != 1 && beta != 2 && beta != 4)
    throw Error("surmise: beta must be 1, 2 or 4");
  return SurmiseCurve{beta};
}

double ks_statistic(const std::vector<double>& sorted_samples,
                    const std::function<double(double)>& cdf) {
  const long n = static_cast<long>(sorted_samples.size());
  if (n == 0) throw Error("ks_statistic: empty sample");
  double d = 0.0;
  for (long i = 0; i < n; ++i) {
    const double f = cdf(sorted_samples[i]);
    d = std::max(d, std::abs(f - double(i + 1) / n));
    d = std::max(d, std::abs(f - double(i) / n));
  }
  return d;
}

double ks_sampling_sigma(long n) { return 0.26 / std::sqrt(double(n)); }

PolarFactor unitary_polar_factor(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  PolarFactor out;
  out.unitary = svd.matrixU() * svd.matrixV().adjoint();
  out.deviation = (a - out.unitary).norm();
  return out;
}

EnsembleChannels ensemble_channels(const NormalFormBundle& bundle) {
  EnsembleChannels ch;
  ch.cls = bundle.cls;
  ch.L_e = bundle.channels.L_e;
  ch.L_h = bundle.channels.L_h;
  return ch;
}

void histogram(const std::vector<double>& samples, double lo, double hi, int bins,
               std::vector<double>& edges, std::vector<double>& density) {
  edges.resize(bins + 1);
  density.assign(bins, 0.0);
  const double w = (hi - lo) / bins;
  for (int b = 0; b <= bins; ++b) edges[b] = lo + b * w;
  if (samples.empty()) return;
  for (double s : samples) {
    const int b = static_cast<int>((s - lo) / w);
    if (b >= 0 && b < bins) density[b] += 1.0;
  }
  const double norm = 1.0 / (samples.size() * w);
  for (double& d : density) d *= norm;
}

namespace {

// Sorted eigenphases of a unitary matrix.
std::vector<double> eigenphases(const Matrix& u) {
  Eigen::ComplexEigenSolver<Matrix> es(u, /*computeEigenvectors=*/false);
  std::vector<double> ph(u.rows());
  for (int i = 0; i < u.rows(); ++i) ph[i] = std::arg(es.eigenvalues()[i]);
  std::sort(ph.begin(), ph.end());
  return ph;
}

// Circular consecutive spacings normalized to unit mean.
void append_spacings(const std::vector<double>& phases, std::vector<double>& pool,
                     long& dropped) {
  const int n = static_cast<int>(phases.size());
  if (n < 2) return;
  const double scale = n / (2.0 * M_PI);
  for (int i = 0; i < n; ++i) {
    const double raw = (i + 1 < n) ? phases[i + 1] - phases[i]
                                   : 2.0 * M_PI - (phases[n - 1] - phases[0]);
    if (raw < kCoincidentTol) {
      ++dropped;
      continue;
    }
    pool.push_back(raw * scale);
  }
}

SpacingHistogram finalize_spacings(std::vector<double> pool, long dropped) {
  SpacingHistogram h;
  h.dropped = dropped;
  h.count = static_cast<long>(pool.size());
  if (!pool.empty()) {
    double mean = 0.0;
    for (double s : pool) mean += s;
    mean /= pool.size();
    h.mean_raw = mean * (2.0 * M_PI);  // before the per-matrix normalization
    // renormalize the pooled set to unit mean
    for (double& s : pool) s /= mean;
  }
  std::sort(pool.begin(), pool.end());
  histogram(pool, 0.0, 4.0, 50, h.edges, h.density);
  h.samples = std::move(pool);
  return h;
}

}  // namespace

RppCollector::RppCollector(const EnsembleChannels& channels)
    : RppCollector(channels, Options{}) {}

RppCollector::RppCollector(const EnsembleChannels& channels, Options opt)
    : ch_(channels), opt_(opt) {}

void RppCollector::consume(const FrameSnapshot& snap) {
  ++snapshots_;
  const Matrix& u = snap.uv.U;
  const int ne = ch_.elliptic_dim();
  const int off = ch_.elliptic_offset();
  const Matrix ue = u.block(off, off, ne, ne);

  if (opt_.spacings_full) append_spacings(eigenphases(u), spac_full_, dropped_full_);
  if ((opt_.spacings_elliptic || opt_.phases) && ne > 0) {
    const PolarFactor pf = unitary_polar_factor(ue);
    polar_dev_ += pf.deviation;
    ++polar_count_;
    const std::vector<double> ph = eigenphases(pf.unitary);
    if (opt_.spacings_elliptic) append_spacings(ph, spac_ell_, dropped_ell_);
    if (opt_.phases) {
      phases_ell_.insert(phases_ell_.end(), ph.begin(), ph.end());
      const std::vector<double> pf_full = eigenphases(u);
      phases_full_.insert(phases_full_.end(), pf_full.begin(), pf_full.end());
    }
  }
  if (opt_.entries && ne > 0) {
    for (int j = 0; j < ne; ++j)
      for (int i = 0; i < ne; ++i) entries_.push_back(std::abs(ue(i, j)));
  }
  if (opt_.uv_product && ne > 0) {
    const Matrix z = snap.uv.U * snap.uv.V.adjoint();
    const Matrix ze = z.block(off, off, ne, ne);
    const PolarFactor pf = unitary_polar_factor(ze);
    append_spacings(eigenphases(pf.unitary), spac_uv_, dropped_uv_);
  }
  if (opt_.blocks) {
    const int nh = ch_.dim() - ne;
    offblock_sq_ += u.block(off, 0, ne, nh).squaredNorm();
    hyp_dev_sq_ +=
        (u.block(0, 0, nh, nh) - Matrix::Identity(nh, nh)).squaredNorm();
  }
}

SpacingHistogram RppCollector::spacing_histogram(BlockSelection block) const {
  return block == BlockSelection::Full ? finalize_spacings(spac_full_, dropped_full_)
                                       : finalize_spacings(spac_ell_, dropped_ell_);
}

SpacingHistogram RppCollector::uv_spacing_histogram() const {
  return finalize_spacings(spac_uv_, dropped_uv_);
}

std::vector<double> RppCollector::pooled_phases(BlockSelection block) const {
  std::vector<double> p = block == BlockSelection::Full ? phases_full_ : phases_ell_;
  std::sort(p.begin(), p.end());
  return p;
}

std::vector<double> RppCollector::pooled_entry_moduli() const {
  std::vector<double> e = entries_;
  std::sort(e.begin(), e.end());
  return e;
}

double RppCollector::offblock_rms() const {
  return snapshots_ ? std::sqrt(offblock_sq_ / snapshots_) : 0.0;
}

double RppCollector::hyperbolic_deviation_rms() const {
  return snapshots_ ? std::sqrt(hyp_dev_sq_ / snapshots_) : 0.0;
}

double RppCollector::mean_polar_deviation() const {
  return polar_count_ ? polar_dev_ / polar_count_ : 0.0;
}

namespace {

RppCollector collect_all(const FrameEnsemble& ensemble, const EnsembleChannels& channels) {
  RppCollector c(channels);
  for (const auto& s : ensemble) c.consume(s);
  return c;
}

}  // namespace

SpacingHistogram eigenphase_spacings(const FrameEnsemble& ensemble,
                                     const EnsembleChannels& channels,
                                     BlockSelection block) {
  if (ensemble.empty()) throw Error("eigenphase_spacings: empty ensemble");
  RppCollector::Options opt;
  opt.phases = opt.entries = opt.uv_product = opt.blocks = false;
  opt.spacings_full = block == BlockSelection::Full;
  opt.spacings_elliptic = block == BlockSelection::Elliptic;
  RppCollector c(channels, opt);
  for (const auto& s : ensemble) c.consume(s);
  return c.spacing_histogram(block);
}

DensityResult eigenphase_density(const FrameEnsemble& ensemble,
                                 const EnsembleChannels& channels,
                                 BlockSelection block) {
  if (ensemble.empty()) throw Error("eigenphase_density: empty ensemble");
  RppCollector::Options opt;
  opt.spacings_full = opt.spacings_elliptic = opt.entries = opt.uv_product = opt.blocks = false;
  opt.phases = true;
  RppCollector c(channels, opt);
  for (const auto& s : ensemble) c.consume(s);
  DensityResult out;
  const std::vector<double> ph = c.pooled_phases(block);
  out.count = static_cast<long>(ph.size());
  histogram(ph, -M_PI, M_PI, 50, out.edges, out.density);
  out.ks_vs_uniform = ks_statistic(ph, [](double x) {
    return (x + M_PI) / (2.0 * M_PI);
  });
  return out;
}

double haar_entry_modulus_cdf(double r, int n) {
  if (r <= 0) return 0.0;
  if (r >= 1) return 1.0;
  return 1.0 - std::pow(1.0 - r * r, n - 1);
}

EntryModulusResult entry_modulus_distribution(const FrameEnsemble& ensemble,
                                              const EnsembleChannels& channels) {
  if (channels.L_e < 3) throw Error("entry_modulus_distribution needs L_e >= 3");
  RppCollector::Options opt;
  opt.spacings_full = opt.spacings_elliptic = opt.phases = opt.uv_product = opt.blocks = false;
  opt.entries = true;
  RppCollector c(channels, opt);
  for (const auto& s : ensemble) c.consume(s);
  EntryModulusResult out;
  const std::vector<double> e = c.pooled_entry_moduli();
  out.count = static_cast<long>(e.size());
  histogram(e, 0.0, 1.0, 50, out.edges, out.density);
  const int ne = channels.elliptic_dim();
  out.ks = ks_statistic(e, [ne](double r) { return haar_entry_modulus_cdf(r, ne); });
  return out;
}

namespace {

UVCorrelationResult uv_result_from_hist(SpacingHistogram hist) {
  UVCorrelationResult out;
  const SurmiseCurve cue = surmise(2), coe = surmise(1);
  out.ks_cue = ks_statistic(hist.samples, [&](double s) { return cue.cdf(s); });
  out.ks_coe = ks_statistic(hist.samples, [&](double s) { return coe.cdf(s); });
  out.selected_beta = out.ks_cue <= out.ks_coe ? 2 : 1;
  const double sigma = ks_sampling_sigma(std::max<long>(1, hist.count));
  out.margin_sigmas = std::abs(out.ks_cue - out.ks_coe) / sigma;
  out.histogram = std::move(hist);
  return out;
}

}  // namespace

UVCorrelationResult uv_correlation_statistics(const FrameEnsemble& ensemble,
                                              const EnsembleChannels& channels) {
  if (ensemble.empty()) throw Error("uv_correlation_statistics: empty ensemble");
  RppCollector::Options opt;
  opt.spacings_full = opt.spacings_elliptic = opt.phases = opt.entries = opt.blocks = false;
  opt.uv_product = true;
  RppCollector c(channels, opt);
  for (const auto& s : ensemble) c.consume(s);
  return uv_result_from_hist(c.uv_spacing_histogram());
}

UVCorrelationResult uv_correlation_from_collector(const RppCollector& collector) {
  return uv_result_from_hist(collector.uv_spacing_histogram());
}

BlockStructureResult block_structure_check(const FrameEnsemble& ensemble,
                                           const EnsembleChannels& channels) {
  RppCollector::Options opt;
  opt.spacings_full = opt.spacings_elliptic = opt.phases = opt.entries = opt.uv_product = false;
  opt.blocks = true;
  RppCollector c(channels, opt);
  for (const auto& s : ensemble) c.consume(s);
  return {c.offblock_rms(), c.hyperbolic_deviation_rms()};
}

PolarDecomposition polar_diagnostic(const Matrix& x) {
  if (x.rows() != x.cols() || x.rows() % 2 != 0)
    throw DimensionError("polar_diagnostic", x.rows() + (x.rows() % 2), x.rows());
  const int l = static_cast<int>(x.rows()) / 2;
  const Matrix x11 = x.topLeftCorner(l, l);
  const Matrix x12 = x.topRightCorner(l, l);
  const Matrix x21 = x.bottomLeftCorner(l, l);
  const Matrix x22 = x.bottomRightCorner(l, l);

  PolarDecomposition out;
  // singular values ascending so Lambda is non-decreasing
  Eigen::JacobiSVD<Matrix> svd1(x11, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix w1 = svd1.matrixU().rowwise().reverse();
  Matrix v1 = svd1.matrixV().rowwise().reverse();
  RealVector s1 = svd1.singularValues().reverse();
  out.u = w1;
  out.up = v1.adjoint();
  out.Lambda = (s1.cwiseProduct(s1) - RealVector::Ones(l)).cwiseMax(0.0);

  Eigen::JacobiSVD<Matrix> svd2(x22, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix w2 = svd2.matrixU().rowwise().reverse();
  Matrix v2 = svd2.matrixV().rowwise().reverse();

  // per-column phase matching through X21 = v sqrt(Lambda) u'.
  const Matrix probe = w2.adjoint() * x21 * out.up.adjoint();
  Vector d = Vector::Ones(l);
  constexpr double tol = 1e-9;
  for (int i = 0; i < l; ++i) {
    const double root = std::sqrt(out.Lambda[i]);
    if (root > tol) {
      const Complex c = probe(i, i) / root;
      if (std::abs(c) > tol) d[i] = c / std::abs(c);
    }
  }
  out.v = w2 * d.asDiagonal();
  out.vp = d.conjugate().asDiagonal() * v2.adjoint();

  // reconstruction residual
  const RealVector sl = out.Lambda.cwiseSqrt();
  const RealVector cl = (out.Lambda + RealVector::Ones(l)).cwiseSqrt();
  Matrix rec(2 * l, 2 * l);
  rec.topLeftCorner(l, l) = out.u * cl.asDiagonal() * out.up;
  rec.topRightCorner(l, l) = out.u * sl.asDiagonal() * out.vp;
  rec.bottomLeftCorner(l, l) = out.v * sl.asDiagonal() * out.up;
  rec.bottomRightCorner(l, l) = out.v * cl.asDiagonal() * out.vp;
  out.residual = max_abs(rec - x);
  return out;
}

}  // namespace hslyap
