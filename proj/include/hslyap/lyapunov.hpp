#ifndef HSLYAP_LYAPUNOV_HPP
#define HSLYAP_LYAPUNOV_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "hslyap/frames.hpp"
#include "hslyap/models.hpp"

namespace hslyap {

enum class InitialFrame { Random, Axis };

struct ChainConfig {
  long steps = 100000;
  long burn_in = 100;       // snapshots start after this many steps
  int stride = 10;          // snapshot spacing
  int realizations = 1;
  std::uint64_t seed = 0;
  int renorm_every = 1;     // Gram-Schmidt cadence
  int reproject_every = 100;  // isotropy maintenance cadence (in renorm steps)
  bool collect_ensemble = false;
  int threads = 0;          // 0: hardware concurrency
  InitialFrame initial = InitialFrame::Random;

  void validate() const;
};

struct LyapunovEstimate {
  RealVector gamma;     // per-channel Birkhoff means, slot order
  RealVector stderr_;   // standard error per channel
  long steps = 0;
  int realizations = 1;
  std::uint64_t seed = 0;
};

struct FrameSnapshot {
  int realization = 0;
  long step = 0;
  UVPair uv;
};

using FrameEnsemble = std::vector<FrameSnapshot>;

// Streaming alternative to materializing a FrameEnsemble; called in
// deterministic (realization, step) order.
using SnapshotConsumer = std::function<void(const FrameSnapshot&)>;

// One Markov chain in normal coordinates, advanceable in segments.
class Chain {
 public:
  Chain(const NormalFormBundle& bundle, const ChainConfig& config, int realization);

  // Advance `steps` more steps, accumulating cocycle sums; snapshots (if
  // enabled in the config) go to `sink`.
  void advance(long steps, const SnapshotConsumer* sink = nullptr);

  long steps_done() const { return steps_done_; }
  RealVector gamma() const;                 // running Birkhoff means
  const RealVector& block_sums() const { return block_sums_; }
  RealVector block_variance_gamma() const;  // within-chain block stderr^2
  const IsotropicFrame& frame() const { return frame_; }
  int realization() const { return realization_; }

 private:
  const NormalFormBundle* bundle_;
  ChainConfig config_;
  int realization_;
  RngStream rng_;
  IsotropicFrame frame_;
  RealVector sums_;
  long steps_done_ = 0;
  int renorm_counter_ = 0;
  RealVector w_;
  // non-overlapping block means for a single-chain error estimate
  long block_len_;
  RealVector block_acc_;
  long block_fill_ = 0;
  std::vector<RealVector> block_means_;
  RealVector block_sums_;
};

std::pair<LyapunovEstimate, FrameEnsemble> run_chain(const NormalFormBundle& bundle,
                                                     const ChainConfig& config,
                                                     int realization = 0);

// R independent chains in parallel waves; deterministic aggregation in
// realization order.  If `sink` is set, snapshots stream there instead of
// being materialized (the returned ensemble is then empty).
std::pair<LyapunovEstimate, FrameEnsemble> run_ensemble(const NormalFormBundle& bundle,
                                                        const ChainConfig& config,
                                                        const SnapshotConsumer* sink = nullptr);

// Grow all chains in blocks until every watched channel has
// stderr/|gamma| <= target_rel (or steps exceed max_steps).
LyapunovEstimate run_ensemble_adaptive(const NormalFormBundle& bundle,
                                       ChainConfig config, double target_rel,
                                       const std::vector<int>& watch_channels,
                                       long max_steps,
                                       std::function<void(const LyapunovEstimate&)> progress = {});

}  // namespace hslyap

#endif
