#include "hslyap/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <thread>

namespace hslyap {

void ChainConfig::validate() const {
  if (steps < 1) throw Error("chain needs at least one step");
  if (collect_ensemble && burn_in >= steps)
    throw Error("burn_in must be smaller than the step count");
  if (stride < 1) throw Error("stride must be >= 1");
  if (renorm_every < 1) throw Error("renorm_every must be >= 1");
  if (collect_ensemble && renorm_every != 1)
    throw Error("ensemble harvesting requires renormalization every step");
  if (realizations < 1) throw Error("need at least one realization");
}

namespace {

IsotropicFrame axis_frame(SymmetryClass cls, int channels) {
  const int l = ambient_size(cls, channels);
  Matrix phi = Matrix::Zero(2 * l, l);
  phi.topRows(l) = Matrix::Identity(l, l);
  return {std::move(phi), cls};
}

}  // namespace

Chain::Chain(const NormalFormBundle& bundle, const ChainConfig& config, int realization)
    : bundle_(&bundle),
      config_(config),
      realization_(realization),
      rng_(RngStream(config.seed).split(static_cast<std::uint64_t>(realization))),
      frame_(config.initial == InitialFrame::Axis
                 ? axis_frame(bundle.cls, bundle.params.L)
                 : random_frame(bundle.cls, bundle.params.L, rng_)),
      sums_(RealVector::Zero(bundle.params.L)),
      w_(bundle.params.L),
      block_len_(std::max<long>(1000, config.steps / 128)),
      block_acc_(RealVector::Zero(bundle.params.L)),
      block_sums_(RealVector::Zero(bundle.params.L)) {
  config_.validate();
}

void Chain::advance(long steps, const SnapshotConsumer* sink) {
  const int nch = bundle_->params.L;
  const SymmetryClass cls = bundle_->cls;
  const bool lambda_zero = bundle_->params.lambda == 0.0;
  for (long s = 0; s < steps; ++s) {
    if (lambda_zero) {
      bundle_->apply_rotation(frame_.phi);
    } else {
      for (int i = 0; i < nch; ++i) w_[i] = draw_disorder(bundle_->params.disorder, rng_);
      bundle_->apply_step(frame_.phi, w_);
    }
    ++steps_done_;
    if (++renorm_counter_ >= config_.renorm_every) {
      renorm_counter_ = 0;
      TriangularCocycle coc;
      try {
        coc = gram_schmidt_cocycle(frame_.phi, cls);
      } catch (SingularAction& err) {
        err.step = steps_done_;
        throw;
      }
      for (int p = 1; p <= nch; ++p) {
        const double g = additive_cocycle(coc, p, cls);
        sums_[p - 1] += g;
        block_acc_[p - 1] += g;
      }
      if (++block_fill_ >= block_len_) {
        block_means_.push_back(block_acc_ / double(block_fill_ * config_.renorm_every));
        block_sums_ += block_acc_;
        block_acc_.setZero();
        block_fill_ = 0;
      }
      if (config_.reproject_every > 0 &&
          (steps_done_ / config_.renorm_every) % config_.reproject_every == 0)
        reproject_frame(frame_);
    }
    if (sink && config_.collect_ensemble && steps_done_ > config_.burn_in &&
        (steps_done_ - config_.burn_in) % config_.stride == 0) {
      FrameSnapshot snap;
      snap.realization = realization_;
      snap.step = steps_done_;
      snap.uv = uv_of_frame(frame_);
      (*sink)(snap);
    }
  }
}

RealVector Chain::gamma() const {
  if (steps_done_ == 0) return RealVector::Zero(sums_.size());
  return sums_ / double(steps_done_);
}

RealVector Chain::block_variance_gamma() const {
  const int nch = static_cast<int>(sums_.size());
  RealVector var = RealVector::Zero(nch);
  const int nb = static_cast<int>(block_means_.size());
  if (nb < 2) return var;
  RealVector mean = RealVector::Zero(nch);
  for (const auto& b : block_means_) mean += b;
  mean /= nb;
  for (const auto& b : block_means_) var += (b - mean).cwiseProduct(b - mean);
  var /= double(nb - 1);
  return var / double(nb);  // variance of the mean of block means
}

namespace {

struct ChainResult {
  RealVector gamma;
  RealVector block_var;
  FrameEnsemble ensemble;
};

ChainResult run_single(const NormalFormBundle& bundle, const ChainConfig& config,
                       int realization, bool materialize) {
  Chain chain(bundle, config, realization);
  ChainResult out;
  if (config.collect_ensemble) {
    SnapshotConsumer sink = [&](const FrameSnapshot& s) { out.ensemble.push_back(s); };
    chain.advance(config.steps, &sink);
  } else {
    chain.advance(config.steps, nullptr);
  }
  (void)materialize;
  out.gamma = chain.gamma();
  out.block_var = chain.block_variance_gamma();
  return out;
}

int worker_count(const ChainConfig& config) {
  int t = config.threads > 0 ? config.threads
                             : static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, std::min(t, config.realizations));
}

}  // namespace

std::pair<LyapunovEstimate, FrameEnsemble> run_chain(const NormalFormBundle& bundle,
                                                     const ChainConfig& config,
                                                     int realization) {
  ChainResult r = run_single(bundle, config, realization, true);
  LyapunovEstimate est;
  est.gamma = r.gamma;
  est.stderr_ = r.block_var.cwiseSqrt();
  est.steps = config.steps;
  est.realizations = 1;
  est.seed = config.seed;
  return {est, std::move(r.ensemble)};
}

std::pair<LyapunovEstimate, FrameEnsemble> run_ensemble(const NormalFormBundle& bundle,
                                                        const ChainConfig& config,
                                                        const SnapshotConsumer* sink) {
  config.validate();
  const int R = config.realizations;
  const int workers = worker_count(config);
  std::vector<ChainResult> results(R);
  std::vector<std::string> failures;

  for (int wave = 0; wave < R; wave += workers) {
    const int count = std::min(workers, R - wave);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(count);
    for (int k = 0; k < count; ++k) {
      pool.emplace_back([&, k] {
        try {
          results[wave + k] = run_single(bundle, config, wave + k, true);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (int k = 0; k < count; ++k) {
      if (errors[k]) {
        try {
          std::rethrow_exception(errors[k]);
        } catch (const std::exception& e) {
          failures.push_back("realization " + std::to_string(wave + k) + ": " + e.what());
        }
      }
    }
    if (!failures.empty()) {
      std::string msg = "ensemble failures:";
      for (const auto& f : failures) msg += "\n  " + f;
      throw Error(msg);
    }
  }

  const int nch = bundle.params.L;
  LyapunovEstimate est;
  est.gamma = RealVector::Zero(nch);
  est.stderr_ = RealVector::Zero(nch);
  est.steps = config.steps;
  est.realizations = R;
  est.seed = config.seed;
  for (const auto& r : results) est.gamma += r.gamma;
  est.gamma /= R;
  if (R > 1) {
    RealVector var = RealVector::Zero(nch);
    for (const auto& r : results) var += (r.gamma - est.gamma).cwiseProduct(r.gamma - est.gamma);
    var /= double(R - 1);
    est.stderr_ = (var / double(R)).cwiseSqrt();
  } else {
    est.stderr_ = results[0].block_var.cwiseSqrt();
  }

  FrameEnsemble merged;
  for (auto& r : results) {
    for (auto& snap : r.ensemble) {
      if (sink) (*sink)(snap);
      else merged.push_back(std::move(snap));
    }
    r.ensemble.clear();
  }
  return {est, std::move(merged)};
}

LyapunovEstimate run_ensemble_adaptive(const NormalFormBundle& bundle, ChainConfig config,
                                       double target_rel, const std::vector<int>& watch_channels,
                                       long max_steps,
                                       std::function<void(const LyapunovEstimate&)> progress) {
  config.collect_ensemble = false;
  config.validate();
  const int R = config.realizations;
  const int workers = worker_count(config);
  const int nch = bundle.params.L;

  std::vector<std::unique_ptr<Chain>> chains;
  chains.reserve(R);
  for (int r = 0; r < R; ++r) chains.push_back(std::make_unique<Chain>(bundle, config, r));

  long block = config.steps;
  long total = 0;
  LyapunovEstimate est;
  est.seed = config.seed;
  est.realizations = R;

  while (true) {
    for (int wave = 0; wave < R; wave += workers) {
      const int count = std::min(workers, R - wave);
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(count);
      for (int k = 0; k < count; ++k)
        pool.emplace_back([&, k] {
          try {
            chains[wave + k]->advance(block, nullptr);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        });
      for (auto& th : pool) th.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
    total += block;

    est.gamma = RealVector::Zero(nch);
    for (const auto& c : chains) est.gamma += c->gamma();
    est.gamma /= R;
    RealVector var = RealVector::Zero(nch);
    if (R > 1) {
      for (const auto& c : chains)
        var += (c->gamma() - est.gamma).cwiseProduct(c->gamma() - est.gamma);
      var /= double(R - 1);
      est.stderr_ = (var / double(R)).cwiseSqrt();
    } else {
      est.stderr_ = chains[0]->block_variance_gamma().cwiseSqrt();
    }
    est.steps = total;
    if (progress) progress(est);

    bool ok = true;
    for (int p : watch_channels) {
      const double g = std::abs(est.gamma[p]);
      if (g == 0.0 || est.stderr_[p] > target_rel * g) ok = false;
    }
    if (ok || total >= max_steps) break;
    block = std::min(block, max_steps - total);
  }
  return est;
}

}  // namespace hslyap
