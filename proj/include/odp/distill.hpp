#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "odp/adam.hpp"
#include "odp/denoiser.hpp"
#include "odp/diffusion.hpp"
#include "odp/policy.hpp"
#include "odp/rng.hpp"
#include "odp/schedule.hpp"
#include "odp/tensor.hpp"

namespace odp {

enum class GenMode { Stochastic, Deterministic };

const char* gen_mode_name(GenMode m);
GenMode gen_mode_from_name(const std::string& name);

// One-step generator: the teacher's architecture queried at a fixed noise
// level. Stochastic mode feeds z ~ N(0,I) into the chunk slot; deterministic
// mode feeds zeros, making the output a pure function of the observation.
struct Generator {
    EpsNet net;
    GenMode mode = GenMode::Stochastic;
    double t_init_raw = 65.0; // ddpm step index, or sigma for edm

    Vec sample_normalized(const Vec& obs, Rng& rng) const { return sample_via(net, obs, rng); }

    // Same forward pass routed through an explicit denoiser view, so callers
    // can wrap the net in a CountingDenoiser for NFE instrumentation.
    Vec sample_via(const Denoiser& view, const Vec& obs, Rng& rng) const;
};

struct DistillConfig {
    GenMode mode = GenMode::Stochastic;
    double lr_theta = 1e-6;
    double lr_psi = 2e-5;
    double beta1 = 0.0;
    double beta2 = 0.999;
    std::size_t batch = 64;
    std::size_t steps = 1000;
    std::size_t psi_per_theta = 1;
    double t_init_raw = 65.0;
    KRule krule = KRule::uniform_int(2, 95);
    LambdaWeight lambda;
    std::size_t log_every = 50;
};

struct DistillState {
    Generator theta;
    EpsNet psi;
    const EpsNet* phi = nullptr; // frozen teacher, never mutated
    NoiseSchedule sched;
    DistillConfig cfg;
    Adam opt_theta;
    Adam opt_psi;

    // Warm start: theta and psi begin as exact copies of the teacher.
    static DistillState init(const EpsNet& teacher, const NoiseSchedule& sched, DistillConfig cfg);
};

// Single-sample generator gradient at explicit (z, k_raw, eps), accumulated
// into grad. The score difference is held constant; gradients flow only
// through A^k = alpha_k A_theta + sigma_k eps, so the upstream coefficient is
// (w(k)/sigma_k) alpha_k (eps_phi - eps_ref), with eps_ref = psi's prediction
// (stochastic) or the corruption noise itself (deterministic). Returns that
// coefficient.
Vec theta_grad_single(const Generator& theta, const Denoiser& phi, const Denoiser* psi,
                      GenMode mode, const NoiseSchedule& sched, const Vec& obs, const Vec& z,
                      double k_raw, const Vec& eps, Vec& grad);

// Batch gradient with (z, k, eps) drawn internally; mean over the batch.
// Returns the gradient norm.
double theta_grad(const Generator& theta, const Denoiser& phi, const Denoiser* psi, GenMode mode,
                  const NoiseSchedule& sched, const KRule& krule,
                  const std::vector<Vec>& obs_batch, Rng& rng, Vec& grad);

// One DSM step for psi on fresh generator samples (gradient flow into theta
// blocked by construction). Stochastic mode only. Returns the psi loss.
double psi_step(DistillState& st, const std::vector<Vec>& obs_batch, Rng& rng);

// One Adam step on theta. Returns the batch gradient norm.
double theta_step(DistillState& st, const std::vector<Vec>& obs_batch, Rng& rng);

// Receding-horizon view of a one-step generator; NFE comes from a counting
// wrapper around the net, not from an assumption.
class GeneratorActor : public Actor {
  public:
    GeneratorActor(const Generator& gen, Normalizer norm, std::size_t t_chunk,
                   std::size_t action_dim)
        : gen_(gen), norm_(std::move(norm)), t_chunk_(t_chunk), action_dim_(action_dim) {}

    PredictResult predict(const Vec& obs, Rng& rng) const override;
    std::size_t t_chunk() const override { return t_chunk_; }
    std::size_t action_dim() const override { return action_dim_; }
    std::size_t clamp_events() const { return clamp_events_; }

  private:
    const Generator& gen_;
    Normalizer norm_;
    std::size_t t_chunk_;
    std::size_t action_dim_;
    mutable std::size_t clamp_events_ = 0;
};

struct DistillLogRow {
    std::size_t step = 0;
    double loss_psi = 0.0; // NaN in deterministic mode
    double grad_norm_theta = 0.0;
};

// Distillation loop: per iteration draw an observation batch from the pool;
// in stochastic mode run psi_per_theta psi updates then one theta update
// (fresh batches for extra psi updates), in deterministic mode theta only.
std::vector<DistillLogRow> distill_run(
    DistillState& st, const std::vector<Vec>& obs_pool, Rng& rng,
    const std::function<void(std::size_t, DistillState&)>& on_log = {});

} // namespace odp
