#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "odp/denoiser.hpp"
#include "odp/rng.hpp"
#include "odp/schedule.hpp"
#include "odp/tensor.hpp"

namespace odp {

struct MixtureComponent {
    double weight = 1.0;
    Vec mean;     // chunk-shaped, flattened
    double sigma = 1.0;
};

// Finite set of conditions, each with a Gaussian-mixture action distribution.
struct BanditSpec {
    std::vector<Vec> conditions;
    std::vector<std::vector<MixtureComponent>> mixtures;

    std::size_t chunk_len() const;
    std::size_t cond_dim() const;
    void validate() const;

    // Nearest condition by Euclidean distance (conditions are a finite set).
    std::size_t condition_index(const Vec& obs) const;
};

struct BanditPair {
    std::size_t cond = 0;
    Vec chunk;
};

std::vector<BanditPair> gen_bandit_dataset(const BanditSpec& spec, std::size_t n_per_condition,
                                           Rng& rng);

// Exact noise prediction for a diffused mixture: the marginal at level k is
// again a mixture with means alpha_k mu_i and variances alpha_k^2 sigma_i^2
// + sigma_k^2, so eps* = -sigma_k grad log q_k has a closed form.
Vec analytic_bandit_eps(const BanditSpec& spec, std::size_t cond_idx, const Vec& xk, double k_raw,
                        const NoiseSchedule& s);

// log q_k(xk) of the diffused mixture; the oracle the score test
// differentiates numerically.
double bandit_log_qk(const BanditSpec& spec, std::size_t cond_idx, const Vec& xk, double k_raw,
                     const NoiseSchedule& s);

// Denoiser view of the closed form; obs is matched to the nearest condition.
class AnalyticBanditDenoiser : public Denoiser {
  public:
    AnalyticBanditDenoiser(BanditSpec spec, const NoiseSchedule& s)
        : spec_(std::move(spec)), sched_(s) {
        spec_.validate();
    }

    Vec eps(const Vec& x, double k_raw, const Vec& obs) const override {
        return analytic_bandit_eps(spec_, spec_.condition_index(obs), x, k_raw, sched_);
    }
    std::size_t x_dim() const override { return spec_.chunk_len(); }
    std::size_t obs_dim() const override { return spec_.cond_dim(); }

    const BanditSpec& spec() const { return spec_; }

  private:
    BanditSpec spec_;
    NoiseSchedule sched_;
};

// Piecewise-linear target motion at constant speed; speed 0 or a single
// waypoint means a static target.
struct TargetScript {
    std::vector<Vec> waypoints;
    double speed = 0.0;

    bool moving() const { return speed > 0.0 && waypoints.size() > 1; }
    // Position after traveling `time` seconds from the first waypoint; the
    // target stops at the final waypoint.
    Vec position_at(double time) const;
};

struct Reach2DSpec {
    Vec agent_start{0.0, 0.0};
    TargetScript script;
    double capture_radius = 0.15;
    double dt = 0.05;
    int horizon = 120;
    double v_max = 1.0;
    bool has_obstacle = false;
    Vec obstacle_center{0.0, 0.0};
    double obstacle_radius = 0.0;
};

struct StepResult {
    bool done = false;
    bool success = false;
};

// Planar point agent chasing a scripted target. position += action * dt with
// the velocity command clamped to v_max; capture when within the radius.
class Reach2D {
  public:
    explicit Reach2D(Reach2DSpec spec);

    void reset();
    StepResult step(const Vec& action);
    // Scripted time passes without an agent action (prediction latency).
    void advance_time(double seconds);

    Vec state() const;                       // [agent_x, agent_y, target_x, target_y]
    static constexpr std::size_t state_dim() { return 4; }
    static constexpr std::size_t action_dim() { return 2; }

    const Vec& agent() const { return agent_; }
    const Vec& target() const { return target_; }
    double time() const { return time_; }
    int steps_taken() const { return steps_; }
    bool done() const { return done_; }
    bool success() const { return success_; }
    const Reach2DSpec& spec() const { return spec_; }

  private:
    void refresh_target();

    Reach2DSpec spec_;
    Vec agent_;
    Vec target_;
    double time_ = 0.0;
    int steps_ = 0;
    bool done_ = false;
    bool success_ = false;
};

// Proportional pursuit at v_max with a per-episode left/right detour around
// the obstacle, so demonstrations on obstacle tasks are genuinely bimodal.
class ScriptedExpert {
  public:
    ScriptedExpert(const Reach2DSpec& spec, Rng& rng);

    Vec action(const Reach2D& env) const;
    int detour_side() const { return side_; }

  private:
    const Reach2DSpec& spec_;
    int side_ = 0; // -1 left, +1 right, 0 no obstacle
};

struct LatencyModel {
    double c = 0.0; // seconds per network evaluation
    double o = 0.0; // fixed observation-encoding overhead, seconds

    double latency(std::size_t nfe) const { return o + c * static_cast<double>(nfe); }
};

// Smallest per-NFE cost at which the scripted target outruns a slow policy's
// plan (displacement during o + c nfe_slow exceeds the capture radius) while
// the fast policy's staleness stays under half the radius.
double calibrate_latency(const Reach2DSpec& spec, std::size_t nfe_slow, std::size_t nfe_fast,
                         double overhead = 0.0);

} // namespace odp
