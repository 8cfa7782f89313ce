#pragma once

#include <string>
#include <vector>

#include "odp/config.hpp"
#include "odp/distill.hpp"
#include "odp/envs.hpp"
#include "odp/policy.hpp"
#include "odp/schedule.hpp"

namespace odp::cli {

// Everything a subcommand needs that follows from a RunConfig: the task's
// training dataset, the noise schedule, and the draw rules. The dataset is
// rebuilt deterministically from (config, seed), which is how distill/eval
// recover the observation pool belonging to a checkpoint.
struct TaskSetup {
    bool is_bandit = false;
    bool moving = false;
    BanditSpec bandit; // bandit tasks only
    Dataset data;
    NoiseSchedule sched;
    KRule pretrain_krule;
    KRule distill_krule;
    LambdaWeight lambda;
    double t_init_raw = 65.0;
};

BanditSpec bandit_gauss_spec(const RunConfig& cfg);
BanditSpec bandit_bimodal_spec(const RunConfig& cfg);

NoiseSchedule schedule_from_config(const RunConfig& cfg);
SamplerSpec sampler_from_config(const RunConfig& cfg);

// Canonical episode geometry: the agent starts at the origin, the target at
// a random bearing and distance, fleeing straight along that bearing on
// moving tasks. The same draw is used for demonstrations and evaluation.
Reach2DSpec reach_spec_from_config(const RunConfig& cfg, bool moving, Rng& rng);
// The nominal geometry (bearing 0, mid-range distance) used wherever one
// representative episode is needed, e.g. latency calibration.
Reach2DSpec reach_spec_nominal(const RunConfig& cfg, bool moving);

std::vector<Episode> gen_reach_demos(const RunConfig& cfg, bool moving, Rng& rng);

TaskSetup build_task(const RunConfig& cfg, std::uint64_t dataset_seed);

LatencyModel latency_from_config(const RunConfig& cfg);

// Full command-line front end; args excludes argv[0].
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
int run(const std::vector<std::string>& args);

} // namespace odp::cli
