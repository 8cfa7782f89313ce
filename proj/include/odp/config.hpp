#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "odp/errors.hpp"

namespace odp {

// Flat run configuration. Every field has a default; unknown keys in a
// config file are rejected with the offending key named.
struct RunConfig {
    std::string task = "bandit_gauss"; // bandit_gauss | bandit_bimodal | reach_static | reach_moving
    std::string regime = "ddpm";       // ddpm | edm
    std::uint64_t seed = 0;

    // net
    std::vector<std::size_t> hidden{64, 64};
    std::size_t emb_dim = 16;

    // ddpm schedule
    int ddpm_steps = 100;
    double cosine_s = 0.008;
    // edm schedule
    double sigma_min = 0.002;
    double sigma_max = 80.0;
    double rho = 7.0;
    double sigma_data = 0.5;

    // chunking
    std::size_t t_chunk = 16;
    std::size_t n_obs = 2;
    std::size_t t_act = 8;

    // pretraining
    std::size_t pretrain_steps = 3000;
    std::size_t pretrain_batch = 64;
    double pretrain_lr = 1e-4;
    double pretrain_weight_decay = 1e-6;
    double pretrain_beta1 = 0.9;
    double pretrain_beta2 = 0.999;

    // distillation
    std::string mode = "s"; // s | d
    std::size_t distill_steps = 1000;
    std::size_t distill_batch = 64;
    double generator_lr = 1e-6;
    double score_lr = 2e-5;
    double beta1 = 0.0;
    double beta2 = 0.999;
    double t_init = 65.0;
    double sigma_init = 2.5;
    int k_lo = 2;
    int k_hi = 95;
    double edm_p_mean = -1.2;
    double edm_p_std = 1.2;
    std::size_t psi_per_theta = 1;

    // bandit task
    double bandit_sep = 0.6;
    double bandit_sigma = 0.15;
    std::size_t n_per_condition = 2000;

    // reach task
    double capture_radius = 0.15;
    double env_dt = 0.05;
    int horizon = 120;
    double v_max = 1.0;
    double target_speed = 0.65;
    std::size_t demo_episodes = 150;

    // evaluation / benchmarking / sampling
    std::size_t eval_inits = 20;
    std::string latency = "zero"; // zero | fixed | calibrated
    double latency_c = 0.0;
    double latency_o = 0.0;
    std::string sampler = "ddpm"; // ddpm | ddim | edm_heun
    int sampler_steps = 10;
    std::size_t bench_reps = 50;
    std::size_t n_samples = 16;
    std::size_t log_every = 50;

    void validate() const;
};

RunConfig load_config(const std::string& path);
RunConfig config_from_json_text(const std::string& text, const std::string& origin);

} // namespace odp
