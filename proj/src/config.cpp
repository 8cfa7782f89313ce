#include "odp/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace odp {

using json = nlohmann::json;

namespace {

template <typename T>
void take(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

} // namespace

void RunConfig::validate() const {
    if (task != "bandit_gauss" && task != "bandit_bimodal" && task != "reach_static" &&
        task != "reach_moving")
        throw ConfigError("config: unknown task '" + task + "'");
    if (regime != "ddpm" && regime != "edm")
        throw ConfigError("config: unknown regime '" + regime + "'");
    if (mode != "s" && mode != "d") throw ConfigError("config: mode must be 's' or 'd'");
    if (sampler != "ddpm" && sampler != "ddim" && sampler != "edm_heun")
        throw ConfigError("config: unknown sampler '" + sampler + "'");
    if (latency != "zero" && latency != "fixed" && latency != "calibrated")
        throw ConfigError("config: unknown latency scenario '" + latency + "'");
    if (hidden.empty()) throw ConfigError("config: hidden layer list cannot be empty");
    if (t_act < 1 || t_act > t_chunk) throw ConfigError("config: need 1 <= t_act <= t_chunk");
    if (n_obs < 1) throw ConfigError("config: n_obs >= 1");
    if (ddpm_steps < 1) throw ConfigError("config: ddpm_steps >= 1");
    if (k_lo < 1 || k_hi < k_lo || k_hi > ddpm_steps)
        throw ConfigError("config: need 1 <= k_lo <= k_hi <= ddpm_steps");
    if (t_init < 0 || t_init > ddpm_steps) throw ConfigError("config: t_init outside schedule");
    if (!(sigma_init > 0.0)) throw ConfigError("config: sigma_init must be positive");
    if (pretrain_batch < 1 || distill_batch < 1) throw ConfigError("config: batch sizes >= 1");
    if (log_every < 1) throw ConfigError("config: log_every >= 1");
    if (psi_per_theta < 1) throw ConfigError("config: psi_per_theta >= 1");
}

RunConfig config_from_json_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("config " + origin + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config " + origin + " must be a JSON object");

    static const std::vector<std::string> known = {
        "task",           "regime",
        "seed",           "hidden",
        "emb_dim",        "ddpm_steps",
        "cosine_s",       "sigma_min",
        "sigma_max",      "rho",
        "sigma_data",     "t_chunk",
        "n_obs",          "t_act",
        "pretrain_steps", "pretrain_batch",
        "pretrain_lr",    "pretrain_weight_decay",
        "pretrain_beta1", "pretrain_beta2",
        "mode",           "distill_steps",
        "distill_batch",  "generator_lr",
        "score_lr",       "beta1",
        "beta2",          "t_init",
        "sigma_init",     "k_lo",
        "k_hi",           "edm_p_mean",
        "edm_p_std",      "psi_per_theta",
        "bandit_sep",     "bandit_sigma",
        "n_per_condition", "capture_radius",
        "env_dt",         "horizon",
        "v_max",          "target_speed",
        "demo_episodes",  "eval_inits",
        "latency",        "latency_c",
        "latency_o",      "sampler",
        "sampler_steps",  "bench_reps",
        "n_samples",      "log_every",
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const auto& k : known)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("config " + origin + ": unknown key '" + it.key() + "'");
    }

    RunConfig c;
    take(j, "task", c.task);
    take(j, "regime", c.regime);
    take(j, "seed", c.seed);
    take(j, "hidden", c.hidden);
    take(j, "emb_dim", c.emb_dim);
    take(j, "ddpm_steps", c.ddpm_steps);
    take(j, "cosine_s", c.cosine_s);
    take(j, "sigma_min", c.sigma_min);
    take(j, "sigma_max", c.sigma_max);
    take(j, "rho", c.rho);
    take(j, "sigma_data", c.sigma_data);
    take(j, "t_chunk", c.t_chunk);
    take(j, "n_obs", c.n_obs);
    take(j, "t_act", c.t_act);
    take(j, "pretrain_steps", c.pretrain_steps);
    take(j, "pretrain_batch", c.pretrain_batch);
    take(j, "pretrain_lr", c.pretrain_lr);
    take(j, "pretrain_weight_decay", c.pretrain_weight_decay);
    take(j, "pretrain_beta1", c.pretrain_beta1);
    take(j, "pretrain_beta2", c.pretrain_beta2);
    take(j, "mode", c.mode);
    take(j, "distill_steps", c.distill_steps);
    take(j, "distill_batch", c.distill_batch);
    take(j, "generator_lr", c.generator_lr);
    take(j, "score_lr", c.score_lr);
    take(j, "beta1", c.beta1);
    take(j, "beta2", c.beta2);
    take(j, "t_init", c.t_init);
    take(j, "sigma_init", c.sigma_init);
    take(j, "k_lo", c.k_lo);
    take(j, "k_hi", c.k_hi);
    take(j, "edm_p_mean", c.edm_p_mean);
    take(j, "edm_p_std", c.edm_p_std);
    take(j, "psi_per_theta", c.psi_per_theta);
    take(j, "bandit_sep", c.bandit_sep);
    take(j, "bandit_sigma", c.bandit_sigma);
    take(j, "n_per_condition", c.n_per_condition);
    take(j, "capture_radius", c.capture_radius);
    take(j, "env_dt", c.env_dt);
    take(j, "horizon", c.horizon);
    take(j, "v_max", c.v_max);
    take(j, "target_speed", c.target_speed);
    take(j, "demo_episodes", c.demo_episodes);
    take(j, "eval_inits", c.eval_inits);
    take(j, "latency", c.latency);
    take(j, "latency_c", c.latency_c);
    take(j, "latency_o", c.latency_o);
    take(j, "sampler", c.sampler);
    take(j, "sampler_steps", c.sampler_steps);
    take(j, "bench_reps", c.bench_reps);
    take(j, "n_samples", c.n_samples);
    take(j, "log_every", c.log_every);
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str(), path);
}

} // namespace odp
