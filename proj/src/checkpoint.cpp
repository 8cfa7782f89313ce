#include "odp/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

namespace odp {

using json = nlohmann::json;

namespace {

json schedule_to_json(const NoiseSchedule& s) {
    json j;
    if (s.is_ddpm()) {
        j["K"] = s.K;
        j["cosine_s"] = s.cosine_s;
        j["beta_cap"] = s.beta_cap;
    } else {
        j["sigma_min"] = s.sigma_min;
        j["sigma_max"] = s.sigma_max;
        j["rho"] = s.rho;
        j["sigma_data"] = s.sigma_data;
    }
    return j;
}

NoiseSchedule schedule_from_json(Regime regime, const json& j) {
    if (regime == Regime::DdpmDiscrete)
        return NoiseSchedule::ddpm_cosine(j.at("K").get<int>(), j.at("cosine_s").get<double>(),
                                          j.at("beta_cap").get<double>());
    return NoiseSchedule::edm(j.at("sigma_min").get<double>(), j.at("sigma_max").get<double>(),
                              j.at("rho").get<double>(), j.at("sigma_data").get<double>());
}

const char* act_name(Act a) {
    switch (a) {
    case Act::Linear:
        return "linear";
    case Act::Relu:
        return "relu";
    case Act::Tanh:
        return "tanh";
    }
    return "?";
}

Act act_from_name(const std::string& name) {
    if (name == "linear") return Act::Linear;
    if (name == "relu") return Act::Relu;
    if (name == "tanh") return Act::Tanh;
    throw FileError("checkpoint: unknown activation '" + name + "'");
}

} // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    if (!all_finite(ck.params)) throw ValidationError("save_checkpoint: non-finite parameters");

    json j;
    j["format"] = "ODP";
    j["version"] = ck.version;
    j["regime"] = regime_name(ck.sched.regime);
    j["schedule"] = schedule_to_json(ck.sched);
    j["normalizer"] = {{"lo", ck.norm.lo}, {"hi", ck.norm.hi}};
    j["net"] = {{"x_dim", ck.net_spec.x_dim},
                {"obs_dim", ck.net_spec.obs_dim},
                {"emb_dim", ck.net_spec.emb_dim},
                {"hidden", ck.net_spec.hidden},
                {"act", act_name(ck.net_spec.hidden_act)}};
    j["role"] = ck.role;
    j["seed"] = ck.seed;
    j["step"] = ck.step;
    j["n_obs"] = ck.n_obs;
    j["t_chunk"] = ck.t_chunk;
    j["action_dim"] = ck.action_dim;
    j["state_dim"] = ck.state_dim;
    if (ck.role == "generator") {
        if (!ck.gen_mode || !ck.t_init_raw)
            throw ValidationError("save_checkpoint: generator role needs mode and t_init");
        j["mode"] = gen_mode_name(*ck.gen_mode);
        j["t_init"] = *ck.t_init_raw;
    }
    j["tensors"] = json::array(
        {{{"name", "params"}, {"shape", json::array({ck.params.size()})}, {"data", ck.params}}});

    std::ofstream out(path);
    if (!out) throw FileError("save_checkpoint: cannot open " + path);
    out << j.dump(1) << '\n';
    if (!out) throw FileError("save_checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("load_checkpoint: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FileError("load_checkpoint: " + path + " is not valid JSON: " + e.what());
    }

    try {
        if (j.at("format").get<std::string>() != "ODP")
            throw FileError("load_checkpoint: " + path + " is not an ODP checkpoint");
        const int version = j.at("version").get<int>();
        if (version != 1)
            throw FileError("load_checkpoint: unsupported version " + std::to_string(version) +
                            " in " + path + " (expected 1)");

        Checkpoint ck;
        ck.version = version;
        ck.role = j.at("role").get<std::string>();
        const Regime regime = regime_from_name(j.at("regime").get<std::string>());
        ck.sched = schedule_from_json(regime, j.at("schedule"));
        ck.norm.lo = j.at("normalizer").at("lo").get<Vec>();
        ck.norm.hi = j.at("normalizer").at("hi").get<Vec>();
        ck.norm.validate();

        const json& n = j.at("net");
        ck.net_spec.x_dim = n.at("x_dim").get<std::size_t>();
        ck.net_spec.obs_dim = n.at("obs_dim").get<std::size_t>();
        ck.net_spec.emb_dim = n.at("emb_dim").get<std::size_t>();
        ck.net_spec.hidden = n.at("hidden").get<std::vector<std::size_t>>();
        ck.net_spec.hidden_act = act_from_name(n.at("act").get<std::string>());
        ck.net_spec.regime = regime;

        ck.seed = j.at("seed").get<std::uint64_t>();
        ck.step = j.at("step").get<std::uint64_t>();
        ck.n_obs = j.at("n_obs").get<std::size_t>();
        ck.t_chunk = j.at("t_chunk").get<std::size_t>();
        ck.action_dim = j.at("action_dim").get<std::size_t>();
        ck.state_dim = j.at("state_dim").get<std::size_t>();
        if (ck.role == "generator") {
            ck.gen_mode = gen_mode_from_name(j.at("mode").get<std::string>());
            ck.t_init_raw = j.at("t_init").get<double>();
        }

        const json& t = j.at("tensors").at(0);
        if (t.at("name").get<std::string>() != "params")
            throw FileError("load_checkpoint: first tensor must be 'params' in " + path);
        ck.params = t.at("data").get<Vec>();
        if (!all_finite(ck.params))
            throw FileError("load_checkpoint: non-finite parameters in " + path);
        return ck;
    } catch (const json::exception& e) {
        throw FileError("load_checkpoint: malformed checkpoint " + path + ": " + e.what());
    }
}

EpsNet net_from_checkpoint(const Checkpoint& ck) {
    EpsNet net(ck.net_spec);
    if (net.net().n_params() != ck.params.size())
        throw FileError("net_from_checkpoint: parameter count mismatch (descriptor says " +
                        std::to_string(net.net().n_params()) + ", tensor has " +
                        std::to_string(ck.params.size()) + ")");
    net.net().params() = ck.params;
    return net;
}

DiffusionPolicy policy_from_checkpoint(const Checkpoint& ck) {
    return DiffusionPolicy{net_from_checkpoint(ck), ck.sched,       ck.norm,
                           ck.n_obs,                ck.t_chunk,     ck.action_dim,
                           ck.state_dim};
}

Generator generator_from_checkpoint(const Checkpoint& ck) {
    if (!ck.gen_mode.has_value() || !ck.t_init_raw.has_value())
        throw FileError("generator_from_checkpoint: checkpoint has role '" + ck.role +
                        "' and no generator fields");
    return Generator{net_from_checkpoint(ck), *ck.gen_mode, *ck.t_init_raw};
}

Checkpoint make_teacher_checkpoint(const EpsNet& net, const NoiseSchedule& sched,
                                   const Normalizer& norm, const Dataset& data,
                                   std::uint64_t seed, std::uint64_t step) {
    Checkpoint ck;
    ck.role = "teacher";
    ck.sched = sched;
    ck.norm = norm;
    ck.net_spec = net.spec();
    ck.params = net.net().params();
    ck.seed = seed;
    ck.step = step;
    ck.n_obs = data.n_obs;
    ck.t_chunk = data.t_chunk;
    ck.action_dim = data.action_dim;
    ck.state_dim = data.state_dim;
    return ck;
}

Checkpoint make_generator_checkpoint(const Generator& gen, const NoiseSchedule& sched,
                                     const Checkpoint& teacher, std::uint64_t seed,
                                     std::uint64_t step) {
    Checkpoint ck = teacher;
    ck.role = "generator";
    ck.sched = sched;
    ck.net_spec = gen.net.spec();
    ck.params = gen.net.net().params();
    ck.seed = seed;
    ck.step = step;
    ck.gen_mode = gen.mode;
    ck.t_init_raw = gen.t_init_raw;
    return ck;
}

} // namespace odp
