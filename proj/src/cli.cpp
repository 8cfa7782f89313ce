#include "odp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "odp/bench.hpp"
#include "odp/checkpoint.hpp"
#include "odp/diffusion.hpp"
#include "odp/errors.hpp"
#include "odp/workers.hpp"

namespace odp::cli {

BanditSpec bandit_gauss_spec(const RunConfig& cfg) {
    BanditSpec spec;
    spec.conditions = {Vec{-1.0}, Vec{1.0}};
    spec.mixtures = {
        {MixtureComponent{1.0, Vec{cfg.bandit_sep, -0.5 * cfg.bandit_sep}, cfg.bandit_sigma}},
        {MixtureComponent{1.0, Vec{-0.5 * cfg.bandit_sep, cfg.bandit_sep}, cfg.bandit_sigma}},
    };
    return spec;
}

BanditSpec bandit_bimodal_spec(const RunConfig& cfg) {
    BanditSpec spec;
    spec.conditions = {Vec{0.0}};
    spec.mixtures = {
        {MixtureComponent{0.5, Vec{cfg.bandit_sep, cfg.bandit_sep}, cfg.bandit_sigma},
         MixtureComponent{0.5, Vec{-cfg.bandit_sep, -cfg.bandit_sep}, cfg.bandit_sigma}},
    };
    return spec;
}

NoiseSchedule schedule_from_config(const RunConfig& cfg) {
    if (regime_from_name(cfg.regime) == Regime::DdpmDiscrete)
        return NoiseSchedule::ddpm_cosine(cfg.ddpm_steps, cfg.cosine_s);
    return NoiseSchedule::edm(cfg.sigma_min, cfg.sigma_max, cfg.rho, cfg.sigma_data);
}

SamplerSpec sampler_from_config(const RunConfig& cfg) {
    SamplerSpec sp;
    sp.kind = sampler_from_name(cfg.sampler);
    sp.n = cfg.sampler_steps;
    return sp;
}

namespace {

void check_sampler_regime(const SamplerSpec& sp, const NoiseSchedule& sched) {
    const bool needs_ddpm = sp.kind != SamplerKind::EdmHeun;
    if (needs_ddpm != sched.is_ddpm())
        throw ConfigError(std::string("sampler '") + sampler_name(sp.kind) +
                          "' does not run under the '" + regime_name(sched.regime) + "' regime");
}

Reach2DSpec reach_spec_common(const RunConfig& cfg, bool moving, double heading, double d0) {
    Reach2DSpec spec;
    spec.agent_start = {0.0, 0.0};
    spec.capture_radius = cfg.capture_radius;
    spec.dt = cfg.env_dt;
    spec.horizon = cfg.horizon;
    spec.v_max = cfg.v_max;
    const Vec dir{std::cos(heading), std::sin(heading)};
    const Vec target0{d0 * dir[0], d0 * dir[1]};
    if (moving) {
        // Long enough that the target never runs out of script within the
        // horizon; it flees straight along the agent-to-target bearing.
        const double flight = 8.0;
        spec.script.waypoints = {target0,
                                 Vec{target0[0] + flight * dir[0], target0[1] + flight * dir[1]}};
        spec.script.speed = cfg.target_speed;
    } else {
        spec.script.waypoints = {target0};
        spec.script.speed = 0.0;
    }
    return spec;
}

// Static episodes start farther out so the expert needs enough steps to fill
// an action-chunk window; moving episodes start closer so a pursuer with the
// configured speed advantage can finish well inside the horizon.
std::pair<double, double> reach_d0_range(bool moving) {
    return moving ? std::pair{0.5, 0.8} : std::pair{1.1, 1.6};
}

} // namespace

Reach2DSpec reach_spec_from_config(const RunConfig& cfg, bool moving, Rng& rng) {
    const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const auto [lo, hi] = reach_d0_range(moving);
    const double d0 = rng.uniform(lo, hi);
    return reach_spec_common(cfg, moving, heading, d0);
}

Reach2DSpec reach_spec_nominal(const RunConfig& cfg, bool moving) {
    const auto [lo, hi] = reach_d0_range(moving);
    return reach_spec_common(cfg, moving, 0.0, 0.5 * (lo + hi));
}

std::vector<Episode> gen_reach_demos(const RunConfig& cfg, bool moving, Rng& rng) {
    std::vector<Episode> demos;
    demos.reserve(cfg.demo_episodes);
    for (std::size_t e = 0; e < cfg.demo_episodes; ++e) {
        Reach2D env(reach_spec_from_config(cfg, moving, rng));
        ScriptedExpert expert(env.spec(), rng);
        Episode ep;
        ep.states.push_back(env.state());
        while (!env.done()) {
            Vec a = expert.action(env);
            env.step(a);
            ep.actions.push_back(std::move(a));
            ep.states.push_back(env.state());
        }
        demos.push_back(std::move(ep));
    }
    return demos;
}

TaskSetup build_task(const RunConfig& cfg, std::uint64_t dataset_seed) {
    cfg.validate();
    TaskSetup t;
    t.sched = schedule_from_config(cfg);
    const bool ddpm = t.sched.is_ddpm();
    t.pretrain_krule = ddpm ? KRule::uniform_int(1, t.sched.K)
                            : KRule::log_normal(cfg.edm_p_mean, cfg.edm_p_std);
    t.distill_krule = ddpm ? KRule::uniform_int(cfg.k_lo, cfg.k_hi)
                           : KRule::log_normal(cfg.edm_p_mean, cfg.edm_p_std);
    t.lambda = ddpm ? LambdaWeight{LambdaRule::Unit, cfg.sigma_data}
                    : LambdaWeight{LambdaRule::EdmDefault, cfg.sigma_data};
    t.t_init_raw = ddpm ? cfg.t_init : cfg.sigma_init;

    Rng data_rng = Rng(dataset_seed).derive(1);
    if (cfg.task == "bandit_gauss" || cfg.task == "bandit_bimodal") {
        t.is_bandit = true;
        t.bandit = cfg.task == "bandit_gauss" ? bandit_gauss_spec(cfg) : bandit_bimodal_spec(cfg);
        // Bandit chunking is a property of the mixture spec, not the config.
        auto pairs = gen_bandit_dataset(t.bandit, cfg.n_per_condition, data_rng);
        t.data = dataset_from_bandit(t.bandit, pairs, t.bandit.chunk_len(), 1);
    } else {
        t.moving = cfg.task == "reach_moving";
        auto demos = gen_reach_demos(cfg, t.moving, data_rng);
        t.data = build_dataset(demos, cfg.n_obs, cfg.t_chunk, Reach2D::action_dim(),
                               Reach2D::state_dim());
    }
    return t;
}

LatencyModel latency_from_config(const RunConfig& cfg) {
    if (cfg.latency == "zero") return LatencyModel{0.0, 0.0};
    if (cfg.latency == "fixed") return LatencyModel{cfg.latency_c, cfg.latency_o};
    // calibrated: smallest per-NFE cost separating the configured sampler's
    // NFE from a one-step policy on the nominal moving episode.
    const NoiseSchedule sched = schedule_from_config(cfg);
    const SamplerSpec sp = sampler_from_config(cfg);
    const auto nfe_slow = static_cast<std::size_t>(sp.expected_nfe(sched));
    const double c = calibrate_latency(reach_spec_nominal(cfg, true), nfe_slow, 1, cfg.latency_o);
    return LatencyModel{c, cfg.latency_o};
}

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonArgs {
    std::string config_path;
    long long seed = -1; // <0: keep the config's seed
    std::string out_dir = ".";
    std::size_t workers = 1;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config_path, "JSON run configuration");
    cmd->add_option("--seed", a.seed, "Override the config seed")->check(CLI::NonNegativeNumber);
    cmd->add_option("--out", a.out_dir, "Output directory, created if missing");
    cmd->add_option("--workers", a.workers, "Worker threads for rollouts")
        ->check(CLI::PositiveNumber);
}

RunConfig resolve_config(const CommonArgs& a) {
    RunConfig cfg = a.config_path.empty() ? RunConfig{} : load_config(a.config_path);
    if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
    cfg.validate();
    return cfg;
}

fs::path ensure_out(const CommonArgs& a) {
    fs::path dir(a.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw FileError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

EpsNet fresh_net(const RunConfig& cfg, const TaskSetup& task, Rng& rng) {
    EpsNetSpec spec;
    spec.x_dim = task.data.chunk_dim();
    spec.obs_dim = task.data.obs_dim();
    spec.emb_dim = cfg.emb_dim;
    spec.hidden = cfg.hidden;
    spec.hidden_act = Act::Relu;
    spec.regime = task.sched.regime;
    EpsNet net(spec);
    net.init(rng);
    return net;
}

// A checkpoint turned back into something that can act, with the owning
// objects kept alive together.
struct LoadedActor {
    Checkpoint ck;
    std::unique_ptr<DiffusionPolicy> policy;
    std::unique_ptr<Generator> gen;
    std::unique_ptr<Actor> actor;
    std::string label;
};

LoadedActor load_actor(const std::string& path, const RunConfig& cfg) {
    LoadedActor la;
    la.ck = load_checkpoint(path);
    if (la.ck.gen_mode.has_value()) {
        la.gen = std::make_unique<Generator>(generator_from_checkpoint(la.ck));
        la.actor = std::make_unique<GeneratorActor>(*la.gen, la.ck.norm, la.ck.t_chunk,
                                                    la.ck.action_dim);
        la.label = std::string("one-step-") + gen_mode_name(*la.ck.gen_mode);
    } else {
        SamplerSpec sp = sampler_from_config(cfg);
        check_sampler_regime(sp, la.ck.sched);
        la.policy = std::make_unique<DiffusionPolicy>(policy_from_checkpoint(la.ck));
        la.actor = std::make_unique<PolicyActor>(*la.policy, sp);
        la.label = std::string(sampler_name(sp.kind)) + "-" +
                   std::to_string(sp.expected_nfe(la.ck.sched));
    }
    return la;
}

Vec sample_obs(const TaskSetup& task, std::size_t i) {
    if (task.is_bandit) return task.bandit.conditions[i % task.bandit.conditions.size()];
    return task.data.pairs[i % task.data.pairs.size()].obs;
}

int cmd_pretrain(const CommonArgs& ca) {
    const RunConfig cfg = resolve_config(ca);
    const fs::path out = ensure_out(ca);
    const TaskSetup task = build_task(cfg, cfg.seed);

    Rng init_rng = Rng(cfg.seed).derive(2);
    EpsNet net = fresh_net(cfg, task, init_rng);

    double mse_before = 0.0;
    const std::vector<double> probe_k{5, 20, 50, 80, 95};
    BanditSpec norm_spec;
    if (task.is_bandit && task.sched.is_ddpm()) {
        norm_spec = normalize_bandit_spec(task.bandit, task.data.norm);
        mse_before = bandit_eps_mse(net, norm_spec, task.sched, probe_k);
    }

    PretrainConfig pcfg;
    pcfg.steps = cfg.pretrain_steps;
    pcfg.batch = cfg.pretrain_batch;
    pcfg.lr = cfg.pretrain_lr;
    pcfg.weight_decay = cfg.pretrain_weight_decay;
    pcfg.beta1 = cfg.pretrain_beta1;
    pcfg.beta2 = cfg.pretrain_beta2;
    pcfg.log_every = cfg.log_every;

    Rng train_rng = Rng(cfg.seed).derive(3);
    const auto curve =
        pretrain(net, task.data, task.sched, task.lambda, task.pretrain_krule, pcfg, train_rng);

    const Checkpoint ck =
        make_teacher_checkpoint(net, task.sched, task.data.norm, task.data, cfg.seed, pcfg.steps);
    const std::string ck_path = (out / "teacher.json").string();
    save_checkpoint(ck, ck_path);

    CurveWriter curves((out / "curves.csv").string());
    for (const auto& pt : curve) {
        CsvRow row;
        row.step = static_cast<long long>(pt.step);
        row.loss_dsm = pt.loss;
        curves.write(row);
    }

    std::printf("pretrain: task=%s regime=%s seed=%llu steps=%zu pairs=%zu\n", cfg.task.c_str(),
                cfg.regime.c_str(), static_cast<unsigned long long>(cfg.seed), pcfg.steps,
                task.data.pairs.size());
    if (!curve.empty()) std::printf("pretrain: final dsm loss %.6g\n", curve.back().loss);
    if (task.is_bandit && task.sched.is_ddpm()) {
        const double mse_after = bandit_eps_mse(net, norm_spec, task.sched, probe_k);
        std::printf("pretrain: analytic eps mse %.6g -> %.6g\n", mse_before, mse_after);
    }
    std::printf("pretrain: wrote %s\n", ck_path.c_str());
    return 0;
}

int cmd_distill(const CommonArgs& ca, const std::string& teacher_path,
                const std::string& mode_flag) {
    const RunConfig cfg = resolve_config(ca);
    const fs::path out = ensure_out(ca);

    const Checkpoint tck = load_checkpoint(teacher_path);
    if (tck.gen_mode.has_value())
        throw ConfigError("distill: " + teacher_path + " is already a one-step generator");
    const NoiseSchedule cfg_sched = schedule_from_config(cfg);
    if (tck.sched.regime != cfg_sched.regime)
        throw ConfigError(std::string("distill: teacher regime '") +
                          regime_name(tck.sched.regime) + "' does not match config regime '" +
                          regime_name(cfg_sched.regime) + "'");

    // The observation pool is the teacher's training distribution, rebuilt
    // from the seed recorded in its checkpoint.
    const TaskSetup task = build_task(cfg, tck.seed);
    EpsNet teacher = net_from_checkpoint(tck);
    if (teacher.x_dim() != task.data.chunk_dim() || teacher.obs_dim() != task.data.obs_dim())
        throw ConfigError("distill: teacher net layout does not match the configured task");

    DistillConfig dcfg;
    dcfg.mode = gen_mode_from_name(mode_flag.empty() ? cfg.mode : mode_flag);
    dcfg.lr_theta = cfg.generator_lr;
    dcfg.lr_psi = cfg.score_lr;
    dcfg.beta1 = cfg.beta1;
    dcfg.beta2 = cfg.beta2;
    dcfg.batch = cfg.distill_batch;
    dcfg.steps = cfg.distill_steps;
    dcfg.psi_per_theta = cfg.psi_per_theta;
    dcfg.t_init_raw = task.t_init_raw;
    dcfg.krule = task.distill_krule;
    dcfg.lambda = task.lambda;
    dcfg.log_every = cfg.log_every;
    if (dcfg.mode == GenMode::Deterministic)
        std::fprintf(stderr, "distill: deterministic mode, psi loss column left empty\n");

    DistillState st = DistillState::init(teacher, task.sched, dcfg);
    st.phi = &teacher;

    std::vector<Vec> obs_pool;
    obs_pool.reserve(task.data.pairs.size());
    for (const auto& p : task.data.pairs) obs_pool.push_back(p.obs);

    // Bandit tasks track distribution match against 100-step teacher samples
    // in raw action space.
    std::vector<Vec> reference;
    std::unique_ptr<DiffusionPolicy> teacher_policy;
    if (task.is_bandit && task.sched.is_ddpm()) {
        teacher_policy = std::make_unique<DiffusionPolicy>(policy_from_checkpoint(tck));
        Rng ref_rng = Rng(cfg.seed).derive(7);
        reference.reserve(1000);
        for (std::size_t i = 0; i < 1000; ++i)
            reference.push_back(
                teacher_policy->predict_chunk(sample_obs(task, i), SamplerSpec{}, ref_rng).chunk);
    }

    const auto gen_samples = [&](std::size_t step, std::size_t n) {
        Rng rng = Rng(cfg.seed).derive(8).derive(step);
        std::vector<Vec> xs;
        xs.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            Vec x = st.theta.sample_normalized(sample_obs(task, i), rng);
            clamp_soft(x);
            xs.push_back(task.data.norm.denormalize(x));
        }
        return xs;
    };

    std::map<std::size_t, TwoSampleReport> match;
    const auto on_log = [&](std::size_t step, DistillState&) {
        if (reference.empty()) return;
        match[step] = two_sample(gen_samples(step, 500), reference);
    };

    Rng train_rng = Rng(cfg.seed).derive(3);
    const auto rows = distill_run(st, obs_pool, train_rng, on_log);

    const Checkpoint gck =
        make_generator_checkpoint(st.theta, task.sched, tck, cfg.seed, dcfg.steps);
    const std::string ck_path = (out / "generator.json").string();
    save_checkpoint(gck, ck_path);

    CurveWriter curves((out / "curves.csv").string());
    for (const auto& r : rows) {
        CsvRow row;
        row.step = static_cast<long long>(r.step);
        if (dcfg.mode == GenMode::Stochastic) row.loss_psi = r.loss_psi;
        row.grad_norm_theta = r.grad_norm_theta;
        if (auto it = match.find(r.step); it != match.end()) {
            row.mmd = it->second.mmd;
            row.sw1 = it->second.sw1;
            row.energy = it->second.energy;
        }
        curves.write(row);
    }

    CurveWriter report((out / "report.csv").string());
    if (!match.empty()) {
        const auto& last = match.rbegin()->second;
        CsvRow base;
        base.mmd = last.mmd_base;
        base.sw1 = last.sw1_base;
        base.energy = last.energy_base;
        report.write(base);
        CsvRow fin;
        fin.step = static_cast<long long>(match.rbegin()->first);
        fin.mmd = last.mmd;
        fin.sw1 = last.sw1;
        fin.energy = last.energy;
        report.write(fin);
        std::printf("distill: final mmd %.6g (baseline %.6g), sw1 %.6g (baseline %.6g)\n",
                    last.mmd, last.mmd_base, last.sw1, last.sw1_base);
    } else if (!rows.empty()) {
        CsvRow fin;
        fin.step = static_cast<long long>(rows.back().step);
        fin.grad_norm_theta = rows.back().grad_norm_theta;
        report.write(fin);
    }

    std::printf("distill: mode=%s steps=%zu seed=%llu\n", gen_mode_name(dcfg.mode), dcfg.steps,
                static_cast<unsigned long long>(cfg.seed));
    if (!rows.empty())
        std::printf("distill: final theta grad norm %.6g\n", rows.back().grad_norm_theta);
    std::printf("distill: wrote %s\n", ck_path.c_str());
    return 0;
}

int cmd_sample(const CommonArgs& ca, const std::string& ckpt_path, std::size_t n_flag) {
    const RunConfig cfg = resolve_config(ca);
    const fs::path out = ensure_out(ca);
    const LoadedActor la = load_actor(ckpt_path, cfg);
    const TaskSetup task = build_task(cfg, la.ck.seed);

    const std::size_t n = n_flag > 0 ? n_flag : cfg.n_samples;
    Rng rng = Rng(cfg.seed).derive(4);

    const std::string path = (out / "samples.jsonl").string();
    std::ofstream os(path);
    if (!os) throw FileError("cannot open " + path + " for writing");

    std::size_t total_nfe = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const PredictResult res = la.actor->predict(sample_obs(task, i), rng);
        total_nfe += res.nfe;
        json chunk = json::array();
        for (std::size_t t = 0; t < la.actor->t_chunk(); ++t) {
            json row = json::array();
            for (std::size_t d = 0; d < la.actor->action_dim(); ++d)
                row.push_back(res.chunk[t * la.actor->action_dim() + d]);
            chunk.push_back(std::move(row));
        }
        os << chunk.dump() << '\n';
    }
    os.flush();
    if (!os) throw FileError("failed writing " + path);

    std::printf("sample: wrote %zu chunks (%s, nfe/sample %zu) to %s\n", n, la.label.c_str(),
                n > 0 ? total_nfe / n : 0, path.c_str());
    return 0;
}

int cmd_eval(const CommonArgs& ca, const std::vector<std::string>& ckpt_paths) {
    const RunConfig cfg = resolve_config(ca);
    const fs::path out = ensure_out(ca);
    if (cfg.task != "reach_static" && cfg.task != "reach_moving")
        throw ConfigError("eval: closed-loop evaluation needs a reach task, got '" + cfg.task +
                          "'");
    const bool moving = cfg.task == "reach_moving";

    std::vector<LoadedActor> actors;
    actors.reserve(ckpt_paths.size());
    for (const auto& p : ckpt_paths) actors.push_back(load_actor(p, cfg));

    const LatencyModel latency = latency_from_config(cfg);
    const EvalProtocol proto{actors.size(), cfg.eval_inits};

    const auto actor_for_seed = [&](std::size_t seed_idx) { return actors[seed_idx].actor.get(); };
    const auto env_factory = [&](std::size_t, std::size_t init_idx) {
        Rng r = Rng(cfg.seed).derive(9).derive(init_idx + 1);
        return Reach2D(reach_spec_from_config(cfg, moving, r));
    };

    const WorkerPool pool(ca.workers);
    const EvalOutcome outcome = eval_success(actor_for_seed, env_factory, proto, latency,
                                             cfg.t_act, cfg.n_obs, Rng(cfg.seed).derive(5).seed(),
                                             pool);

    CurveWriter report((out / "report.csv").string());
    for (std::size_t i = 0; i < outcome.episodes.size(); ++i) {
        const auto& ep = outcome.episodes[i];
        CsvRow row;
        row.step = static_cast<long long>(i);
        row.nfe = static_cast<double>(ep.total_nfe);
        row.success_mean = ep.success ? 1.0 : 0.0;
        report.write(row);
    }
    CsvRow summary;
    summary.success_mean = outcome.mean;
    summary.success_std = outcome.stddev;
    report.write(summary);

    std::printf("eval: task=%s latency=%s (c=%.6g, o=%.6g) seeds=%zu inits=%zu\n",
                cfg.task.c_str(), cfg.latency.c_str(), latency.c, latency.o, proto.n_seeds,
                proto.n_inits);
    for (std::size_t s = 0; s < outcome.seed_means.size(); ++s)
        std::printf("eval: seed %zu (%s): success %.3f\n", s, actors[s].label.c_str(),
                    outcome.seed_means[s]);
    std::printf("eval: success %.3f +- %.3f\n", outcome.mean, outcome.stddev);
    return 0;
}

int cmd_bench(const CommonArgs& ca, const std::vector<std::string>& ckpt_paths) {
    const RunConfig cfg = resolve_config(ca);
    const fs::path out = ensure_out(ca);

    // Teachers are benched under two samplers; generators as themselves.
    std::vector<LoadedActor> storage;
    std::vector<std::pair<std::string, const Actor*>> actors;
    TaskSetup task;
    bool have_task = false;
    for (const auto& p : ckpt_paths) {
        Checkpoint ck = load_checkpoint(p);
        if (!have_task) {
            task = build_task(cfg, ck.seed);
            have_task = true;
        }
        if (ck.gen_mode.has_value()) {
            LoadedActor la = load_actor(p, cfg);
            actors.emplace_back(la.label, la.actor.get());
            storage.push_back(std::move(la));
            continue;
        }
        std::vector<SamplerSpec> variants;
        if (ck.sched.is_ddpm()) {
            variants.push_back(SamplerSpec{SamplerKind::Ddpm, 0, false});
            variants.push_back(SamplerSpec{SamplerKind::Ddim, cfg.sampler_steps, false});
        } else {
            variants.push_back(SamplerSpec{SamplerKind::EdmHeun, cfg.sampler_steps, false});
            variants.push_back(SamplerSpec{SamplerKind::EdmHeun, 18, false});
        }
        for (const auto& sp : variants) {
            LoadedActor la;
            la.ck = ck;
            la.policy = std::make_unique<DiffusionPolicy>(policy_from_checkpoint(ck));
            la.actor = std::make_unique<PolicyActor>(*la.policy, sp);
            la.label = std::string(sampler_name(sp.kind)) + "-" +
                       std::to_string(sp.expected_nfe(ck.sched));
            actors.emplace_back(la.label, la.actor.get());
            storage.push_back(std::move(la));
        }
    }
    if (actors.empty()) throw ConfigError("bench: no checkpoints given");

    Rng rng = Rng(cfg.seed).derive(6);
    const Vec obs = sample_obs(task, 0);
    const auto rows = latency_bench(actors, obs, cfg.bench_reps, rng);

    CurveWriter report((out / "report.csv").string());
    double best = std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CsvRow row;
        row.step = static_cast<long long>(i);
        row.wall_ms = rows[i].wall_ms_mean;
        row.nfe = static_cast<double>(rows[i].nfe);
        report.write(row);
        best = std::min(best, rows[i].wall_ms_mean);
        worst = std::max(worst, rows[i].wall_ms_mean);
        std::printf("bench: %-18s nfe=%4zu wall %.4f ms (min %.4f)\n", rows[i].name.c_str(),
                    rows[i].nfe, rows[i].wall_ms_mean, rows[i].wall_ms_min);
    }
    if (rows.size() > 1 && best > 0.0)
        std::printf("bench: slowest/fastest wall-clock ratio %.1fx\n", worst / best);
    return 0;
}

int cmd_inspect(const std::string& ckpt_path) {
    const Checkpoint ck = load_checkpoint(ckpt_path);
    std::printf("checkpoint: %s\n", ckpt_path.c_str());
    std::printf("  role        %s\n", ck.role.c_str());
    std::printf("  regime      %s\n", regime_name(ck.sched.regime));
    if (ck.sched.is_ddpm())
        std::printf("  schedule    squared-cosine, K=%d, s=%g\n", ck.sched.K, ck.sched.cosine_s);
    else
        std::printf("  schedule    edm, sigma [%g, %g], rho=%g, sigma_data=%g\n",
                    ck.sched.sigma_min, ck.sched.sigma_max, ck.sched.rho, ck.sched.sigma_data);
    std::printf("  net         x=%zu obs=%zu emb=%zu hidden=[", ck.net_spec.x_dim,
                ck.net_spec.obs_dim, ck.net_spec.emb_dim);
    for (std::size_t i = 0; i < ck.net_spec.hidden.size(); ++i)
        std::printf("%s%zu", i ? "," : "", ck.net_spec.hidden[i]);
    std::printf("] params=%zu\n", ck.params.size());
    std::printf("  chunking    t_chunk=%zu n_obs=%zu action_dim=%zu state_dim=%zu\n", ck.t_chunk,
                ck.n_obs, ck.action_dim, ck.state_dim);
    std::printf("  provenance  seed=%llu step=%llu\n", static_cast<unsigned long long>(ck.seed),
                static_cast<unsigned long long>(ck.step));
    if (ck.gen_mode.has_value())
        std::printf("  generator   mode=%s t_init=%g\n", gen_mode_name(*ck.gen_mode),
                    ck.t_init_raw.value_or(0.0));
    double l2 = 0.0;
    for (double v : ck.params) l2 += v * v;
    std::printf("  param l2    %.6g\n", std::sqrt(l2));
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Train diffusion policies and distill them into one-step generators"};
    app.require_subcommand(1);

    CommonArgs pretrain_args;
    auto* pre = app.add_subcommand("pretrain", "Train a diffusion teacher with DSM");
    add_common(pre, pretrain_args);

    CommonArgs distill_args;
    std::string teacher_path;
    std::string mode_flag;
    auto* dis = app.add_subcommand("distill", "Distill a teacher into a one-step generator");
    add_common(dis, distill_args);
    dis->add_option("--teacher", teacher_path, "Teacher checkpoint")->required();
    dis->add_option("--mode", mode_flag, "Generator mode: s (stochastic) or d (deterministic)");

    CommonArgs sample_args;
    std::string sample_ckpt;
    std::size_t sample_n = 0;
    auto* smp = app.add_subcommand("sample", "Emit action chunks as JSON lines");
    add_common(smp, sample_args);
    smp->add_option("--ckpt", sample_ckpt, "Checkpoint to sample from")->required();
    smp->add_option("--n", sample_n, "Number of chunks (default: config n_samples)");

    CommonArgs eval_args;
    std::vector<std::string> eval_ckpts;
    auto* evl = app.add_subcommand("eval", "Closed-loop success under a latency scenario");
    add_common(evl, eval_args);
    evl->add_option("--ckpt", eval_ckpts, "Checkpoint(s), one per training seed")->required();

    CommonArgs bench_args;
    std::vector<std::string> bench_ckpts;
    auto* bch = app.add_subcommand("bench", "Wall-clock latency per prediction");
    add_common(bch, bench_args);
    bch->add_option("--ckpt", bench_ckpts, "Checkpoint(s) to bench")->required();

    std::string inspect_ckpt;
    auto* ins = app.add_subcommand("inspect", "Print checkpoint metadata");
    ins->add_option("--ckpt", inspect_ckpt, "Checkpoint to inspect")->required();

    std::vector<const char*> argv;
    argv.push_back("odp");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (app.got_subcommand(pre)) return cmd_pretrain(pretrain_args);
        if (app.got_subcommand(dis)) return cmd_distill(distill_args, teacher_path, mode_flag);
        if (app.got_subcommand(smp)) return cmd_sample(sample_args, sample_ckpt, sample_n);
        if (app.got_subcommand(evl)) return cmd_eval(eval_args, eval_ckpts);
        if (app.got_subcommand(bch)) return cmd_bench(bench_args, bench_ckpts);
        if (app.got_subcommand(ins)) return cmd_inspect(inspect_ckpt);
        throw ConfigError("no subcommand given");
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

} // namespace odp::cli
