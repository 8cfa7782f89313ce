// End-to-end acceptance checks. Each check prints exactly one PASS/FAIL line
// with its wall time and enforces the runtime budget it is allowed. Pipeline
// checks build their artifacts through the same command-line entry points a
// user would run, with the configs shipped in configs/.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "odp/bench.hpp"
#include "odp/checkpoint.hpp"
#include "odp/cli.hpp"
#include "odp/diffusion.hpp"
#include "odp/distill.hpp"
#include "odp/envs.hpp"
#include "odp/policy.hpp"

#ifndef ODP_CONFIG_DIR
#error "ODP_CONFIG_DIR must point at the shipped configs"
#endif
#ifndef ODP_BIN
#error "ODP_BIN must point at the odp executable"
#endif

using namespace odp;
namespace fs = std::filesystem;

namespace {

fs::path art_root;

fs::path art(const std::string& name) {
    const fs::path dir = art_root / name;
    fs::create_directories(dir);
    return dir;
}

std::string cfg_path(const std::string& name) {
    return std::string(ODP_CONFIG_DIR) + "/" + name;
}

// In-process invocation of the command-line front end.
void cli_ok(const std::vector<std::string>& args) {
    const int rc = cli::run(args);
    if (rc != 0) {
        std::string joined;
        for (const auto& a : args) joined += a + " ";
        throw std::runtime_error("command failed (exit " + std::to_string(rc) + "): " + joined);
    }
}

// Fresh-process invocation of the installed binary, output suppressed.
void bin_ok(const std::string& args) {
    const std::string cmd = std::string("\"") + ODP_BIN + "\" " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) throw std::runtime_error("binary run failed: " + args);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

double summary_success(const fs::path& report_csv) {
    const auto rows = read_curve_csv(report_csv.string());
    if (rows.empty() || !rows.back().success_mean.has_value())
        throw std::runtime_error("no summary row in " + report_csv.string());
    return *rows.back().success_mean;
}

struct CheckResult {
    int id = 0;
    bool pass = false;
    double seconds = 0.0;
};

std::vector<CheckResult> results;

// Runs one check, enforces its budget, prints the verdict line.
void run_check(int id, const std::string& name, double budget_s,
               const std::function<std::string()>& body) {
    std::printf("----- check %d: %s -----\n", id, name.c_str());
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        detail = body();
        pass = true;
    } catch (const std::exception& e) {
        detail = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (pass && secs > budget_s) {
        pass = false;
        detail += " [exceeded " + fmt("%.0f", budget_s) + "s budget]";
    }
    results.push_back({id, pass, secs});
    std::printf("[%2d/10] %s  %6.1fs (budget %4.0fs)  %s — %s\n", id, pass ? "PASS" : "FAIL", secs,
                budget_s, name.c_str(), detail.c_str());
    std::fflush(stdout);
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::runtime_error(msg);
}

// ---------------------------------------------------------------------------

EpsNet tiny_net(std::uint64_t seed) {
    EpsNetSpec spec;
    spec.x_dim = 2;
    spec.obs_dim = 1;
    spec.emb_dim = 8;
    spec.hidden = {10};
    spec.hidden_act = Act::Tanh;
    spec.regime = Regime::DdpmDiscrete;
    EpsNet net(spec);
    Rng rng(seed);
    net.init(rng);
    return net;
}

// Worst relative error between the per-sample generator gradient and central
// finite differences of the frozen-upstream surrogate f = u0 . A_theta(z).
double fd_worst(GenMode mode, std::uint64_t seed) {
    const NoiseSchedule sched = NoiseSchedule::ddpm_cosine(100, 0.008);
    const EpsNet teacher = tiny_net(seed);
    const EpsNet psi = tiny_net(seed + 50);
    Generator theta{tiny_net(seed + 100), mode, 65.0};

    Rng rng(seed + 7);
    const Vec obs{1.0};
    Vec z(2), eps(2);
    for (auto& v : z) v = rng.normal();
    for (auto& v : eps) v = rng.normal();
    const double k = 40.0;

    const std::size_t n = theta.net.net().n_params();
    Vec grad(n, 0.0);
    const Denoiser* psi_ptr = mode == GenMode::Stochastic ? &psi : nullptr;
    const Vec u0 = theta_grad_single(theta, teacher, psi_ptr, mode, sched, obs, z, k, eps, grad);

    const auto f = [&] { return dot(u0, theta.net.eps(z, theta.t_init_raw, obs)); };
    double worst = 0.0;
    const double h = 1e-5;
    Vec& params = theta.net.net().params();
    for (std::size_t i = 0; i < n; ++i) {
        const double keep = params[i];
        params[i] = keep + h;
        const double fp = f();
        params[i] = keep - h;
        const double fm = f();
        params[i] = keep;
        const double fd = (fp - fm) / (2.0 * h);
        const double rel = std::abs(grad[i] - fd) / std::max({1.0, std::abs(grad[i]), std::abs(fd)});
        worst = std::max(worst, rel);
    }
    return worst;
}

std::string check_gradients() {
    double worst = 0.0;
    for (const GenMode mode : {GenMode::Stochastic, GenMode::Deterministic})
        for (const std::uint64_t seed : {11ull, 12ull})
            worst = std::max(worst, fd_worst(mode, seed));
    require(worst <= 1e-6, "worst relative error " + fmt("%.3g", worst) + " > 1e-6");
    return "both generator modes, worst relative error " + fmt("%.3g", worst);
}

std::string check_teacher_vs_analytic() {
    const fs::path dir = art("teacher_gauss");
    cli_ok({"pretrain", "--config", cfg_path("bandit_gauss.json"), "--out", dir.string()});

    const RunConfig cfg = load_config(cfg_path("bandit_gauss.json"));
    const Checkpoint ck = load_checkpoint((dir / "teacher.json").string());
    const EpsNet net = net_from_checkpoint(ck);
    const cli::TaskSetup task = cli::build_task(cfg, ck.seed);
    const BanditSpec norm_spec = normalize_bandit_spec(task.bandit, task.data.norm);
    const double mse = bandit_eps_mse(net, norm_spec, task.sched, {5, 20, 50, 80, 95});
    require(mse <= 0.05, "eps mse " + fmt("%.4g", mse) + " > 0.05");
    return "eps mse vs closed form " + fmt("%.4g", mse) + " <= 0.05";
}

std::string check_zero_gradient() {
    const NoiseSchedule sched = NoiseSchedule::ddpm_cosine(100, 0.008);
    const EpsNet net = tiny_net(31);
    Generator theta{tiny_net(32), GenMode::Stochastic, 65.0};
    const KRule krule = KRule::uniform_int(2, 95);
    const std::vector<Vec> obs_batch{Vec{-1.0}, Vec{1.0}, Vec{-1.0}, Vec{1.0}};

    Rng rng(33);
    Vec grad(theta.net.net().n_params(), 0.0);
    // the same network serves as both the teacher score and the generator
    // score, so the score difference cancels identically
    const double gnorm = theta_grad(theta, net, &net, GenMode::Stochastic, sched, krule, obs_batch,
                                    rng, grad);
    require(gnorm == 0.0, "gradient norm " + fmt("%.3g", gnorm) + " != 0");
    for (const double g : grad) require(g == 0.0, "nonzero gradient component");
    return "aliased score nets give exactly zero gradient over " +
           std::to_string(obs_batch.size()) + " samples";
}

std::string check_bimodal_distill() {
    const fs::path dir = art("bimodal");
    cli_ok({"pretrain", "--config", cfg_path("bandit_bimodal.json"), "--out", dir.string()});
    cli_ok({"distill", "--config", cfg_path("bandit_bimodal.json"), "--teacher",
            (dir / "teacher.json").string(), "--out", dir.string()});

    // distribution match against the 100-step teacher, from the run report
    const auto report = read_curve_csv((dir / "report.csv").string());
    require(report.size() == 2 && report[0].mmd.has_value() && report[1].mmd.has_value(),
            "distill report lacks the baseline/final rows");
    const double base = *report[0].mmd;
    const double final_mmd = *report[1].mmd;
    require(final_mmd <= 2.0 * base, "final mmd " + fmt("%.4g", final_mmd) + " > 2x baseline " +
                                         fmt("%.4g", base));

    // both modes keep at least 20% of 500 one-step samples
    cli_ok({"sample", "--config", cfg_path("bandit_bimodal.json"), "--ckpt",
            (dir / "generator.json").string(), "--out", dir.string(), "--n", "500"});
    std::ifstream in(dir / "samples.jsonl");
    std::size_t plus = 0, total = 0;
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        const double a = j.at(0).at(0).get<double>();
        const double b = j.at(1).at(0).get<double>();
        if (a + b > 0.0) ++plus; // nearest mixture mean is the (+,+) mode
        ++total;
    }
    require(total == 500, "expected 500 samples, got " + std::to_string(total));
    const std::size_t minus = total - plus;
    require(plus >= 100 && minus >= 100,
            "mode coverage " + std::to_string(plus) + "/" + std::to_string(minus) + " of 500");

    // a 1-step strided deterministic sampler collapses; the distilled
    // generator above does not
    const RunConfig cfg = load_config(cfg_path("bandit_bimodal.json"));
    const Checkpoint tck = load_checkpoint((dir / "teacher.json").string());
    const DiffusionPolicy teacher = policy_from_checkpoint(tck);
    const Vec cond{0.0};
    Rng ref_rng(1001), one_rng(1002);
    std::vector<Vec> reference, ddim1;
    for (std::size_t i = 0; i < 1000; ++i)
        reference.push_back(teacher.predict_chunk(cond, SamplerSpec{}, ref_rng).chunk);
    for (std::size_t i = 0; i < 500; ++i)
        ddim1.push_back(
            teacher.predict_chunk(cond, SamplerSpec{SamplerKind::Ddim, 1, false}, one_rng).chunk);
    const TwoSampleReport collapse = two_sample(ddim1, reference);
    require(collapse.mmd >= 5.0 * collapse.mmd_base,
            "1-step strided sampler mmd " + fmt("%.4g", collapse.mmd) + " < 5x baseline " +
                fmt("%.4g", collapse.mmd_base));

    return "mmd " + fmt("%.4g", final_mmd) + " <= 2x" + fmt("%.4g", base) + ", modes " +
           std::to_string(plus) + "/" + std::to_string(minus) + ", 1-step strided mmd " +
           fmt("%.4g", collapse.mmd) + " >= 5x" + fmt("%.4g", collapse.mmd_base);
}

std::string check_deterministic_mode_seeks_mean() {
    const fs::path tdir = art("teacher_gauss");
    require(fs::exists(tdir / "teacher.json"), "missing teacher artifact from check 2");
    const fs::path dir = art("gauss_det");
    cli_ok({"distill", "--config", cfg_path("bandit_gauss.json"), "--teacher",
            (tdir / "teacher.json").string(), "--mode", "d", "--out", dir.string()});

    const RunConfig cfg = load_config(cfg_path("bandit_gauss.json"));
    const Checkpoint gck = load_checkpoint((dir / "generator.json").string());
    const Generator gen = generator_from_checkpoint(gck);
    const BanditSpec spec = cli::bandit_gauss_spec(cfg);

    double worst = 0.0;
    for (std::size_t c = 0; c < spec.conditions.size(); ++c) {
        Rng ra(1), rb(2);
        const Vec out = gck.norm.denormalize(gen.sample_normalized(spec.conditions[c], ra));
        const Vec out2 = gck.norm.denormalize(gen.sample_normalized(spec.conditions[c], rb));
        require(out == out2, "deterministic generator output depends on the rng");
        const Vec& mean = spec.mixtures[c][0].mean;
        double d2 = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) d2 += (out[i] - mean[i]) * (out[i] - mean[i]);
        worst = std::max(worst, std::sqrt(d2));
    }
    require(worst <= 0.05, "distance to conditional mean " + fmt("%.4g", worst) + " > 0.05");
    return "output within " + fmt("%.4g", worst) + " of each conditional mean";
}

std::string check_distill_budget() {
    const fs::path dir = art("bimodal");
    require(fs::exists(dir / "report.csv"), "missing artifacts from check 4");
    const auto report = read_curve_csv((dir / "report.csv").string());
    require(report.size() == 2 && report[0].mmd.has_value(), "report lacks a baseline row");
    const double threshold = 2.0 * *report[0].mmd;

    const RunConfig cfg = load_config(cfg_path("bandit_bimodal.json"));
    const auto curve = read_curve_csv((dir / "curves.csv").string());
    long long crossing = -1;
    for (const auto& row : curve)
        if (row.mmd.has_value() && *row.mmd <= threshold) {
            crossing = row.step.value_or(-1);
            break;
        }
    require(crossing >= 0, "match threshold never reached during distillation");
    const auto budget = static_cast<long long>(cfg.pretrain_steps / 10);
    require(crossing <= budget, "threshold first met at step " + std::to_string(crossing) +
                                    " > 10% of pretraining (" + std::to_string(budget) + ")");
    return "match threshold met at step " + std::to_string(crossing) + " <= " +
           std::to_string(budget) + " (10% of " + std::to_string(cfg.pretrain_steps) +
           " pretraining steps)";
}

std::string check_nfe_counts() {
    const NoiseSchedule ddpm = NoiseSchedule::ddpm_cosine(100, 0.008);
    const NoiseSchedule edm = NoiseSchedule::edm(0.002, 80.0, 7.0, 0.5);
    const Vec obs{1.0};

    const EpsNet net = tiny_net(71);
    const auto count_with = [&](const NoiseSchedule& s, SamplerSpec sp) {
        CountingDenoiser cd(net);
        Rng rng(5);
        const SampleResult r = sample(cd, obs, sp, s, rng);
        require(r.nfe == cd.count(), "reported nfe disagrees with the instrumented count");
        require(static_cast<int>(r.nfe) == sp.expected_nfe(s), "nfe disagrees with expected_nfe");
        return r.nfe;
    };

    const std::size_t n_ddpm = count_with(ddpm, SamplerSpec{SamplerKind::Ddpm, 0, false});
    const std::size_t n_ddim = count_with(ddpm, SamplerSpec{SamplerKind::Ddim, 10, false});
    require(n_ddpm == 100, "ancestral chain nfe " + std::to_string(n_ddpm) + " != 100");
    require(n_ddim == 10, "10-step strided nfe " + std::to_string(n_ddim) + " != 10");

    EpsNetSpec espec = net.spec();
    espec.regime = Regime::EdmContinuous;
    EpsNet enet(espec);
    Rng erng(72);
    enet.init(erng);
    const auto count_edm = [&](int n) {
        CountingDenoiser cd(enet);
        Rng rng(6);
        return sample(cd, obs, SamplerSpec{SamplerKind::EdmHeun, n, false}, edm, rng).nfe;
    };
    const std::size_t h10 = count_edm(10);
    const std::size_t h18 = count_edm(18);
    require(h10 == 19, "heun-10 nfe " + std::to_string(h10) + " != 19");
    require(h18 == 35, "heun-18 nfe " + std::to_string(h18) + " != 35");

    Generator gen{tiny_net(73), GenMode::Stochastic, 65.0};
    CountingDenoiser cg(gen.net);
    Rng grng(7);
    gen.sample_via(cg, obs, grng);
    require(cg.count() == 1, "generator nfe " + std::to_string(cg.count()) + " != 1");

    return "instrumented nfe 100/10/19/35/1 as expected";
}

std::string check_speedup() {
    const fs::path tdir = art("teacher_gauss");
    const fs::path gdir = art("gauss_det");
    require(fs::exists(tdir / "teacher.json") && fs::exists(gdir / "generator.json"),
            "missing artifacts from checks 2/5");

    const Checkpoint tck = load_checkpoint((tdir / "teacher.json").string());
    const Checkpoint gck = load_checkpoint((gdir / "generator.json").string());
    const DiffusionPolicy policy = policy_from_checkpoint(tck);
    const PolicyActor slow(policy, SamplerSpec{SamplerKind::Ddpm, 0, false});
    const Generator gen = generator_from_checkpoint(gck);
    const GeneratorActor fast(gen, gck.norm, gck.t_chunk, gck.action_dim);

    Rng rng(81);
    const auto rows =
        latency_bench({{"full-chain", &slow}, {"one-step", &fast}}, Vec{-1.0}, 50, rng);
    require(rows[0].nfe == 100 && rows[1].nfe == 1, "unexpected nfe in the latency rows");
    const double ratio = rows[0].wall_ms_mean / rows[1].wall_ms_mean;
    require(ratio >= 30.0, "speedup " + fmt("%.1f", ratio) + "x < 30x at equal net size");
    return fmt("%.3f", rows[0].wall_ms_mean) + " ms vs " + fmt("%.4f", rows[1].wall_ms_mean) +
           " ms per prediction: " + fmt("%.1f", ratio) + "x >= 30x";
}

std::string check_closed_loop() {
    // moving target, calibrated per-evaluation latency: three training seeds
    const std::string mcfg = cfg_path("reach_moving.json");
    std::vector<std::string> gen_ckpts, teach_ckpts;
    for (int s = 1; s <= 3; ++s) {
        const fs::path dir = art("reach_m" + std::to_string(s));
        cli_ok({"pretrain", "--config", mcfg, "--seed", std::to_string(s), "--out", dir.string()});
        cli_ok({"distill", "--config", mcfg, "--seed", std::to_string(s), "--teacher",
                (dir / "teacher.json").string(), "--out", dir.string()});
        teach_ckpts.push_back((dir / "teacher.json").string());
        gen_ckpts.push_back((dir / "generator.json").string());
    }
    const fs::path eg = art("reach_eval_gen");
    cli_ok({"eval", "--config", mcfg, "--ckpt", gen_ckpts[0], "--ckpt", gen_ckpts[1], "--ckpt",
            gen_ckpts[2], "--out", eg.string()});
    const double gen_mean = summary_success(eg / "report.csv");

    const fs::path et = art("reach_eval_teacher");
    cli_ok({"eval", "--config", mcfg, "--ckpt", teach_ckpts[0], "--ckpt", teach_ckpts[1],
            "--ckpt", teach_ckpts[2], "--out", et.string()});
    const double teach_mean = summary_success(et / "report.csv");

    require(gen_mean >= 0.9, "one-step success " + fmt("%.3f", gen_mean) + " < 0.9 under latency");
    require(teach_mean <= 0.5,
            "full-chain success " + fmt("%.3f", teach_mean) + " > 0.5 under latency");

    // static target, zero latency: the two should be on par
    const std::string scfg = cfg_path("reach_static.json");
    const fs::path sdir = art("reach_static");
    cli_ok({"pretrain", "--config", scfg, "--out", sdir.string()});
    cli_ok({"distill", "--config", scfg, "--teacher", (sdir / "teacher.json").string(), "--out",
            sdir.string()});
    const fs::path est = art("reach_static_eval_t");
    const fs::path esg = art("reach_static_eval_g");
    cli_ok({"eval", "--config", scfg, "--ckpt", (sdir / "teacher.json").string(), "--out",
            est.string()});
    cli_ok({"eval", "--config", scfg, "--ckpt", (sdir / "generator.json").string(), "--out",
            esg.string()});
    const double st = summary_success(est / "report.csv");
    const double sg = summary_success(esg / "report.csv");
    require(std::abs(st - sg) <= 0.1, "static parity gap " + fmt("%.3f", std::abs(st - sg)) +
                                          " > 0.1 (teacher " + fmt("%.3f", st) + ", one-step " +
                                          fmt("%.3f", sg) + ")");

    return "moving: one-step " + fmt("%.3f", gen_mean) + " >= 0.9, full-chain " +
           fmt("%.3f", teach_mean) + " <= 0.5; static parity gap " +
           fmt("%.3f", std::abs(st - sg)) + " <= 0.1";
}

std::string check_reproducibility() {
    const fs::path dir = art("repro");
    const fs::path cfg = dir / "cfg.json";
    {
        std::ofstream out(cfg);
        out << R"({"task":"bandit_gauss","seed":5,"hidden":[32,32],"n_per_condition":300,)"
            << R"("pretrain_steps":300,"pretrain_batch":64,"pretrain_lr":0.001,)"
            << R"("distill_steps":60,"distill_batch":64,"generator_lr":0.0003,)"
            << R"("score_lr":0.001,"log_every":20,"n_samples":20,"bench_reps":3})";
    }
    const fs::path r1 = dir / "run1";
    const fs::path r2 = dir / "run2";

    // fresh process per run: reruns with identical config and seed must be
    // byte-identical
    for (const fs::path& r : {r1, r2}) {
        bin_ok("pretrain --config " + cfg.string() + " --out " + (r / "pre").string());
        bin_ok("distill --config " + cfg.string() + " --teacher " +
               (r1 / "pre" / "teacher.json").string() + " --out " + (r / "dis").string());
        bin_ok("sample --config " + cfg.string() + " --ckpt " +
               (r1 / "dis" / "generator.json").string() + " --n 20 --out " + (r / "smp").string());
    }
    std::size_t files = 0;
    for (const std::string& rel : {"pre/teacher.json", "pre/curves.csv", "dis/generator.json",
                                   "dis/curves.csv", "dis/report.csv", "smp/samples.jsonl"}) {
        require(slurp(r1 / rel) == slurp(r2 / rel), rel + " differs between identical reruns");
        ++files;
    }

    // eval on a small closed-loop config, twice
    const fs::path ecfg = dir / "reach.json";
    {
        std::ofstream out(ecfg);
        out << R"({"task":"reach_static","seed":2,"hidden":[16],"emb_dim":8,"t_chunk":4,)"
            << R"("t_act":2,"n_obs":2,"demo_episodes":4,"horizon":30,"pretrain_steps":5,)"
            << R"("pretrain_batch":8,"pretrain_lr":0.001,"eval_inits":3,"log_every":5})";
    }
    bin_ok("pretrain --config " + ecfg.string() + " --out " + (dir / "reach").string());
    for (const char* sub : {"ev1", "ev2"})
        bin_ok("eval --config " + ecfg.string() + " --ckpt " +
               (dir / "reach" / "teacher.json").string() + " --workers 2 --out " +
               (dir / sub).string());
    require(slurp(dir / "ev1" / "report.csv") == slurp(dir / "ev2" / "report.csv"),
            "eval report differs between identical reruns");
    ++files;

    // bench rows: everything but the wall-clock columns is reproducible, so
    // compare the deterministic nfe column only
    for (const char* sub : {"b1", "b2"})
        bin_ok("bench --config " + cfg.string() + " --ckpt " +
               (r1 / "pre" / "teacher.json").string() + " --ckpt " +
               (r1 / "dis" / "generator.json").string() + " --out " + (dir / sub).string());
    const auto b1 = read_curve_csv((dir / "b1" / "report.csv").string());
    const auto b2 = read_curve_csv((dir / "b2" / "report.csv").string());
    require(b1.size() == b2.size() && b1.size() == 3, "bench row count not reproducible");
    for (std::size_t i = 0; i < b1.size(); ++i)
        require(b1[i].nfe == b2[i].nfe, "bench nfe column not reproducible");

    return std::to_string(files) +
           " artifacts byte-identical across fresh-process reruns; bench compared on its "
           "deterministic columns (timings are wall-clock)";
}

} // namespace

int main() {
    art_root = fs::temp_directory_path() / "odp_acceptance";
    fs::remove_all(art_root);
    fs::create_directories(art_root);
    std::printf("acceptance artifacts: %s\n", art_root.string().c_str());

    run_check(1, "one-step generator gradients match finite differences", 10, check_gradients);
    run_check(2, "pretrained teacher matches the analytic noise predictor", 120,
              check_teacher_vs_analytic);
    run_check(3, "aliased score networks give an exactly zero generator gradient", 1,
              check_zero_gradient);
    run_check(4, "stochastic distillation keeps both modes within the match threshold", 600,
              check_bimodal_distill);
    run_check(5, "deterministic distillation converges to the conditional mean", 300,
              check_deterministic_mode_seeks_mean);
    run_check(6, "distillation cost stays within a tenth of pretraining", 600,
              check_distill_budget);
    run_check(7, "function-evaluation counts are instrumented, not assumed", 60, check_nfe_counts);
    run_check(8, "one-step prediction is at least 30x faster than the full chain", 120,
              check_speedup);
    run_check(9, "latency separates one-step from full-chain policies in closed loop", 900,
              check_closed_loop);
    run_check(10, "identical reruns produce byte-identical artifacts", 300,
              check_reproducibility);

    std::size_t passed = 0;
    for (const auto& r : results) passed += r.pass ? 1 : 0;
    double total = 0.0;
    for (const auto& r : results) total += r.seconds;
    std::printf("\nacceptance: %zu/10 passed (%.1fs total)\n", passed, total);
    return passed == results.size() ? 0 : 1;
}
