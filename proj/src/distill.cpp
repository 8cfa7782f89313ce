#include "odp/distill.hpp"

#include <atomic>
#include <cmath>
#include <string>

namespace odp {

const char* gen_mode_name(GenMode m) {
    return m == GenMode::Stochastic ? "stochastic" : "deterministic";
}

GenMode gen_mode_from_name(const std::string& name) {
    if (name == "stochastic" || name == "s") return GenMode::Stochastic;
    if (name == "deterministic" || name == "d") return GenMode::Deterministic;
    throw ConfigError("unknown generator mode '" + name + "'");
}

Vec Generator::sample_via(const Denoiser& view, const Vec& obs, Rng& rng) const {
    Vec z(net.x_dim(), 0.0);
    if (mode == GenMode::Stochastic) z = gauss(rng, net.x_dim());
    return view.eps(z, t_init_raw, obs);
}

PredictResult GeneratorActor::predict(const Vec& obs, Rng& rng) const {
    CountingDenoiser counted(gen_.net);
    Vec x = gen_.sample_via(counted, obs, rng);
    std::size_t hits = clamp_soft(x);
    if (hits > 0)
        std::atomic_ref<std::size_t>(clamp_events_).fetch_add(hits, std::memory_order_relaxed);
    return PredictResult{norm_.denormalize(x), counted.count()};
}

DistillState DistillState::init(const EpsNet& teacher, const NoiseSchedule& sched,
                                DistillConfig cfg) {
    DistillState st{
        Generator{teacher, cfg.mode, cfg.t_init_raw},
        teacher,
        nullptr,
        sched,
        cfg,
        Adam(teacher.net().n_params(), {cfg.lr_theta, cfg.beta1, cfg.beta2, 1e-8, 0.0}),
        Adam(teacher.net().n_params(), {cfg.lr_psi, cfg.beta1, cfg.beta2, 1e-8, 0.0}),
    };
    return st;
}

Vec theta_grad_single(const Generator& theta, const Denoiser& phi, const Denoiser* psi,
                      GenMode mode, const NoiseSchedule& sched, const Vec& obs, const Vec& z,
                      double k_raw, const Vec& eps, Vec& grad) {
    if (mode == GenMode::Stochastic && psi == nullptr)
        throw ConfigError("theta_grad_single: stochastic mode needs a psi network");

    const auto [alpha, sigma] = sched.alpha_sigma(k_raw);
    if (sigma == 0.0) throw SingularityError("theta_grad_single: sigma = 0");

    MlpNet::Trace trace;
    const Vec a = theta.net.eps_trace(z, theta.t_init_raw, obs, trace);
    const Vec ak = forward_diffuse(a, alpha, sigma, eps);

    const Vec e_phi = phi.eps(ak, k_raw, obs);
    const Vec e_ref = (mode == GenMode::Stochastic) ? psi->eps(ak, k_raw, obs) : eps;

    const double coef = w_weight(sigma) / sigma * alpha;
    Vec upstream(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) upstream[i] = coef * (e_phi[i] - e_ref[i]);

    theta.net.net().backward(trace, upstream, grad);
    return upstream;
}

double theta_grad(const Generator& theta, const Denoiser& phi, const Denoiser* psi, GenMode mode,
                  const NoiseSchedule& sched, const KRule& krule,
                  const std::vector<Vec>& obs_batch, Rng& rng, Vec& grad) {
    if (obs_batch.empty()) throw ValidationError("theta_grad: empty batch");
    if (grad.size() != theta.net.net().n_params())
        throw DimensionError("theta_grad: grad buffer size");

    const std::size_t d = theta.net.x_dim();
    Vec sample_grad(grad.size());
    double last_k = 0.0;
    for (const auto& obs : obs_batch) {
        Vec z(d, 0.0);
        if (mode == GenMode::Stochastic) z = gauss(rng, d);
        const double k_raw = krule.draw(rng);
        last_k = k_raw;
        const Vec eps = gauss(rng, d);
        std::fill(sample_grad.begin(), sample_grad.end(), 0.0);
        theta_grad_single(theta, phi, psi, mode, sched, obs, z, k_raw, eps, sample_grad);
        axpy(1.0 / static_cast<double>(obs_batch.size()), sample_grad, grad);
    }
    if (!all_finite(grad)) {
        const auto [alpha, sigma] = sched.alpha_sigma(last_k);
        throw TrainingError("theta_grad: non-finite gradient (last k=" + std::to_string(last_k) +
                            ", sigma=" + std::to_string(sigma) +
                            ", |grad| component failed finite check)");
    }
    return norm2(grad);
}

double psi_step(DistillState& st, const std::vector<Vec>& obs_batch, Rng& rng) {
    if (st.cfg.mode != GenMode::Stochastic)
        throw ConfigError("psi_step: deterministic mode has no psi network");
    if (obs_batch.empty()) throw ValidationError("psi_step: empty batch");

    std::vector<DsmItem> items;
    items.reserve(obs_batch.size());
    for (const auto& obs : obs_batch)
        items.push_back({st.theta.sample_normalized(obs, rng), obs});

    Vec grad(st.psi.net().n_params(), 0.0);
    const double loss =
        dsm_loss_grad(st.psi, items, st.sched, st.cfg.lambda, st.cfg.krule, rng, grad);
    st.opt_psi.step(st.psi.net().params(), grad);
    return loss;
}

double theta_step(DistillState& st, const std::vector<Vec>& obs_batch, Rng& rng) {
    if (st.phi == nullptr) throw ConfigError("theta_step: no teacher attached");
    Vec grad(st.theta.net.net().n_params(), 0.0);
    const Denoiser* psi = st.cfg.mode == GenMode::Stochastic ? &st.psi : nullptr;
    const double gnorm = theta_grad(st.theta, *st.phi, psi, st.cfg.mode, st.sched, st.cfg.krule,
                                    obs_batch, rng, grad);
    st.opt_theta.step(st.theta.net.net().params(), grad);
    return gnorm;
}

std::vector<DistillLogRow> distill_run(
    DistillState& st, const std::vector<Vec>& obs_pool, Rng& rng,
    const std::function<void(std::size_t, DistillState&)>& on_log) {
    if (st.phi == nullptr) throw ConfigError("distill_run: no teacher attached");
    if (obs_pool.empty()) throw ValidationError("distill_run: empty observation pool");

    std::vector<DistillLogRow> rows;
    std::vector<Vec> batch(st.cfg.batch);
    auto draw_batch = [&]() {
        for (auto& obs : batch)
            obs = obs_pool[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(obs_pool.size()) - 1))];
    };

    for (std::size_t step = 1; step <= st.cfg.steps; ++step) {
        double loss_psi = std::nan("");
        if (st.cfg.mode == GenMode::Stochastic) {
            for (std::size_t r = 0; r < st.cfg.psi_per_theta; ++r) {
                draw_batch();
                loss_psi = psi_step(st, batch, rng);
            }
        } else {
            draw_batch();
        }
        const double gnorm = theta_step(st, batch, rng);

        if (step % st.cfg.log_every == 0 || step == st.cfg.steps) {
            rows.push_back({step, loss_psi, gnorm});
            if (on_log) on_log(step, st);
        }
    }
    return rows;
}

} // namespace odp
