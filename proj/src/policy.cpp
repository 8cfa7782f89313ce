#include "odp/policy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>

namespace odp {

Normalizer Normalizer::fit(const std::vector<Vec>& chunks, std::size_t action_dim) {
    if (chunks.empty()) throw ValidationError("Normalizer::fit: no chunks");
    Normalizer n;
    n.lo.assign(action_dim, std::numeric_limits<double>::infinity());
    n.hi.assign(action_dim, -std::numeric_limits<double>::infinity());
    for (const auto& c : chunks) {
        if (c.size() % action_dim != 0)
            throw DimensionError("Normalizer::fit: chunk length not a multiple of action_dim");
        for (std::size_t i = 0; i < c.size(); ++i) {
            const std::size_t d = i % action_dim;
            n.lo[d] = std::min(n.lo[d], c[i]);
            n.hi[d] = std::max(n.hi[d], c[i]);
        }
    }
    for (std::size_t d = 0; d < action_dim; ++d) {
        if (!(n.hi[d] > n.lo[d])) {
            // Degenerate (constant) dimension: widen so the map stays invertible.
            n.lo[d] -= 1.0;
            n.hi[d] += 1.0;
        }
    }
    n.validate();
    return n;
}

Normalizer Normalizer::identity(std::size_t action_dim) {
    Normalizer n;
    n.lo.assign(action_dim, -1.0);
    n.hi.assign(action_dim, 1.0);
    return n;
}

void Normalizer::validate() const {
    if (lo.size() != hi.size() || lo.empty()) throw DimensionError("Normalizer: bad bounds");
    for (std::size_t d = 0; d < lo.size(); ++d)
        if (!(hi[d] > lo[d])) throw ValidationError("Normalizer: max must exceed min");
}

Vec Normalizer::normalize(const Vec& chunk) const {
    const std::size_t ad = action_dim();
    if (chunk.size() % ad != 0) throw DimensionError("Normalizer::normalize: bad chunk length");
    Vec out(chunk.size());
    for (std::size_t i = 0; i < chunk.size(); ++i) {
        const std::size_t d = i % ad;
        out[i] = 2.0 * (chunk[i] - lo[d]) / (hi[d] - lo[d]) - 1.0;
    }
    return out;
}

Vec Normalizer::denormalize(const Vec& chunk) const {
    const std::size_t ad = action_dim();
    if (chunk.size() % ad != 0) throw DimensionError("Normalizer::denormalize: bad chunk length");
    Vec out(chunk.size());
    for (std::size_t i = 0; i < chunk.size(); ++i) {
        const std::size_t d = i % ad;
        out[i] = lo[d] + 0.5 * (chunk[i] + 1.0) * (hi[d] - lo[d]);
    }
    return out;
}

std::size_t clamp_soft(Vec& chunk, double bound) {
    std::size_t hits = 0;
    for (double& v : chunk) {
        if (v > bound) {
            v = bound;
            ++hits;
        } else if (v < -bound) {
            v = -bound;
            ++hits;
        }
    }
    return hits;
}

Dataset build_dataset(const std::vector<Episode>& episodes, std::size_t n_obs, std::size_t t_chunk,
                      std::size_t action_dim, std::size_t state_dim) {
    if (n_obs < 1 || t_chunk < 1) throw ValidationError("build_dataset: n_obs, t_chunk >= 1");
    Dataset data;
    data.n_obs = n_obs;
    data.t_chunk = t_chunk;
    data.action_dim = action_dim;
    data.state_dim = state_dim;

    std::vector<Vec> raw_chunks;
    std::size_t skipped = 0;
    for (const auto& ep : episodes) {
        const std::size_t L = ep.states.size();
        if (ep.actions.size() + 1 != L || L < n_obs + t_chunk) {
            ++skipped;
            continue;
        }
        for (const auto& s : ep.states)
            if (s.size() != state_dim) throw DimensionError("build_dataset: state dim mismatch");
        for (const auto& a : ep.actions)
            if (a.size() != action_dim) throw DimensionError("build_dataset: action dim mismatch");

        // Prediction points t with n_obs states ending at t and t_chunk
        // actions starting at t: t in [n_obs-1, L-1-t_chunk].
        for (std::size_t t = n_obs - 1; t + t_chunk <= L - 1; ++t) {
            TrainPair p;
            p.obs.reserve(n_obs * state_dim);
            for (std::size_t j = t + 1 - n_obs; j <= t; ++j)
                p.obs.insert(p.obs.end(), ep.states[j].begin(), ep.states[j].end());
            Vec chunk;
            chunk.reserve(t_chunk * action_dim);
            for (std::size_t j = t; j < t + t_chunk; ++j)
                chunk.insert(chunk.end(), ep.actions[j].begin(), ep.actions[j].end());
            raw_chunks.push_back(chunk);
            p.chunk_norm = std::move(chunk); // normalized below
            data.pairs.push_back(std::move(p));
        }
    }
    if (skipped > 0)
        std::fprintf(stderr, "build_dataset: skipped %zu episode(s) shorter than %zu states\n",
                     skipped, n_obs + t_chunk);
    if (data.pairs.empty()) throw ValidationError("build_dataset: no usable windows");

    data.norm = Normalizer::fit(raw_chunks, action_dim);
    for (auto& p : data.pairs) p.chunk_norm = data.norm.normalize(p.chunk_norm);
    return data;
}

Dataset dataset_from_bandit(const BanditSpec& spec, const std::vector<BanditPair>& pairs,
                            std::size_t t_chunk, std::size_t action_dim) {
    spec.validate();
    if (pairs.empty()) throw ValidationError("dataset_from_bandit: no pairs");
    if (t_chunk * action_dim != spec.chunk_len())
        throw DimensionError("dataset_from_bandit: t_chunk x action_dim != chunk length");

    Dataset data;
    data.n_obs = 1;
    data.t_chunk = t_chunk;
    data.action_dim = action_dim;
    data.state_dim = spec.cond_dim();

    std::vector<Vec> raw_chunks;
    raw_chunks.reserve(pairs.size());
    for (const auto& bp : pairs) raw_chunks.push_back(bp.chunk);
    data.norm = Normalizer::fit(raw_chunks, action_dim);

    data.pairs.reserve(pairs.size());
    for (const auto& bp : pairs) {
        TrainPair p;
        p.obs = spec.conditions.at(bp.cond);
        p.chunk_norm = data.norm.normalize(bp.chunk);
        data.pairs.push_back(std::move(p));
    }
    return data;
}

BanditSpec normalize_bandit_spec(const BanditSpec& spec, const Normalizer& norm) {
    spec.validate();
    const std::size_t ad = norm.action_dim();
    const double span0 = norm.hi[0] - norm.lo[0];
    for (std::size_t d = 1; d < ad; ++d)
        if (std::abs((norm.hi[d] - norm.lo[d]) - span0) > 1e-9 * span0)
            throw ValidationError(
                "normalize_bandit_spec: per-dimension spans differ; isotropic components "
                "would not survive normalization");
    const double scale = 2.0 / span0;

    BanditSpec out = spec;
    for (auto& comps : out.mixtures)
        for (auto& c : comps) {
            c.mean = norm.normalize(c.mean);
            c.sigma *= scale;
        }
    out.validate();
    return out;
}

double bandit_eps_mse(const Denoiser& net, const BanditSpec& norm_spec, const NoiseSchedule& sched,
                      const std::vector<double>& k_values) {
    norm_spec.validate();
    if (k_values.empty()) throw ValidationError("bandit_eps_mse: no noise levels");
    const std::size_t dim = norm_spec.chunk_len();
    if (net.x_dim() != dim) throw DimensionError("bandit_eps_mse: net chunk dim mismatch");

    double total = 0.0;
    std::size_t n_pts = 0;
    for (std::size_t c = 0; c < norm_spec.conditions.size(); ++c) {
        const Vec& obs = norm_spec.conditions[c];
        for (const auto& comp : norm_spec.mixtures[c]) {
            for (double k : k_values) {
                const auto [alpha, sigma] = sched.alpha_sigma(k);
                const double sd = std::sqrt(alpha * alpha * comp.sigma * comp.sigma + sigma * sigma);
                Vec center(dim);
                for (std::size_t j = 0; j < dim; ++j) center[j] = alpha * comp.mean[j];

                std::vector<Vec> points;
                points.push_back(center);
                for (std::size_t j = 0; j < dim; ++j)
                    for (double m : {-2.0, -1.0, 1.0, 2.0}) {
                        Vec x = center;
                        x[j] += m * sd;
                        points.push_back(std::move(x));
                    }

                for (const auto& x : points) {
                    const Vec truth = analytic_bandit_eps(norm_spec, c, x, k, sched);
                    const Vec pred = net.eps(x, k, obs);
                    double sq = 0.0;
                    for (std::size_t j = 0; j < dim; ++j) {
                        const double r = pred[j] - truth[j];
                        sq += r * r;
                    }
                    total += sq / static_cast<double>(dim);
                    ++n_pts;
                }
            }
        }
    }
    return total / static_cast<double>(n_pts);
}

std::vector<CurvePoint> pretrain(EpsNet& net, const Dataset& data, const NoiseSchedule& sched,
                                 const LambdaWeight& lam, const KRule& krule,
                                 const PretrainConfig& cfg, Rng& rng) {
    if (data.pairs.empty()) throw ValidationError("pretrain: empty dataset");
    if (net.x_dim() != data.chunk_dim() || net.obs_dim() != data.obs_dim())
        throw ConfigError("pretrain: net layout does not match dataset");

    Adam opt(net.net().n_params(),
             {cfg.lr, cfg.beta1, cfg.beta2, 1e-8, cfg.weight_decay});
    Vec grad(net.net().n_params(), 0.0);
    std::vector<DsmItem> batch(cfg.batch);
    std::vector<CurvePoint> curve;

    for (std::size_t step = 1; step <= cfg.steps; ++step) {
        for (auto& item : batch) {
            const auto& p = data.pairs[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(data.pairs.size()) - 1))];
            item.x0 = p.chunk_norm;
            item.obs = p.obs;
        }
        std::fill(grad.begin(), grad.end(), 0.0);
        const double loss = dsm_loss_grad(net, batch, sched, lam, krule, rng, grad);
        if (!std::isfinite(loss)) throw TrainingError("pretrain: non-finite loss at step " +
                                                      std::to_string(step));
        opt.step(net.net().params(), grad);
        if (step % cfg.log_every == 0 || step == cfg.steps) curve.push_back({step, loss});
    }
    return curve;
}

PredictResult DiffusionPolicy::predict_chunk(const Vec& obs, const SamplerSpec& sampler,
                                             Rng& rng) const {
    SampleResult res = sample(net, obs, sampler, sched, rng);
    if (std::size_t hits = clamp_soft(res.x); hits > 0)
        std::atomic_ref<std::size_t>(clamp_events).fetch_add(hits, std::memory_order_relaxed);
    return {norm.denormalize(res.x), res.nfe};
}

EpisodeRecord run_receding_horizon(const Actor& actor, Reach2D& env, std::size_t t_act,
                                   const LatencyModel& latency, std::size_t n_obs, Rng& rng) {
    if (t_act < 1 || t_act > actor.t_chunk())
        throw ConfigError("run_receding_horizon: need 1 <= t_act <= t_chunk");

    EpisodeRecord rec;
    rec.states.push_back(env.state());

    std::deque<Vec> recent(n_obs, env.state());
    const std::size_t ad = actor.action_dim();

    try {
        while (!env.done()) {
            // Observation frozen at the moment planning starts.
            Vec obs;
            obs.reserve(n_obs * recent.front().size());
            for (const auto& s : recent) obs.insert(obs.end(), s.begin(), s.end());

            PredictResult pred = actor.predict(obs, rng);
            rec.nfe_per_plan.push_back(pred.nfe);
            rec.total_nfe += pred.nfe;

            // The world keeps moving while the prediction is computed.
            const double lat = latency.latency(pred.nfe);
            env.advance_time(lat);
            rec.sim_time += lat;

            for (std::size_t j = 0; j < t_act && !env.done(); ++j) {
                Vec a(pred.chunk.begin() + static_cast<std::ptrdiff_t>(j * ad),
                      pred.chunk.begin() + static_cast<std::ptrdiff_t>((j + 1) * ad));
                env.step(a);
                rec.sim_time += env.spec().dt;
                rec.actions.push_back(a);
                rec.states.push_back(env.state());
                recent.pop_front();
                recent.push_back(env.state());
            }
        }
        rec.success = env.success();
        if (!rec.success) rec.fail_reason = "horizon exhausted";
    } catch (const std::exception& e) {
        rec.success = false;
        rec.fail_reason = e.what();
    }
    return rec;
}

} // namespace odp
