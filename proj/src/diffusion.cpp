#include "odp/diffusion.hpp"

#include <cmath>
#include <string>

namespace odp {

Vec forward_diffuse(const Vec& x0, double alpha, double sigma, const Vec& eps) {
    require_same_size(x0, eps, "forward_diffuse");
    Vec out(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) out[i] = alpha * x0[i] + sigma * eps[i];
    return out;
}

Vec score_from_eps(const Vec& eps_pred, double sigma) {
    if (sigma == 0.0) throw SingularityError("score_from_eps: sigma = 0");
    Vec out(eps_pred.size());
    for (std::size_t i = 0; i < eps_pred.size(); ++i) out[i] = -eps_pred[i] / sigma;
    return out;
}

const char* sampler_name(SamplerKind k) {
    switch (k) {
    case SamplerKind::Ddpm:
        return "ddpm";
    case SamplerKind::Ddim:
        return "ddim";
    case SamplerKind::EdmHeun:
        return "edm_heun";
    }
    return "?";
}

SamplerKind sampler_from_name(const std::string& name) {
    if (name == "ddpm") return SamplerKind::Ddpm;
    if (name == "ddim") return SamplerKind::Ddim;
    if (name == "edm_heun") return SamplerKind::EdmHeun;
    throw ConfigError("unknown sampler '" + name + "'");
}

int SamplerSpec::expected_nfe(const NoiseSchedule& s) const {
    switch (kind) {
    case SamplerKind::Ddpm:
        return s.K;
    case SamplerKind::Ddim:
        return n;
    case SamplerKind::EdmHeun:
        return 2 * n - 1;
    }
    return 0;
}

namespace {

SampleResult sample_ddpm(const Denoiser& net, const Vec& obs, const SamplerSpec& spec,
                         const NoiseSchedule& s, Rng& rng) {
    const std::size_t d = net.x_dim();
    Vec x = gauss(rng, d);
    std::size_t nfe = 0;
    for (int k = s.K; k >= 1; --k) {
        const auto [alpha, sigma] = s.alpha_sigma(k);
        const double ab = s.alpha_bar[static_cast<std::size_t>(k)];
        const double ab_prev = s.alpha_bar[static_cast<std::size_t>(k - 1)];
        const double beta = 1.0 - ab / ab_prev;

        const Vec eps_hat = net.eps(x, static_cast<double>(k), obs);
        ++nfe;

        const double c0 = std::sqrt(ab_prev) * beta / (1.0 - ab);
        const double cx = std::sqrt(1.0 - beta) * (1.0 - ab_prev) / (1.0 - ab);
        const double var = beta * (1.0 - ab_prev) / (1.0 - ab);

        Vec next(d);
        for (std::size_t i = 0; i < d; ++i) {
            const double x0_hat = (x[i] - sigma * eps_hat[i]) / alpha;
            next[i] = c0 * x0_hat + cx * x[i];
        }
        if (k > 1 || spec.final_noise) {
            const double sd = std::sqrt(var);
            if (sd > 0.0)
                for (std::size_t i = 0; i < d; ++i) next[i] += sd * rng.normal();
        }
        x = std::move(next);
    }
    return {std::move(x), nfe};
}

SampleResult sample_ddim(const Denoiser& net, const Vec& obs, const SamplerSpec& spec,
                         const NoiseSchedule& s, Rng& rng) {
    const int n = spec.n;
    if (n < 1) throw ConfigError("ddim sampler: need n >= 1");
    if (n > s.K) throw ConfigError("ddim sampler: n exceeds schedule steps");

    std::vector<int> tau(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j)
        tau[static_cast<std::size_t>(j)] =
            static_cast<int>(std::lround(static_cast<double>(j) * s.K / n));
    for (int j = 0; j < n; ++j)
        if (tau[static_cast<std::size_t>(j)] >= tau[static_cast<std::size_t>(j) + 1])
            throw ConfigError("ddim sampler: degenerate step grid");

    const std::size_t d = net.x_dim();
    Vec x = gauss(rng, d);
    std::size_t nfe = 0;
    for (int j = n; j >= 1; --j) {
        const int k = tau[static_cast<std::size_t>(j)];
        const int k_prev = tau[static_cast<std::size_t>(j) - 1];
        const auto [alpha, sigma] = s.alpha_sigma(k);
        const auto [alpha_p, sigma_p] = s.alpha_sigma(k_prev);

        const Vec eps_hat = net.eps(x, static_cast<double>(k), obs);
        ++nfe;
        for (std::size_t i = 0; i < d; ++i) {
            const double x0_hat = (x[i] - sigma * eps_hat[i]) / alpha;
            x[i] = alpha_p * x0_hat + sigma_p * eps_hat[i];
        }
    }
    return {std::move(x), nfe};
}

SampleResult sample_edm_heun(const Denoiser& net, const Vec& obs, const SamplerSpec& spec,
                             const NoiseSchedule& s, Rng& rng) {
    if (spec.n < 2) throw ConfigError("edm_heun sampler: need n >= 2");
    const Vec grid = edm_sigma_grid(s, spec.n);
    const std::size_t d = net.x_dim();

    Vec x = gauss(rng, d);
    scale(x, grid[0]);
    std::size_t nfe = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double sig = grid[i];
        const double sig_next = (i + 1 < grid.size()) ? grid[i + 1] : 0.0;
        const double h = sig_next - sig;

        const Vec d1 = net.eps(x, sig, obs);
        ++nfe;
        Vec x_e(d);
        for (std::size_t j = 0; j < d; ++j) x_e[j] = x[j] + h * d1[j];

        if (sig_next > 0.0) {
            const Vec d2 = net.eps(x_e, sig_next, obs);
            ++nfe;
            for (std::size_t j = 0; j < d; ++j) x[j] += h * 0.5 * (d1[j] + d2[j]);
        } else {
            x = std::move(x_e);
        }
    }
    return {std::move(x), nfe};
}

} // namespace

SampleResult sample(const Denoiser& net, const Vec& obs, const SamplerSpec& spec,
                    const NoiseSchedule& s, Rng& rng) {
    const bool needs_ddpm = spec.kind == SamplerKind::Ddpm || spec.kind == SamplerKind::Ddim;
    if (needs_ddpm && s.regime != Regime::DdpmDiscrete)
        throw ConfigError(std::string(sampler_name(spec.kind)) + " sampler requires ddpm schedule");
    if (spec.kind == SamplerKind::EdmHeun && s.regime != Regime::EdmContinuous)
        throw ConfigError("edm_heun sampler requires edm schedule");

    switch (spec.kind) {
    case SamplerKind::Ddpm:
        return sample_ddpm(net, obs, spec, s, rng);
    case SamplerKind::Ddim:
        return sample_ddim(net, obs, spec, s, rng);
    case SamplerKind::EdmHeun:
        return sample_edm_heun(net, obs, spec, s, rng);
    }
    throw ConfigError("sample: unreachable sampler kind");
}

double dsm_term(const Denoiser& net, const Vec& x0, const Vec& obs, double k_raw, const Vec& eps,
                const NoiseSchedule& s, const LambdaWeight& lam) {
    const auto [alpha, sigma] = s.alpha_sigma(k_raw);
    const Vec xk = forward_diffuse(x0, alpha, sigma, eps);
    const Vec pred = net.eps(xk, k_raw, obs);
    require_same_size(pred, eps, "dsm_term");
    double se = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double r = pred[i] - eps[i];
        se += r * r;
    }
    return lam(sigma) * se / static_cast<double>(eps.size());
}

double dsm_loss(const Denoiser& net, const std::vector<DsmItem>& batch, const NoiseSchedule& s,
                const LambdaWeight& lam, const KRule& krule, Rng& rng) {
    if (batch.empty()) throw ValidationError("dsm_loss: empty batch");
    double total = 0.0;
    for (const auto& item : batch) {
        const double k_raw = krule.draw(rng);
        const Vec eps = gauss(rng, item.x0.size());
        total += dsm_term(net, item.x0, item.obs, k_raw, eps, s, lam);
    }
    return total / static_cast<double>(batch.size());
}

double dsm_loss_grad(const EpsNet& net, const std::vector<DsmItem>& batch, const NoiseSchedule& s,
                     const LambdaWeight& lam, const KRule& krule, Rng& rng, Vec& grad,
                     const Denoiser* predictor) {
    if (batch.empty()) throw ValidationError("dsm_loss_grad: empty batch");
    if (grad.size() != net.net().n_params()) throw DimensionError("dsm_loss_grad: grad buffer size");

    const double bsz = static_cast<double>(batch.size());
    double total = 0.0;
    MlpNet::Trace trace;
    for (const auto& item : batch) {
        const double k_raw = krule.draw(rng);
        const auto [alpha, sigma] = s.alpha_sigma(k_raw);
        const Vec eps = gauss(rng, item.x0.size());
        const Vec xk = forward_diffuse(item.x0, alpha, sigma, eps);

        Vec pred = net.eps_trace(xk, k_raw, item.obs, trace);
        if (predictor) pred = predictor->eps(xk, k_raw, item.obs);
        require_same_size(pred, eps, "dsm_loss_grad");

        const double w = lam(sigma);
        const double dim = static_cast<double>(eps.size());
        double se = 0.0;
        Vec dy(eps.size());
        for (std::size_t i = 0; i < eps.size(); ++i) {
            const double r = pred[i] - eps[i];
            se += r * r;
            dy[i] = 2.0 * w * r / (dim * bsz);
        }
        total += w * se / dim;
        net.net().backward(trace, dy, grad);
    }
    return total / bsz;
}

} // namespace odp
