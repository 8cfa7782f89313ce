#pragma once

#include <cstddef>
#include <vector>

#include "odp/denoiser.hpp"
#include "odp/rng.hpp"
#include "odp/schedule.hpp"
#include "odp/tensor.hpp"

namespace odp {

// x^k = alpha x0 + sigma eps, elementwise.
Vec forward_diffuse(const Vec& x0, double alpha, double sigma, const Vec& eps);

// score = -eps_pred / sigma.
Vec score_from_eps(const Vec& eps_pred, double sigma);

enum class SamplerKind { Ddpm, Ddim, EdmHeun };

const char* sampler_name(SamplerKind k);
SamplerKind sampler_from_name(const std::string& name);

// n: discretization steps for ddim and edm_heun; ignored for ddpm, which
// always runs the schedule's full K steps. NFE: ddpm K, ddim n, heun 2n-1.
struct SamplerSpec {
    SamplerKind kind = SamplerKind::Ddpm;
    int n = 0;
    bool final_noise = false;

    int expected_nfe(const NoiseSchedule& s) const;
};

struct SampleResult {
    Vec x;
    std::size_t nfe = 0;
};

SampleResult sample(const Denoiser& net, const Vec& obs, const SamplerSpec& spec,
                    const NoiseSchedule& s, Rng& rng);

struct DsmItem {
    Vec x0;
    Vec obs;
};

// Per-sample loss at an explicit corruption: lambda(sigma_k) * ||net(x^k) - eps||^2 / dim.
double dsm_term(const Denoiser& net, const Vec& x0, const Vec& obs, double k_raw, const Vec& eps,
                const NoiseSchedule& s, const LambdaWeight& lam);

// Monte-Carlo DSM loss: k ~ krule, eps ~ N(0,I) per item, mean over batch.
double dsm_loss(const Denoiser& net, const std::vector<DsmItem>& batch, const NoiseSchedule& s,
                const LambdaWeight& lam, const KRule& krule, Rng& rng);

// Same estimate with gradients accumulated into grad (size net.n_params()).
// If predictor is non-null, the residual uses predictor's output instead of
// net's, while the backward pass still runs through net; the two match when
// predictor == &net.
double dsm_loss_grad(const EpsNet& net, const std::vector<DsmItem>& batch, const NoiseSchedule& s,
                     const LambdaWeight& lam, const KRule& krule, Rng& rng, Vec& grad,
                     const Denoiser* predictor = nullptr);

} // namespace odp
