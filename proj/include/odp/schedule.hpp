#pragma once

#include <cstddef>
#include <utility>

#include "odp/rng.hpp"
#include "odp/tensor.hpp"

namespace odp {

enum class Regime { DdpmDiscrete, EdmContinuous };

const char* regime_name(Regime r);
Regime regime_from_name(const std::string& name);

// Variance-preserving discrete schedule (squared-cosine alpha_bar, K steps,
// beta capped at 0.999) or variance-exploding continuous one (alpha = 1,
// noise level sigma). x^k = alpha_k x0 + sigma_k eps in both regimes.
struct NoiseSchedule {
    Regime regime = Regime::DdpmDiscrete;

    // ddpm
    int K = 100;
    double cosine_s = 0.008;
    double beta_cap = 0.999;
    Vec alpha_bar; // size K+1, alpha_bar[0] = 1

    // edm
    double sigma_min = 0.002;
    double sigma_max = 80.0;
    double rho = 7.0;
    double sigma_data = 0.5;

    static NoiseSchedule ddpm_cosine(int K = 100, double s = 0.008, double beta_cap = 0.999);
    static NoiseSchedule edm(double sigma_min = 0.002, double sigma_max = 80.0, double rho = 7.0,
                             double sigma_data = 0.5);

    // For ddpm, k must be an integer in [0, K]; for edm, k is the noise
    // level sigma and must be positive and finite.
    std::pair<double, double> alpha_sigma(double k) const;

    // ddpm only: per-step beta_k = 1 - alpha_bar[k]/alpha_bar[k-1], k in [1, K].
    double beta(int k) const;

    bool is_ddpm() const { return regime == Regime::DdpmDiscrete; }
};

// Decreasing sigma grid for the Heun sampler:
// sigma_i = (sigma_max^(1/rho) + i/(n-1) (sigma_min^(1/rho) - sigma_max^(1/rho)))^rho.
Vec edm_sigma_grid(const NoiseSchedule& s, int n);

enum class LambdaRule { Unit, EdmDefault };

// DSM loss weight: 1 everywhere, or (sigma^2 + sigma_d^2)/(sigma sigma_d)^2.
struct LambdaWeight {
    LambdaRule rule = LambdaRule::Unit;
    double sigma_data = 0.5;

    double operator()(double sigma) const;
};

// Distribution of the corruption level during training. Ddpm regimes draw
// uniform integer steps; edm draws log-normal sigma, ln sigma ~ N(mu, sd^2).
struct KRule {
    enum class Kind { UniformInt, LogNormal };
    Kind kind = Kind::UniformInt;
    int lo = 1;
    int hi = 100;
    double mu = -1.2;
    double sd = 1.2;

    static KRule uniform_int(int lo, int hi);
    static KRule log_normal(double mu = -1.2, double sd = 1.2);

    double draw(Rng& rng) const;
};

// Distillation reweighting w(k) = sigma_k^2.
inline double w_weight(double sigma) { return sigma * sigma; }

} // namespace odp
