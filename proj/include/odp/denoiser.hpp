#pragma once

#include <cstddef>

#include "odp/mlp.hpp"
#include "odp/schedule.hpp"
#include "odp/tensor.hpp"

namespace odp {

// Conditional noise predictor eps(x^k, k, obs). k_raw is the schedule-native
// level: integer step for ddpm, sigma for edm.
struct Denoiser {
    virtual ~Denoiser() = default;
    virtual Vec eps(const Vec& x, double k_raw, const Vec& obs) const = 0;
    virtual std::size_t x_dim() const = 0;
    virtual std::size_t obs_dim() const = 0;
};

// Wraps another denoiser and counts forward evaluations. NFE numbers in
// reports come from this, never from formulas.
class CountingDenoiser : public Denoiser {
  public:
    explicit CountingDenoiser(const Denoiser& inner) : inner_(inner) {}

    Vec eps(const Vec& x, double k_raw, const Vec& obs) const override {
        ++count_;
        return inner_.eps(x, k_raw, obs);
    }
    std::size_t x_dim() const override { return inner_.x_dim(); }
    std::size_t obs_dim() const override { return inner_.obs_dim(); }

    std::size_t count() const { return count_; }
    void reset() { count_ = 0; }

  private:
    const Denoiser& inner_;
    mutable std::size_t count_ = 0;
};

struct EpsNetSpec {
    std::size_t x_dim = 0;
    std::size_t obs_dim = 0;
    std::size_t emb_dim = 16;
    std::vector<std::size_t> hidden;
    Act hidden_act = Act::Relu;
    Regime regime = Regime::DdpmDiscrete;
};

// MLP-backed denoiser. Input layout: x slot, then the sinusoidal embedding
// of the noise level, then the raw observation vector.
class EpsNet : public Denoiser {
  public:
    explicit EpsNet(EpsNetSpec spec);

    void init(Rng& rng);

    Vec eps(const Vec& x, double k_raw, const Vec& obs) const override;
    std::size_t x_dim() const override { return spec_.x_dim; }
    std::size_t obs_dim() const override { return spec_.obs_dim; }

    // Scalar fed to the embedding: the step index for ddpm, 10 ln(sigma)
    // for edm (spreads the useful sigma range for the sinusoids).
    double time_input(double k_raw) const;

    Vec assemble_input(const Vec& x, double k_raw, const Vec& obs) const;

    Vec eps_trace(const Vec& x, double k_raw, const Vec& obs, MlpNet::Trace& trace) const;

    // Backprop dL/d(output) through a trace; accumulates into param_grad and
    // returns dL/dx restricted to the x slot.
    Vec backward_x(const MlpNet::Trace& trace, const Vec& dy, Vec& param_grad) const;

    MlpNet& net() { return net_; }
    const MlpNet& net() const { return net_; }
    const EpsNetSpec& spec() const { return spec_; }

  private:
    static MlpSpec make_mlp_spec(const EpsNetSpec& s);

    EpsNetSpec spec_;
    MlpNet net_;
};

} // namespace odp
