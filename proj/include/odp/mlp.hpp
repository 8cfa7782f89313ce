#pragma once

#include <cstddef>
#include <vector>

#include "odp/rng.hpp"
#include "odp/tensor.hpp"

namespace odp {

enum class Act { Linear, Relu, Tanh };

struct MlpSpec {
    // sizes[0] = input dim, sizes.back() = output dim, the rest hidden widths.
    std::vector<std::size_t> sizes;
    Act hidden_act = Act::Relu;
};

// Fully connected net with a flat parameter vector. The output layer is
// always linear; hidden layers use spec.hidden_act. Layer l stores its
// weight matrix (out x in, row-major) followed by its bias.
class MlpNet {
  public:
    explicit MlpNet(MlpSpec spec);

    // Weights ~ N(0, 1/fan_in), biases zero. Draw order is fixed:
    // layer by layer, weights row-major.
    void init(Rng& rng);

    std::size_t n_params() const { return n_params_; }
    std::size_t n_layers() const { return spec_.sizes.size() - 1; }
    std::size_t in_dim() const { return spec_.sizes.front(); }
    std::size_t out_dim() const { return spec_.sizes.back(); }
    const MlpSpec& spec() const { return spec_; }

    Vec& params() { return params_; }
    const Vec& params() const { return params_; }

    std::size_t w_offset(std::size_t layer) const { return w_off_[layer]; }
    std::size_t b_offset(std::size_t layer) const { return b_off_[layer]; }

    Vec forward(const Vec& x) const;

    // Post-activation of every layer, acts[0] being the input itself.
    struct Trace {
        std::vector<Vec> acts;
    };

    Vec forward(const Vec& x, Trace& trace) const;

    // Accumulates dL/dparams into param_grad (must be n_params long) and
    // returns dL/dx. dy is dL/d(output) at the trace's input.
    Vec backward(const Trace& trace, const Vec& dy, Vec& param_grad) const;

  private:
    MlpSpec spec_;
    Vec params_;
    std::vector<std::size_t> w_off_;
    std::vector<std::size_t> b_off_;
    std::size_t n_params_ = 0;
};

// Sinusoidal embedding of a scalar "time" value: dim/2 (sin, cos) pairs at
// geometrically spaced frequencies, base period 10000.
Vec time_embedding(double t, std::size_t dim);

} // namespace odp
