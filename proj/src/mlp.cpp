#include "odp/mlp.hpp"

#include <cmath>
#include <string>

namespace odp {

MlpNet::MlpNet(MlpSpec spec) : spec_(std::move(spec)) {
    if (spec_.sizes.size() < 2) throw DimensionError("MlpNet: need at least input and output sizes");
    for (std::size_t s : spec_.sizes)
        if (s == 0) throw DimensionError("MlpNet: zero-width layer");
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < spec_.sizes.size(); ++l) {
        w_off_.push_back(off);
        off += spec_.sizes[l + 1] * spec_.sizes[l];
        b_off_.push_back(off);
        off += spec_.sizes[l + 1];
    }
    n_params_ = off;
    params_.assign(n_params_, 0.0);
}

void MlpNet::init(Rng& rng) {
    for (std::size_t l = 0; l < n_layers(); ++l) {
        const std::size_t in = spec_.sizes[l];
        const std::size_t out = spec_.sizes[l + 1];
        const double s = 1.0 / std::sqrt(static_cast<double>(in));
        double* w = params_.data() + w_off_[l];
        for (std::size_t i = 0; i < out * in; ++i) w[i] = s * rng.normal();
        double* b = params_.data() + b_off_[l];
        for (std::size_t i = 0; i < out; ++i) b[i] = 0.0;
    }
}

namespace {

void apply_act(Act act, Vec& v) {
    switch (act) {
    case Act::Linear:
        break;
    case Act::Relu:
        for (double& x : v) x = x > 0.0 ? x : 0.0;
        break;
    case Act::Tanh:
        for (double& x : v) x = std::tanh(x);
        break;
    }
}

// Derivative of the activation expressed through its output value.
double act_grad_from_out(Act act, double a) {
    switch (act) {
    case Act::Linear:
        return 1.0;
    case Act::Relu:
        return a > 0.0 ? 1.0 : 0.0;
    case Act::Tanh:
        return 1.0 - a * a;
    }
    return 1.0;
}

} // namespace

Vec MlpNet::forward(const Vec& x) const {
    Trace trace;
    return forward(x, trace);
}

Vec MlpNet::forward(const Vec& x, Trace& trace) const {
    if (x.size() != in_dim())
        throw DimensionError("MlpNet::forward: input size " + std::to_string(x.size()) +
                             ", expected " + std::to_string(in_dim()));
    trace.acts.assign(n_layers() + 1, {});
    trace.acts[0] = x;
    for (std::size_t l = 0; l < n_layers(); ++l) {
        const std::size_t in = spec_.sizes[l];
        const std::size_t out = spec_.sizes[l + 1];
        const Vec& a = trace.acts[l];
        Vec z(out);
        const double* w = params_.data() + w_off_[l];
        const double* b = params_.data() + b_off_[l];
        for (std::size_t o = 0; o < out; ++o) {
            double s = b[o];
            const double* wrow = w + o * in;
            for (std::size_t i = 0; i < in; ++i) s += wrow[i] * a[i];
            z[o] = s;
        }
        if (l + 1 < n_layers()) apply_act(spec_.hidden_act, z);
        trace.acts[l + 1] = std::move(z);
    }
    return trace.acts.back();
}

Vec MlpNet::backward(const Trace& trace, const Vec& dy, Vec& param_grad) const {
    if (trace.acts.size() != n_layers() + 1) throw DimensionError("MlpNet::backward: stale trace");
    if (dy.size() != out_dim()) throw DimensionError("MlpNet::backward: dy size mismatch");
    if (param_grad.size() != n_params_) throw DimensionError("MlpNet::backward: grad buffer size");

    Vec g = dy;
    for (std::size_t l = n_layers(); l-- > 0;) {
        const std::size_t in = spec_.sizes[l];
        const std::size_t out = spec_.sizes[l + 1];
        const Vec& a_in = trace.acts[l];
        const Vec& a_out = trace.acts[l + 1];

        Vec dz(out);
        if (l + 1 < n_layers()) {
            for (std::size_t o = 0; o < out; ++o)
                dz[o] = g[o] * act_grad_from_out(spec_.hidden_act, a_out[o]);
        } else {
            dz = g;
        }

        double* dw = param_grad.data() + w_off_[l];
        double* db = param_grad.data() + b_off_[l];
        for (std::size_t o = 0; o < out; ++o) {
            const double d = dz[o];
            double* dwrow = dw + o * in;
            for (std::size_t i = 0; i < in; ++i) dwrow[i] += d * a_in[i];
            db[o] += d;
        }

        Vec g_prev(in, 0.0);
        const double* w = params_.data() + w_off_[l];
        for (std::size_t o = 0; o < out; ++o) {
            const double d = dz[o];
            const double* wrow = w + o * in;
            for (std::size_t i = 0; i < in; ++i) g_prev[i] += wrow[i] * d;
        }
        g = std::move(g_prev);
    }
    return g;
}

Vec time_embedding(double t, std::size_t dim) {
    if (dim == 0 || dim % 2 != 0) throw DimensionError("time_embedding: dim must be even and positive");
    const std::size_t half = dim / 2;
    Vec out(dim);
    for (std::size_t i = 0; i < half; ++i) {
        double freq = 1.0;
        if (half > 1)
            freq = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(half - 1));
        out[i] = std::sin(t * freq);
        out[half + i] = std::cos(t * freq);
    }
    return out;
}

} // namespace odp
