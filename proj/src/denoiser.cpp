#include "odp/denoiser.hpp"

#include <cmath>
#include <string>

namespace odp {

MlpSpec EpsNet::make_mlp_spec(const EpsNetSpec& s) {
    if (s.x_dim == 0) throw DimensionError("EpsNet: x_dim must be positive");
    MlpSpec m;
    m.sizes.push_back(s.x_dim + s.emb_dim + s.obs_dim);
    for (std::size_t h : s.hidden) m.sizes.push_back(h);
    m.sizes.push_back(s.x_dim);
    m.hidden_act = s.hidden_act;
    return m;
}

EpsNet::EpsNet(EpsNetSpec spec) : spec_(std::move(spec)), net_(make_mlp_spec(spec_)) {}

void EpsNet::init(Rng& rng) { net_.init(rng); }

double EpsNet::time_input(double k_raw) const {
    if (spec_.regime == Regime::DdpmDiscrete) return k_raw;
    if (!(k_raw > 0.0)) throw DomainError("EpsNet::time_input: edm sigma must be positive");
    return 10.0 * std::log(k_raw);
}

Vec EpsNet::assemble_input(const Vec& x, double k_raw, const Vec& obs) const {
    if (x.size() != spec_.x_dim)
        throw DimensionError("EpsNet: x size " + std::to_string(x.size()) + ", expected " +
                             std::to_string(spec_.x_dim));
    if (obs.size() != spec_.obs_dim)
        throw DimensionError("EpsNet: obs size " + std::to_string(obs.size()) + ", expected " +
                             std::to_string(spec_.obs_dim));
    require_finite(x, "EpsNet input x");
    require_finite(obs, "EpsNet input obs");

    Vec in;
    in.reserve(spec_.x_dim + spec_.emb_dim + spec_.obs_dim);
    in.insert(in.end(), x.begin(), x.end());
    const Vec emb = time_embedding(time_input(k_raw), spec_.emb_dim);
    in.insert(in.end(), emb.begin(), emb.end());
    in.insert(in.end(), obs.begin(), obs.end());
    return in;
}

Vec EpsNet::eps(const Vec& x, double k_raw, const Vec& obs) const {
    return net_.forward(assemble_input(x, k_raw, obs));
}

Vec EpsNet::eps_trace(const Vec& x, double k_raw, const Vec& obs, MlpNet::Trace& trace) const {
    return net_.forward(assemble_input(x, k_raw, obs), trace);
}

Vec EpsNet::backward_x(const MlpNet::Trace& trace, const Vec& dy, Vec& param_grad) const {
    Vec din = net_.backward(trace, dy, param_grad);
    return Vec(din.begin(), din.begin() + static_cast<std::ptrdiff_t>(spec_.x_dim));
}

} // namespace odp
