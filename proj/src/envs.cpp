#include "odp/envs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace odp {

std::size_t BanditSpec::chunk_len() const {
    if (mixtures.empty() || mixtures[0].empty()) throw ValidationError("BanditSpec: empty mixture");
    return mixtures[0][0].mean.size();
}

std::size_t BanditSpec::cond_dim() const {
    if (conditions.empty()) throw ValidationError("BanditSpec: no conditions");
    return conditions[0].size();
}

void BanditSpec::validate() const {
    if (conditions.empty()) throw ValidationError("BanditSpec: no conditions");
    if (mixtures.size() != conditions.size())
        throw ValidationError("BanditSpec: one mixture per condition required");
    const std::size_t cd = conditions[0].size();
    const std::size_t len = chunk_len();
    for (const auto& c : conditions)
        if (c.size() != cd) throw ValidationError("BanditSpec: condition dims differ");
    for (const auto& mix : mixtures) {
        if (mix.empty()) throw ValidationError("BanditSpec: empty mixture");
        double wsum = 0.0;
        for (const auto& comp : mix) {
            if (!(comp.weight > 0.0)) throw ValidationError("BanditSpec: weights must be positive");
            if (!(comp.sigma > 0.0)) throw ValidationError("BanditSpec: sigmas must be positive");
            if (comp.mean.size() != len) throw ValidationError("BanditSpec: mean dims differ");
            wsum += comp.weight;
        }
        if (std::abs(wsum - 1.0) > 1e-9)
            throw ValidationError("BanditSpec: weights must sum to 1, got " + std::to_string(wsum));
    }
}

std::size_t BanditSpec::condition_index(const Vec& obs) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < conditions.size(); ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < obs.size() && j < conditions[i].size(); ++j) {
            const double r = obs[j] - conditions[i][j];
            d += r * r;
        }
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<BanditPair> gen_bandit_dataset(const BanditSpec& spec, std::size_t n_per_condition,
                                           Rng& rng) {
    spec.validate();
    if (n_per_condition < 1) throw ValidationError("gen_bandit_dataset: n_per_condition >= 1");
    std::vector<BanditPair> out;
    out.reserve(spec.conditions.size() * n_per_condition);
    for (std::size_t c = 0; c < spec.conditions.size(); ++c) {
        const auto& mix = spec.mixtures[c];
        for (std::size_t i = 0; i < n_per_condition; ++i) {
            const double u = rng.uniform01();
            double acc = 0.0;
            std::size_t pick = mix.size() - 1;
            for (std::size_t m = 0; m < mix.size(); ++m) {
                acc += mix[m].weight;
                if (u < acc) {
                    pick = m;
                    break;
                }
            }
            const auto& comp = mix[pick];
            Vec chunk = comp.mean;
            for (double& v : chunk) v += comp.sigma * rng.normal();
            out.push_back({c, std::move(chunk)});
        }
    }
    return out;
}

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Per-component log weights of the diffused mixture at xk.
void diffused_log_terms(const std::vector<MixtureComponent>& mix, const Vec& xk, double alpha,
                        double sigma, Vec& log_terms, Vec& vars) {
    const double dim = static_cast<double>(xk.size());
    log_terms.resize(mix.size());
    vars.resize(mix.size());
    for (std::size_t i = 0; i < mix.size(); ++i) {
        const auto& comp = mix[i];
        const double v = alpha * alpha * comp.sigma * comp.sigma + sigma * sigma;
        double sq = 0.0;
        for (std::size_t j = 0; j < xk.size(); ++j) {
            const double r = xk[j] - alpha * comp.mean[j];
            sq += r * r;
        }
        vars[i] = v;
        log_terms[i] = std::log(comp.weight) - 0.5 * dim * (kLog2Pi + std::log(v)) - sq / (2.0 * v);
    }
}

} // namespace

double bandit_log_qk(const BanditSpec& spec, std::size_t cond_idx, const Vec& xk, double k_raw,
                     const NoiseSchedule& s) {
    const auto [alpha, sigma] = s.alpha_sigma(k_raw);
    const auto& mix = spec.mixtures.at(cond_idx);
    Vec log_terms, vars;
    diffused_log_terms(mix, xk, alpha, sigma, log_terms, vars);
    const double m = *std::max_element(log_terms.begin(), log_terms.end());
    double acc = 0.0;
    for (double lt : log_terms) acc += std::exp(lt - m);
    return m + std::log(acc);
}

Vec analytic_bandit_eps(const BanditSpec& spec, std::size_t cond_idx, const Vec& xk, double k_raw,
                        const NoiseSchedule& s) {
    const auto [alpha, sigma] = s.alpha_sigma(k_raw);
    const auto& mix = spec.mixtures.at(cond_idx);
    Vec log_terms, vars;
    diffused_log_terms(mix, xk, alpha, sigma, log_terms, vars);
    const double m = *std::max_element(log_terms.begin(), log_terms.end());
    double z = 0.0;
    for (double lt : log_terms) z += std::exp(lt - m);

    // eps* = -sigma grad log q = sigma * sum_i r_i (xk - alpha mu_i)/v_i.
    Vec out(xk.size(), 0.0);
    for (std::size_t i = 0; i < mix.size(); ++i) {
        const double r = std::exp(log_terms[i] - m) / z;
        const double coef = sigma * r / vars[i];
        for (std::size_t j = 0; j < xk.size(); ++j)
            out[j] += coef * (xk[j] - alpha * mix[i].mean[j]);
    }
    return out;
}

Vec TargetScript::position_at(double time) const {
    if (waypoints.empty()) throw ValidationError("TargetScript: no waypoints");
    if (!moving() || time <= 0.0) return waypoints[0];
    double remaining = speed * time;
    for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
        const Vec& a = waypoints[i];
        const Vec& b = waypoints[i + 1];
        const double dx = b[0] - a[0];
        const double dy = b[1] - a[1];
        const double seg = std::sqrt(dx * dx + dy * dy);
        if (remaining <= seg) {
            const double t = seg > 0.0 ? remaining / seg : 0.0;
            return {a[0] + t * dx, a[1] + t * dy};
        }
        remaining -= seg;
    }
    return waypoints.back();
}

Reach2D::Reach2D(Reach2DSpec spec) : spec_(std::move(spec)) {
    if (spec_.agent_start.size() != 2) throw DimensionError("Reach2D: agent_start must be 2D");
    if (!(spec_.capture_radius > 0.0)) throw ValidationError("Reach2D: capture radius > 0 required");
    if (spec_.horizon < 1) throw ValidationError("Reach2D: horizon > 0 required");
    reset();
}

void Reach2D::reset() {
    agent_ = spec_.agent_start;
    time_ = 0.0;
    steps_ = 0;
    done_ = false;
    success_ = false;
    refresh_target();
}

void Reach2D::refresh_target() { target_ = spec_.script.position_at(time_); }

void Reach2D::advance_time(double seconds) {
    if (seconds < 0.0) throw ValidationError("Reach2D::advance_time: negative duration");
    time_ += seconds;
    refresh_target();
}

StepResult Reach2D::step(const Vec& action) {
    if (action.size() != 2) throw DimensionError("Reach2D::step: action must be 2D");
    require_finite(action, "Reach2D action");
    if (done_) return {true, success_};

    double ax = action[0];
    double ay = action[1];
    const double speed = std::sqrt(ax * ax + ay * ay);
    if (speed > spec_.v_max) {
        ax *= spec_.v_max / speed;
        ay *= spec_.v_max / speed;
    }
    agent_[0] += ax * spec_.dt;
    agent_[1] += ay * spec_.dt;
    time_ += spec_.dt;
    ++steps_;
    refresh_target();

    const double dx = agent_[0] - target_[0];
    const double dy = agent_[1] - target_[1];
    if (std::sqrt(dx * dx + dy * dy) <= spec_.capture_radius) {
        done_ = true;
        success_ = true;
    } else if (steps_ >= spec_.horizon) {
        done_ = true;
    }
    return {done_, success_};
}

Vec Reach2D::state() const { return {agent_[0], agent_[1], target_[0], target_[1]}; }

ScriptedExpert::ScriptedExpert(const Reach2DSpec& spec, Rng& rng) : spec_(spec) {
    if (spec.has_obstacle) side_ = rng.uniform01() < 0.5 ? -1 : 1;
}

Vec ScriptedExpert::action(const Reach2D& env) const {
    const Vec& agent = env.agent();
    const Vec& target = env.target();
    double gx = target[0];
    double gy = target[1];

    if (spec_.has_obstacle && side_ != 0) {
        // Detour when the straight segment to the target crosses the disc.
        const double ox = spec_.obstacle_center[0];
        const double oy = spec_.obstacle_center[1];
        const double dx = target[0] - agent[0];
        const double dy = target[1] - agent[1];
        const double len2 = dx * dx + dy * dy;
        if (len2 > 1e-12) {
            const double t = ((ox - agent[0]) * dx + (oy - agent[1]) * dy) / len2;
            if (t > 0.0 && t < 1.0) {
                const double px = agent[0] + t * dx - ox;
                const double py = agent[1] + t * dy - oy;
                if (std::sqrt(px * px + py * py) < spec_.obstacle_radius) {
                    const double len = std::sqrt(len2);
                    const double nx = -dy / len;
                    const double ny = dx / len;
                    const double off = 1.6 * spec_.obstacle_radius;
                    gx = ox + side_ * off * nx;
                    gy = oy + side_ * off * ny;
                }
            }
        }
    }

    constexpr double kGain = 8.0;
    double vx = kGain * (gx - agent[0]);
    double vy = kGain * (gy - agent[1]);
    const double speed = std::sqrt(vx * vx + vy * vy);
    if (speed > spec_.v_max) {
        vx *= spec_.v_max / speed;
        vy *= spec_.v_max / speed;
    }
    return {vx, vy};
}

double calibrate_latency(const Reach2DSpec& spec, std::size_t nfe_slow, std::size_t nfe_fast,
                         double overhead) {
    if (nfe_slow <= nfe_fast)
        throw CalibrationError("calibrate_latency: nfe_slow must exceed nfe_fast");
    const double speed = spec.script.speed;
    if (!(speed > 0.0) || !spec.script.moving())
        throw CalibrationError("calibrate_latency: target must be moving");
    const double radius = spec.capture_radius;

    auto slow_outrun = [&](double c) {
        return speed * (overhead + c * static_cast<double>(nfe_slow)) > radius;
    };
    auto fast_fresh = [&](double c) {
        return speed * (overhead + c * static_cast<double>(nfe_fast)) < 0.5 * radius;
    };

    double lo = 0.0;
    double hi = 1e-6;
    while (!slow_outrun(hi)) {
        hi *= 2.0;
        if (hi > 1e6) throw CalibrationError("calibrate_latency: no separating cost in range");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (slow_outrun(mid))
            hi = mid;
        else
            lo = mid;
    }
    if (!fast_fresh(hi))
        throw CalibrationError("calibrate_latency: fast policy staleness exceeds half the radius");
    return hi;
}

} // namespace odp
