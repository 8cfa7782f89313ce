#include "odp/schedule.hpp"

#include <cmath>
#include <string>

namespace odp {

const char* regime_name(Regime r) {
    return r == Regime::DdpmDiscrete ? "ddpm" : "edm";
}

Regime regime_from_name(const std::string& name) {
    if (name == "ddpm") return Regime::DdpmDiscrete;
    if (name == "edm") return Regime::EdmContinuous;
    throw ConfigError("unknown regime '" + name + "' (expected ddpm or edm)");
}

NoiseSchedule NoiseSchedule::ddpm_cosine(int K, double s, double beta_cap) {
    if (K < 1) throw ConfigError("ddpm schedule: K must be >= 1");
    NoiseSchedule sched;
    sched.regime = Regime::DdpmDiscrete;
    sched.K = K;
    sched.cosine_s = s;
    sched.beta_cap = beta_cap;

    const double half_pi = std::acos(0.0);
    auto f = [&](double k) {
        const double u = (k / K + s) / (1.0 + s) * half_pi;
        const double c = std::cos(u);
        return c * c;
    };
    const double f0 = f(0.0);

    sched.alpha_bar.assign(static_cast<std::size_t>(K) + 1, 0.0);
    sched.alpha_bar[0] = 1.0;
    double prev_raw = 1.0;
    double acc = 1.0;
    for (int k = 1; k <= K; ++k) {
        const double raw = f(static_cast<double>(k)) / f0;
        double beta = 1.0 - raw / prev_raw;
        if (beta > beta_cap) beta = beta_cap;
        acc *= 1.0 - beta;
        sched.alpha_bar[static_cast<std::size_t>(k)] = acc;
        prev_raw = raw;
    }
    return sched;
}

NoiseSchedule NoiseSchedule::edm(double sigma_min, double sigma_max, double rho, double sigma_data) {
    if (!(sigma_min > 0.0) || !(sigma_max > sigma_min))
        throw ConfigError("edm schedule: need 0 < sigma_min < sigma_max");
    NoiseSchedule sched;
    sched.regime = Regime::EdmContinuous;
    sched.sigma_min = sigma_min;
    sched.sigma_max = sigma_max;
    sched.rho = rho;
    sched.sigma_data = sigma_data;
    return sched;
}

std::pair<double, double> NoiseSchedule::alpha_sigma(double k) const {
    if (!std::isfinite(k)) throw DomainError("alpha_sigma: non-finite k");
    if (regime == Regime::DdpmDiscrete) {
        const double r = std::round(k);
        if (std::abs(k - r) > 1e-9) throw DomainError("alpha_sigma: ddpm k must be an integer");
        const int ki = static_cast<int>(r);
        if (ki < 0 || ki > K)
            throw DomainError("alpha_sigma: k=" + std::to_string(ki) + " outside [0, " +
                              std::to_string(K) + "]");
        const double ab = alpha_bar[static_cast<std::size_t>(ki)];
        return {std::sqrt(ab), std::sqrt(1.0 - ab)};
    }
    if (!(k > 0.0)) throw DomainError("alpha_sigma: edm sigma must be positive");
    return {1.0, k};
}

double NoiseSchedule::beta(int k) const {
    if (regime != Regime::DdpmDiscrete) throw DomainError("beta: ddpm regime only");
    if (k < 1 || k > K) throw DomainError("beta: k outside [1, K]");
    return 1.0 - alpha_bar[static_cast<std::size_t>(k)] / alpha_bar[static_cast<std::size_t>(k - 1)];
}

Vec edm_sigma_grid(const NoiseSchedule& s, int n) {
    if (s.regime != Regime::EdmContinuous) throw ConfigError("edm_sigma_grid: edm regime only");
    if (n < 2) throw ConfigError("edm_sigma_grid: need n >= 2");
    const double inv_rho = 1.0 / s.rho;
    const double a = std::pow(s.sigma_max, inv_rho);
    const double b = std::pow(s.sigma_min, inv_rho);
    Vec grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        grid[static_cast<std::size_t>(i)] = std::pow(a + t * (b - a), s.rho);
    }
    return grid;
}

double LambdaWeight::operator()(double sigma) const {
    if (rule == LambdaRule::Unit) return 1.0;
    if (!(sigma > 0.0)) throw SingularityError("LambdaWeight: sigma must be positive");
    const double num = sigma * sigma + sigma_data * sigma_data;
    const double den = sigma * sigma_data;
    return num / (den * den);
}

KRule KRule::uniform_int(int lo, int hi) {
    if (lo > hi || lo < 1) throw ConfigError("KRule: need 1 <= lo <= hi");
    KRule r;
    r.kind = Kind::UniformInt;
    r.lo = lo;
    r.hi = hi;
    return r;
}

KRule KRule::log_normal(double mu, double sd) {
    if (!(sd > 0.0)) throw ConfigError("KRule: log-normal sd must be positive");
    KRule r;
    r.kind = Kind::LogNormal;
    r.mu = mu;
    r.sd = sd;
    return r;
}

double KRule::draw(Rng& rng) const {
    if (kind == Kind::UniformInt) return static_cast<double>(rng.uniform_int(lo, hi));
    return std::exp(mu + sd * rng.normal());
}

} // namespace odp
