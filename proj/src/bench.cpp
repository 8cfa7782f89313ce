#include "odp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace odp {

namespace {

double sq_dist(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

// Median pairwise squared distance over the pooled samples.
double median_heuristic(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    std::vector<double> d2;
    const std::size_t n = a.size() + b.size();
    d2.reserve(n * (n - 1) / 2);
    auto at = [&](std::size_t i) -> const Vec& { return i < a.size() ? a[i] : b[i - a.size()]; };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d2.push_back(sq_dist(at(i), at(j)));
    if (d2.empty()) return 1.0;
    const std::size_t mid = d2.size() / 2;
    std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid), d2.end());
    const double m = d2[mid];
    return m > 0.0 ? m : 1.0;
}

double mmd_stat(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    const double m = median_heuristic(a, b);
    auto kmean = [&](const std::vector<Vec>& x, const std::vector<Vec>& y) {
        double s = 0.0;
        for (const auto& xi : x)
            for (const auto& yj : y) s += std::exp(-sq_dist(xi, yj) / m);
        return s / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
    };
    const double v = kmean(a, a) + kmean(b, b) - 2.0 * kmean(a, b);
    return std::sqrt(v > 0.0 ? v : 0.0);
}

// W1 between 1-d empirical distributions via quantile matching.
double w1_1d(Vec x, Vec y) {
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    auto quantile = [](const Vec& v, double q) {
        const double pos = q * (static_cast<double>(v.size()) - 1.0);
        const std::size_t i = static_cast<std::size_t>(pos);
        if (i + 1 >= v.size()) return v.back();
        const double frac = pos - static_cast<double>(i);
        return v[i] * (1.0 - frac) + v[i + 1] * frac;
    };
    const std::size_t q_steps = std::max(x.size(), y.size());
    double s = 0.0;
    for (std::size_t i = 0; i < q_steps; ++i) {
        const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(q_steps);
        s += std::abs(quantile(x, q) - quantile(y, q));
    }
    return s / static_cast<double>(q_steps);
}

double sliced_w1(const std::vector<Vec>& a, const std::vector<Vec>& b, std::uint64_t proj_seed,
                 std::size_t n_proj) {
    const std::size_t dim = a[0].size();
    Rng rng(proj_seed);
    double total = 0.0;
    for (std::size_t p = 0; p < n_proj; ++p) {
        Vec dir = gauss(rng, dim);
        const double nrm = norm2(dir);
        if (nrm > 0.0) scale(dir, 1.0 / nrm);
        Vec xa(a.size()), xb(b.size());
        for (std::size_t i = 0; i < a.size(); ++i) xa[i] = dot(dir, a[i]);
        for (std::size_t i = 0; i < b.size(); ++i) xb[i] = dot(dir, b[i]);
        total += w1_1d(std::move(xa), std::move(xb));
    }
    return total / static_cast<double>(n_proj);
}

double energy_stat(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    auto dmean = [](const std::vector<Vec>& x, const std::vector<Vec>& y) {
        double s = 0.0;
        for (const auto& xi : x)
            for (const auto& yj : y) s += std::sqrt(sq_dist(xi, yj));
        return s / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
    };
    const double e = 2.0 * dmean(a, b) - dmean(a, a) - dmean(b, b);
    return e > 0.0 ? e : 0.0;
}

void check_sample_set(const std::vector<Vec>& v, std::size_t dim, const char* name) {
    for (const auto& x : v) {
        if (x.size() != dim) throw DimensionError(std::string("two_sample: ragged ") + name);
        require_finite(x, std::string("two_sample ") + name);
    }
}

} // namespace

TwoSampleReport two_sample(const std::vector<Vec>& a, const std::vector<Vec>& b,
                           std::uint64_t proj_seed, std::size_t n_proj) {
    if (a.size() < 50 || b.size() < 50)
        throw ValidationError("two_sample: need at least 50 samples on each side");
    const std::size_t dim = a[0].size();
    check_sample_set(a, dim, "a");
    check_sample_set(b, dim, "b");

    TwoSampleReport rep;
    rep.proj_seed = proj_seed;
    rep.mmd = mmd_stat(a, b);
    rep.sw1 = sliced_w1(a, b, proj_seed, n_proj);
    rep.energy = energy_stat(a, b);

    const std::size_t half = b.size() / 2;
    const std::vector<Vec> b1(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(half));
    const std::vector<Vec> b2(b.begin() + static_cast<std::ptrdiff_t>(half), b.end());
    rep.mmd_base = mmd_stat(b1, b2);
    rep.sw1_base = sliced_w1(b1, b2, proj_seed, n_proj);
    rep.energy_base = energy_stat(b1, b2);
    return rep;
}

EvalOutcome eval_success(const std::function<const Actor*(std::size_t)>& actor_for_seed,
                         const std::function<Reach2D(std::size_t, std::size_t)>& env_factory,
                         const EvalProtocol& proto, const LatencyModel& latency, std::size_t t_act,
                         std::size_t n_obs, std::uint64_t base_seed, const WorkerPool& pool) {
    if (proto.n_seeds < 1 || proto.n_inits < 1)
        throw ValidationError("eval_success: protocol counts must be >= 1");

    const std::size_t total = proto.n_seeds * proto.n_inits;
    EvalOutcome out;
    out.episodes.resize(total);
    const Rng base(base_seed);

    pool.parallel_for(total, [&](std::size_t idx) {
        const std::size_t s = idx / proto.n_inits;
        const std::size_t i = idx % proto.n_inits;
        Rng ep_rng = base.derive(idx + 1);
        try {
            const Actor* actor = actor_for_seed(s);
            Reach2D env = env_factory(s, i);
            out.episodes[idx] = run_receding_horizon(*actor, env, t_act, latency, n_obs, ep_rng);
        } catch (const std::exception& e) {
            EpisodeRecord rec;
            rec.success = false;
            rec.fail_reason = e.what();
            out.episodes[idx] = std::move(rec);
            std::fprintf(stderr, "eval_success: episode (%zu, %zu) failed: %s\n", s, i, e.what());
        }
    });

    out.seed_means.resize(proto.n_seeds, 0.0);
    for (std::size_t s = 0; s < proto.n_seeds; ++s) {
        double hits = 0.0;
        for (std::size_t i = 0; i < proto.n_inits; ++i)
            hits += out.episodes[s * proto.n_inits + i].success ? 1.0 : 0.0;
        out.seed_means[s] = hits / static_cast<double>(proto.n_inits);
    }
    out.mean = mean(out.seed_means);
    if (proto.n_seeds >= 2)
        out.stddev = std::sqrt(variance(out.seed_means));
    return out;
}

std::vector<LatencyRow> latency_bench(
    const std::vector<std::pair<std::string, const Actor*>>& actors, const Vec& obs,
    std::size_t repetitions, Rng& rng) {
    if (repetitions < 1) throw ValidationError("latency_bench: need repetitions >= 1");
    using clock = std::chrono::steady_clock;

    std::vector<LatencyRow> rows;
    for (const auto& [name, actor] : actors) {
        PredictResult warm = actor->predict(obs, rng); // excluded from timing
        LatencyRow row;
        row.name = name;
        row.nfe = warm.nfe;
        double total = 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < repetitions; ++r) {
            const auto t0 = clock::now();
            const PredictResult res = actor->predict(obs, rng);
            const auto t1 = clock::now();
            if (res.nfe != row.nfe)
                throw ValidationError("latency_bench: NFE changed between repetitions");
            const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            total += ms;
            best = std::min(best, ms);
        }
        row.wall_ms_mean = total / static_cast<double>(repetitions);
        row.wall_ms_min = best;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_header() {
    return "step,wall_ms,nfe,loss_dsm,loss_psi,grad_norm_theta,mmd,sw1,energy,success_mean,"
           "success_std";
}

namespace {

void append_field(std::string& out, const std::optional<double>& v, bool leading_comma = true) {
    if (leading_comma) out += ',';
    if (v && std::isfinite(*v)) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12g", *v);
        out += buf;
    }
}

} // namespace

std::string csv_format_row(const CsvRow& row) {
    std::string out;
    if (row.step) out += std::to_string(*row.step);
    append_field(out, row.wall_ms);
    append_field(out, row.nfe);
    append_field(out, row.loss_dsm);
    append_field(out, row.loss_psi);
    append_field(out, row.grad_norm_theta);
    append_field(out, row.mmd);
    append_field(out, row.sw1);
    append_field(out, row.energy);
    append_field(out, row.success_mean);
    append_field(out, row.success_std);
    return out;
}

CurveWriter::CurveWriter(const std::string& path) : path_(path), out_(path) {
    if (!out_) throw FileError("CurveWriter: cannot open " + path);
    out_ << csv_header() << '\n';
}

void CurveWriter::write(const CsvRow& row) {
    out_ << csv_format_row(row) << '\n';
    out_.flush();
}

std::vector<CsvRow> read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("read_curve_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw FileError("read_curve_csv: empty file " + path);
    if (line != csv_header()) throw FileError("read_curve_csv: unexpected header in " + path);

    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        fields.resize(11);
        CsvRow row;
        auto num = [&](std::size_t i) -> std::optional<double> {
            if (fields[i].empty()) return std::nullopt;
            return std::stod(fields[i]);
        };
        if (!fields[0].empty()) row.step = std::stoll(fields[0]);
        row.wall_ms = num(1);
        row.nfe = num(2);
        row.loss_dsm = num(3);
        row.loss_psi = num(4);
        row.grad_norm_theta = num(5);
        row.mmd = num(6);
        row.sw1 = num(7);
        row.energy = num(8);
        row.success_mean = num(9);
        row.success_std = num(10);
        rows.push_back(row);
    }
    return rows;
}

} // namespace odp
