#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "odp/policy.hpp"
#include "odp/rng.hpp"
#include "odp/tensor.hpp"
#include "odp/workers.hpp"

namespace odp {

struct TwoSampleReport {
    double mmd = 0.0;
    double sw1 = 0.0;
    double energy = 0.0;
    // Same statistics between the two halves of the reference sample b; the
    // match threshold elsewhere is 2x these.
    double mmd_base = 0.0;
    double sw1_base = 0.0;
    double energy_base = 0.0;
    std::uint64_t proj_seed = 0;
};

// Two-sample statistics between a (candidate) and b (reference): RBF-kernel
// MMD with median-heuristic bandwidth (biased V-statistic), sliced W1 over
// n_proj random projections, and energy distance. Deterministic given the
// samples and proj_seed.
TwoSampleReport two_sample(const std::vector<Vec>& a, const std::vector<Vec>& b,
                           std::uint64_t proj_seed = 12345, std::size_t n_proj = 64);

struct EvalProtocol {
    std::size_t n_seeds = 3;
    std::size_t n_inits = 20;
};

struct EvalOutcome {
    double mean = 0.0;
    double stddev = 0.0; // across per-seed means
    std::vector<double> seed_means;
    std::vector<EpisodeRecord> episodes; // seed-major order
};

// Full (seed, init) grid of receding-horizon rollouts. Throwing rollouts are
// counted as failures, never abort the grid. Deterministic from base_seed
// regardless of the worker count.
EvalOutcome eval_success(const std::function<const Actor*(std::size_t seed_idx)>& actor_for_seed,
                         const std::function<Reach2D(std::size_t seed_idx, std::size_t init_idx)>&
                             env_factory,
                         const EvalProtocol& proto, const LatencyModel& latency, std::size_t t_act,
                         std::size_t n_obs, std::uint64_t base_seed, const WorkerPool& pool);

struct LatencyRow {
    std::string name;
    std::size_t nfe = 0;
    double wall_ms_mean = 0.0;
    double wall_ms_min = 0.0;
};

// Real wall-clock per prediction; the first call per actor is a warm-up and
// is excluded. NFE is read from instrumentation and must be identical across
// repetitions.
std::vector<LatencyRow> latency_bench(
    const std::vector<std::pair<std::string, const Actor*>>& actors, const Vec& obs,
    std::size_t repetitions, Rng& rng);

// Fixed-column CSV used by every subcommand. Missing metrics are empty.
struct CsvRow {
    std::optional<long long> step;
    std::optional<double> wall_ms;
    std::optional<double> nfe;
    std::optional<double> loss_dsm;
    std::optional<double> loss_psi;
    std::optional<double> grad_norm_theta;
    std::optional<double> mmd;
    std::optional<double> sw1;
    std::optional<double> energy;
    std::optional<double> success_mean;
    std::optional<double> success_std;
};

std::string csv_header();
std::string csv_format_row(const CsvRow& row);

class CurveWriter {
  public:
    explicit CurveWriter(const std::string& path);

    void write(const CsvRow& row);
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::ofstream out_;
};

// Reads back a CSV produced by CurveWriter; empty fields become nullopt.
std::vector<CsvRow> read_curve_csv(const std::string& path);

} // namespace odp
