#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "odp/denoiser.hpp"
#include "odp/distill.hpp"
#include "odp/policy.hpp"
#include "odp/schedule.hpp"

namespace odp {

// Single-JSON-document checkpoint: header plus named tensors with 64-bit
// float data. Save/load round-trips bit-exactly.
struct Checkpoint {
    int version = 1;
    std::string role = "teacher"; // teacher | generator | psi
    NoiseSchedule sched;
    Normalizer norm;
    EpsNetSpec net_spec;
    Vec params;
    std::uint64_t seed = 0;
    std::uint64_t step = 0;
    std::size_t n_obs = 1;
    std::size_t t_chunk = 1;
    std::size_t action_dim = 1;
    std::size_t state_dim = 1;
    // generator role only
    std::optional<GenMode> gen_mode;
    std::optional<double> t_init_raw;
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Rebuild a ready-to-use net from checkpoint contents.
EpsNet net_from_checkpoint(const Checkpoint& ck);

// Rebuild runnable objects. policy_from_checkpoint accepts any role (a
// generator net is still a denoiser); generator_from_checkpoint requires the
// mode/t_init fields and rejects teacher checkpoints.
DiffusionPolicy policy_from_checkpoint(const Checkpoint& ck);
Generator generator_from_checkpoint(const Checkpoint& ck);

Checkpoint make_teacher_checkpoint(const EpsNet& net, const NoiseSchedule& sched,
                                   const Normalizer& norm, const Dataset& data,
                                   std::uint64_t seed, std::uint64_t step);

Checkpoint make_generator_checkpoint(const Generator& gen, const NoiseSchedule& sched,
                                     const Checkpoint& teacher, std::uint64_t seed,
                                     std::uint64_t step);

} // namespace odp
