#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ptrac/model_state.hpp"
#include "ptrac/partition.hpp"

namespace ptrac {

/// Random numbers consumed by one outer timestep.
struct RandomBatch {
    std::vector<double> convection; // [np], uniform [0, 1)
    std::vector<double> diff_meso;  // [3 np], standard normal
    std::vector<double> diff_turb;  // [3 np], standard normal

    void resize(std::size_t np);
    std::size_t np() const noexcept { return convection.size(); }
};

struct RngState {
    RngMode mode = RngMode::faithful;
    std::uint64_t seed_global = 0;
    std::vector<std::uint64_t> device_gens; // splitmix64 state per device
};

/// Seed of the generator owned by one device of one rank.
constexpr std::uint64_t rng_seed_for(std::uint64_t mpi_rank,
                                     std::uint64_t device_id) noexcept
{
    return mpi_rank + 83 * device_id;
}

/// One splitmix64 step; returns (output, next state).
constexpr std::pair<std::uint64_t, std::uint64_t>
splitmix64_next(std::uint64_t state) noexcept
{
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return {z ^ (z >> 31), state};
}

/// Maps a 64-bit integer to [0, 1) using its top 53 bits.
constexpr double to_unit(std::uint64_t x) noexcept
{
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Throws ArgumentError when num_devices < 1.
RngState module_rng_init(const Control& ctl, int num_devices);

enum class RngStream : std::uint64_t { convection = 0, turb = 1, meso = 2 };

/// Key of one counter-mode scalar: step in bits 0-31, particle in bits
/// 32-55, stream * 4 + component in bits 56-63.
constexpr std::uint64_t counter_key(std::uint64_t step, std::uint64_t i,
                                    RngStream stream,
                                    std::uint64_t component) noexcept
{
    return (step & 0xFFFFFFFFULL) | ((i & 0xFFFFFFULL) << 32) |
           (((static_cast<std::uint64_t>(stream) * 4 + component) & 0xFFULL)
            << 56);
}

/// Counter-mode uniform for one key.
double counter_uniform(std::uint64_t seed_global, std::uint64_t step,
                       std::uint64_t i, RngStream stream,
                       std::uint64_t component) noexcept;

/// Counter-mode standard normal: Box-Muller on the uniforms of component
/// and component + 1.
double counter_normal(std::uint64_t seed_global, std::uint64_t step,
                      std::uint64_t i, RngStream stream,
                      std::uint64_t component) noexcept;

/// Fills the batch entries of particles in `range` for one timestep.
///
/// Faithful mode draws sequentially from the generator of `device_id`:
/// per ascending particle one convection uniform, then the turbulent
/// triple, then the mesoscale triple. Normals come in Box-Muller pairs; the
/// spare is used by the next normal draw and dropped when the call returns.
///
/// Counter mode derives every value from (seed_global, step_index, i,
/// stream, component) alone, so the result does not depend on how the
/// particles are split among devices.
///
/// Throws BoundsError when the range exceeds the batch.
void generate_random_nums(RngState& rng, std::uint64_t step_index,
                          const WorkRange& range, int device_id,
                          RandomBatch& batch);

} // namespace ptrac
