#include "ptrac/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ptrac/errors.hpp"

namespace ptrac {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Radius factor of Box-Muller; 1 - u lies in (0, 1] so the log is finite.
double bm_radius(double u) { return std::sqrt(-2.0 * std::log1p(-u)); }

class FaithfulStream {
public:
    explicit FaithfulStream(std::uint64_t& state) : state_(state) {}

    double uniform()
    {
        const auto [value, next] = splitmix64_next(state_);
        state_ = next;
        return to_unit(value);
    }

    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = bm_radius(uniform());
        const double phi = two_pi * uniform();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

private:
    std::uint64_t& state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace

void RandomBatch::resize(std::size_t np)
{
    convection.assign(np, 0.0);
    diff_meso.assign(3 * np, 0.0);
    diff_turb.assign(3 * np, 0.0);
}

RngState module_rng_init(const Control& ctl, int num_devices)
{
    if (num_devices < 1) {
        throw ArgumentError("module_rng_init: num_devices must be >= 1, got " +
                            std::to_string(num_devices));
    }
    RngState rng;
    rng.mode = ctl.rng_mode;
    rng.seed_global = ctl.rng_seed_global;
    if (rng.mode == RngMode::faithful) {
        rng.device_gens.reserve(static_cast<std::size_t>(num_devices));
        for (int d = 0; d < num_devices; ++d) {
            rng.device_gens.push_back(
                rng_seed_for(static_cast<std::uint64_t>(ctl.mpi_rank),
                             static_cast<std::uint64_t>(d)));
        }
    }
    return rng;
}

double counter_uniform(std::uint64_t seed_global, std::uint64_t step,
                       std::uint64_t i, RngStream stream,
                       std::uint64_t component) noexcept
{
    const auto key = seed_global ^ counter_key(step, i, stream, component);
    return to_unit(splitmix64_next(key).first);
}

double counter_normal(std::uint64_t seed_global, std::uint64_t step,
                      std::uint64_t i, RngStream stream,
                      std::uint64_t component) noexcept
{
    const double u1 = counter_uniform(seed_global, step, i, stream, component);
    const double u2 =
        counter_uniform(seed_global, step, i, stream, component + 1);
    return bm_radius(u1) * std::cos(two_pi * u2);
}

void generate_random_nums(RngState& rng, std::uint64_t step_index,
                          const WorkRange& range, int device_id,
                          RandomBatch& batch)
{
    const auto np = batch.np();
    if (range.start > range.end || range.end > np ||
        batch.diff_turb.size() != 3 * np || batch.diff_meso.size() != 3 * np) {
        throw BoundsError("random batch range [" + std::to_string(range.start) +
                          ", " + std::to_string(range.end) +
                          ") outside batch of " + std::to_string(np));
    }

    if (rng.mode == RngMode::counter) {
        if (range.end > (std::size_t{1} << 24)) {
            throw BoundsError("counter RNG supports at most 2^24 particles");
        }
        const auto seed = rng.seed_global;
        for (std::size_t i = range.start; i < range.end; ++i) {
            batch.convection[i] =
                counter_uniform(seed, step_index, i, RngStream::convection, 0);
            for (std::uint64_t c = 0; c < 3; ++c) {
                batch.diff_turb[3 * i + c] =
                    counter_normal(seed, step_index, i, RngStream::turb, c);
                batch.diff_meso[3 * i + c] =
                    counter_normal(seed, step_index, i, RngStream::meso, c);
            }
        }
        return;
    }

    if (device_id < 0 ||
        static_cast<std::size_t>(device_id) >= rng.device_gens.size()) {
        throw ArgumentError("no generator for device " +
                            std::to_string(device_id));
    }
    FaithfulStream gen(rng.device_gens[static_cast<std::size_t>(device_id)]);
    for (std::size_t i = range.start; i < range.end; ++i) {
        batch.convection[i] = gen.uniform();
        for (std::size_t c = 0; c < 3; ++c) {
            batch.diff_turb[3 * i + c] = gen.normal();
        }
        for (std::size_t c = 0; c < 3; ++c) {
            batch.diff_meso[3 * i + c] = gen.normal();
        }
    }
}

} // namespace ptrac
