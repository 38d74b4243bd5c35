#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ptrac/model_state.hpp"

namespace ptrac::scenario {

/// Global 10 x 10 degree grid (0..350 E, -90..90 N) on ten pressure levels
/// from 1000 to 10 hPa. All fields zero.
MeteoField global_grid(double t_met);

/// Smooth analytic flow: zonal jet with a wave-2 meridional component, weak
/// vertical motion and a standard-like temperature profile. `phase` shifts
/// the pattern so consecutive snapshots differ.
MeteoField analytic_met(double t_met, double phase);

/// Solid-body rotation about the polar axis with angular velocity omega
/// (rad/s): u = omega * Re * cos(lat), v = w = 0, isothermal 250 K.
MeteoField solid_body_met(double t_met, double omega);

/// Particles scattered pseudo-randomly over the globe between 900 and
/// 50 hPa, with quantity slot `group_slot` (if >= 0) holding group ids
/// 0..3.
ParticleEnsemble random_ensemble(const Control& ctl, std::size_t np,
                                 std::uint64_t seed, int group_slot = -1);

struct Spec {
    std::size_t np = 4096;
    int met_snapshots = 3;
    double met_dt = 21600.0;
    std::uint64_t seed = 1;
};

/// Writes met_<k>.txt snapshots and atm.csv into dir.
void write_inputs(const std::filesystem::path& dir, const Control& ctl,
                  const Spec& spec);

} // namespace ptrac::scenario
