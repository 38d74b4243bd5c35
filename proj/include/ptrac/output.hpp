#pragma once

#include <filesystem>

#include "ptrac/model_state.hpp"

namespace ptrac {

/// Writes atm_<t>.csv always, grid_<t>.csv when grid_nx * grid_ny > 0 and
/// ens_<t>.csv when a group-id slot (ctl.ens_q) is configured. Throws
/// IoError naming outdir when it is not a writable directory.
void write_output(const Control& ctl, const ParticleEnsemble& ens, double t,
                  const std::filesystem::path& outdir);

/// Output file name for one kind and model time, e.g. "atm_3600.csv".
std::string output_filename(std::string_view kind, double t);

/// Particle CSV, every value in shortest round-trip form.
void write_atm(const ParticleEnsemble& ens, const std::filesystem::path& path);

/// Bin index along one axis: floor((x - lo) / width), clamped into
/// [0, n - 1].
int grid_bin(double x, double lo, double hi, int n) noexcept;

/// Particle counts on a regular lon/lat grid over [-180, 180) x [-90, 90].
void write_grid(const Control& ctl, const ParticleEnsemble& ens,
                const std::filesystem::path& path);

/// Per-group count, mean and standard deviation of lon, lat and p.
void write_ens(const Control& ctl, const ParticleEnsemble& ens,
               const std::filesystem::path& path);

} // namespace ptrac
