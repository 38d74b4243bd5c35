#pragma once

#include <cstddef>
#include <numbers>

#include "ptrac/model_state.hpp"
#include "ptrac/partition.hpp"
#include "ptrac/rng.hpp"

namespace ptrac {

namespace phys {
inline constexpr double earth_radius = 6371000.0;     // m
inline constexpr double g0 = 9.80665;                 // m/s^2
inline constexpr double r_air = 287.058;              // J/(kg K)
inline constexpr double air_viscosity = 1.8205e-5;    // Pa s
inline constexpr double kappa = 0.2857;
inline constexpr double deg_per_m = 180.0 / (std::numbers::pi * earth_radius);
inline constexpr double max_abs_lat = 89.999;         // cos(lat) floor
} // namespace phys

struct MetSample {
    double u = 0.0; // m/s
    double v = 0.0; // m/s
    double w = 0.0; // hPa/s
    double T = 0.0; // K
};

/// Lower corner of the grid cell enclosing a position plus the fractional
/// offsets inside it. Positions outside the grid hull are clamped onto it;
/// longitudes are first shifted by whole turns towards the grid.
struct CellLocation {
    std::size_t ix = 0, iy = 0, iz = 0;
    double wx = 0.0, wy = 0.0, wz = 0.0;
};

CellLocation locate_cell(const MeteoField& met, double lon, double lat,
                         double p);

/// Trilinear interpolation inside one snapshot.
MetSample interpolate_snapshot(const MeteoField& met, double lon, double lat,
                               double p);

/// Trilinear in space within both snapshots, then linear in time. When both
/// snapshots carry the same time only met0 is used.
MetSample interpolate_met(const MeteoField& met0, const MeteoField& met1,
                          double t, double lon, double lat, double p);

/// Air density from pressure (hPa) and temperature (K).
inline double air_density(double p_hpa, double T) noexcept
{
    return 100.0 * p_hpa / (phys::r_air * T);
}

/// Stokes settling velocity (m/s) of a sphere of the given radius and
/// density in air of density rho_air.
double stokes_velocity(double radius, double density, double rho_air) noexcept;

/// Degrees of longitude per metre eastward at the given latitude, with
/// cos(lat) floored at cos(89.999 deg).
double lon_deg_per_m(double lat) noexcept;

// Every module below touches per-particle arrays only at indices inside
// `range`; disjoint ranges may be processed concurrently.

void module_timesteps(const Control& ctl, const ParticleEnsemble& ens,
                      double t_next, const WorkRange& range, DtArray& dt);

void module_advection(const Control& ctl, ParticleEnsemble& ens,
                      const MeteoField& met0, const MeteoField& met1,
                      const DtArray& dt, const WorkRange& range);

void module_diffusion_turb(const Control& ctl, ParticleEnsemble& ens,
                           const MeteoField& met0, const MeteoField& met1,
                           const DtArray& dt, const RandomBatch& rnd,
                           const WorkRange& range);

void module_diffusion_meso(const Control& ctl, ParticleEnsemble& ens,
                           const MeteoField& met0, const MeteoField& met1,
                           const DtArray& dt, const RandomBatch& rnd,
                           CacheState& cache, const WorkRange& range);

void module_convection(const Control& ctl, ParticleEnsemble& ens,
                       const DtArray& dt, const RandomBatch& rnd,
                       const WorkRange& range);

void module_sedi(const Control& ctl, ParticleEnsemble& ens,
                 const MeteoField& met0, const MeteoField& met1,
                 const DtArray& dt, const WorkRange& range);

void module_isosurf_init(const Control& ctl, const ParticleEnsemble& ens,
                         const MeteoField& met0, const MeteoField& met1,
                         CacheState& cache, const WorkRange& range);

/// Returns the number of particles whose theta iteration did not converge.
std::size_t module_isosurf(const Control& ctl, ParticleEnsemble& ens,
                           const MeteoField& met0, const MeteoField& met1,
                           const CacheState& cache, const WorkRange& range);

void module_position(const Control& ctl, ParticleEnsemble& ens,
                     const WorkRange& range);

void module_meteo(const Control& ctl, ParticleEnsemble& ens,
                  const MeteoField& met0, const MeteoField& met1,
                  const ClimData& clim, const WorkRange& range);

} // namespace ptrac
