#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ptrac {

enum class IsosurfMode { off = 0, pressure = 1, theta = 2 };
enum class RngMode { faithful, counter };

/// Fixed meaning of the first quantity slots.
namespace qslot {
inline constexpr int temperature = 0;
inline constexpr int u = 1;
inline constexpr int v = 2;
inline constexpr int hno3 = 3;
inline constexpr int strat = 4;
inline constexpr int num_fixed = 5;
} // namespace qslot

/// Model control parameters. Defaults satisfy every invariant checked by
/// validate_control().
struct Control {
    std::size_t np_max = 1'000'000;
    int nq = qslot::num_fixed;

    double t_start = 0.0;     // s
    double t_stop = 86400.0;  // s
    double dt_model = 180.0;  // s
    double met_dt = 21600.0;  // s

    double turb_dx = 50.0;    // m^2/s
    double turb_dz = 0.0;     // m^2/s
    double turb_meso = 0.16;  // [0, 1]

    double conv_prob = 0.0;
    double conv_p_top = 200.0; // hPa

    double p_surf = 1000.0;   // hPa
    double p_top = 10.0;      // hPa

    double sedi_radius = 0.0;      // m
    double sedi_density = 1000.0;  // kg/m^3

    IsosurfMode isosurf_mode = IsosurfMode::off;
    bool meteo = true;

    int mpi_rank = 0;
    int num_devices_requested = -1;
    RngMode rng_mode = RngMode::faithful;
    std::uint64_t rng_seed_global = 0;

    double output_dt = 3600.0; // s
    int grid_nx = 36;          // 0 disables gridded output
    int grid_ny = 18;
    int ens_q = -1;            // quantity slot holding group ids, -1 disables
};

/// Returns one message per violated invariant; empty when valid.
std::vector<std::string> validate_control(const Control& ctl);

/// Structure-of-arrays particle state.
struct ParticleEnsemble {
    std::size_t np = 0;
    std::vector<double> time; // s
    std::vector<double> p;    // hPa
    std::vector<double> zeta;
    std::vector<double> lon;  // deg, [-180, 180)
    std::vector<double> lat;  // deg, [-90, 90]
    std::vector<std::vector<double>> q; // [nq][np]

    int nq() const noexcept { return static_cast<int>(q.size()); }

    /// True when every per-particle array has length np.
    bool consistent() const noexcept;
};

/// Zero-initialised ensemble of np particles. Throws CapacityError when
/// np > ctl.np_max.
ParticleEnsemble ensemble_allocate(const Control& ctl, std::size_t np);

/// One gridded meteorological snapshot. Levels are ordered surface first
/// (strictly decreasing pressure). Fields are stored flat with the level
/// index running fastest.
struct MeteoField {
    double t_met = 0.0;
    std::vector<double> lons;
    std::vector<double> lats;
    std::vector<double> levs;
    std::vector<double> u, v, w, T;

    std::size_t nx() const noexcept { return lons.size(); }
    std::size_t ny() const noexcept { return lats.size(); }
    std::size_t nz() const noexcept { return levs.size(); }

    std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const
        noexcept
    {
        return (ix * ny() + iy) * nz() + iz;
    }

    /// Allocates all four fields for the current grid, zero filled.
    void resize_fields();

    /// Empty string when the invariants hold, else a description.
    std::string check() const;
};

/// Climatological tables: HNO3 volume mixing ratio on a lat x p grid and
/// tropopause pressure on a lat grid.
struct ClimData {
    std::vector<double> lats;     // deg, increasing
    std::vector<double> ps;       // hPa, increasing
    std::vector<double> p_trop_tab; // [lats]
    std::vector<double> hno3_tab;   // [lats][ps]

    /// Linear lookup, clamped to the table range.
    double p_trop(double lat) const;
    /// Bilinear lookup, clamped to the table range.
    double hno3(double lat, double p) const;
};

/// Per-particle state kept across timesteps.
struct CacheState {
    std::array<std::vector<double>, 3> uvwp; // u' m/s, v' m/s, w' hPa/s
    std::vector<double> iso_var;

    void resize(std::size_t np);
};

/// Per-particle timestep of the current outer step.
struct DtArray {
    std::vector<double> dt;
};

} // namespace ptrac
