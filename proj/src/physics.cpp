#include "ptrac/physics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "ptrac/errors.hpp"
#include "ptrac/ingest.hpp"

namespace ptrac {

namespace {

constexpr double deg2rad = std::numbers::pi / 180.0;

// Lower node index and upper-node weight on an increasing axis.
std::pair<std::size_t, double> bracket_up(const std::vector<double>& a,
                                          double x)
{
    const auto n = a.size();
    auto hi = static_cast<std::size_t>(
        std::upper_bound(a.begin(), a.end(), x) - a.begin());
    hi = std::clamp<std::size_t>(hi, 1, n - 1);
    const auto lo = hi - 1;
    return {lo, std::clamp((x - a[lo]) / (a[hi] - a[lo]), 0.0, 1.0)};
}

// Same for a strictly decreasing axis.
std::pair<std::size_t, double> bracket_down(const std::vector<double>& a,
                                            double x)
{
    const auto n = a.size();
    auto hi = static_cast<std::size_t>(
        std::upper_bound(a.begin(), a.end(), x, std::greater<>()) - a.begin());
    hi = std::clamp<std::size_t>(hi, 1, n - 1);
    const auto lo = hi - 1;
    return {lo, std::clamp((x - a[lo]) / (a[hi] - a[lo]), 0.0, 1.0)};
}

double trilinear(const MeteoField& met, const std::vector<double>& f,
                 const CellLocation& c)
{
    auto at = [&](std::size_t dx, std::size_t dy, std::size_t dz) {
        return f[met.index(c.ix + dx, c.iy + dy, c.iz + dz)];
    };
    auto lerp = [](double a, double b, double w) { return a + w * (b - a); };
    const double c00 = lerp(at(0, 0, 0), at(1, 0, 0), c.wx);
    const double c10 = lerp(at(0, 1, 0), at(1, 1, 0), c.wx);
    const double c01 = lerp(at(0, 0, 1), at(1, 0, 1), c.wx);
    const double c11 = lerp(at(0, 1, 1), at(1, 1, 1), c.wx);
    return lerp(lerp(c00, c10, c.wy), lerp(c01, c11, c.wy), c.wz);
}

// Population standard deviation over the 8 corner nodes of a cell.
double cell_stddev(const MeteoField& met, const std::vector<double>& f,
                   const CellLocation& c)
{
    std::array<double, 8> vals{};
    std::size_t k = 0;
    for (std::size_t dx = 0; dx < 2; ++dx) {
        for (std::size_t dy = 0; dy < 2; ++dy) {
            for (std::size_t dz = 0; dz < 2; ++dz) {
                vals[k++] = f[met.index(c.ix + dx, c.iy + dy, c.iz + dz)];
            }
        }
    }
    double mean = 0.0;
    for (const double x : vals) {
        mean += x;
    }
    mean /= 8.0;
    double var = 0.0;
    for (const double x : vals) {
        var += (x - mean) * (x - mean);
    }
    return std::sqrt(var / 8.0);
}

void check_range(const ParticleEnsemble& ens, const WorkRange& range)
{
    if (range.start > range.end || range.end > ens.np) {
        throw BoundsError("work range [" + std::to_string(range.start) + ", " +
                          std::to_string(range.end) + ") outside ensemble of " +
                          std::to_string(ens.np));
    }
}

} // namespace

CellLocation locate_cell(const MeteoField& met, double lon, double lat,
                         double p)
{
    const double lon0 = met.lons.front();
    if (lon < lon0 || lon >= lon0 + 360.0) {
        lon = lon0 + std::fmod(lon - lon0, 360.0);
        if (lon < lon0) {
            lon += 360.0;
        }
    }
    CellLocation c;
    std::tie(c.ix, c.wx) = bracket_up(met.lons, lon);
    std::tie(c.iy, c.wy) = bracket_up(met.lats, lat);
    std::tie(c.iz, c.wz) = bracket_down(met.levs, p);
    return c;
}

MetSample interpolate_snapshot(const MeteoField& met, double lon, double lat,
                               double p)
{
    const auto c = locate_cell(met, lon, lat, p);
    return {trilinear(met, met.u, c), trilinear(met, met.v, c),
            trilinear(met, met.w, c), trilinear(met, met.T, c)};
}

MetSample interpolate_met(const MeteoField& met0, const MeteoField& met1,
                          double t, double lon, double lat, double p)
{
    const auto s0 = interpolate_snapshot(met0, lon, lat, p);
    if (met1.t_met == met0.t_met) {
        return s0;
    }
    const auto s1 = interpolate_snapshot(met1, lon, lat, p);
    const double w =
        std::clamp((t - met0.t_met) / (met1.t_met - met0.t_met), 0.0, 1.0);
    auto lerp = [w](double a, double b) { return a + w * (b - a); };
    return {lerp(s0.u, s1.u), lerp(s0.v, s1.v), lerp(s0.w, s1.w),
            lerp(s0.T, s1.T)};
}

double stokes_velocity(double radius, double density, double rho_air) noexcept
{
    return 2.0 * radius * radius * (density - rho_air) * phys::g0 /
           (9.0 * phys::air_viscosity);
}

double lon_deg_per_m(double lat) noexcept
{
    const double a = std::min(std::abs(lat), phys::max_abs_lat);
    return phys::deg_per_m / std::cos(a * deg2rad);
}

void module_timesteps(const Control& ctl, const ParticleEnsemble& ens,
                      double t_next, const WorkRange& range, DtArray& dt)
{
    check_range(ens, range);
    if (t_next > ctl.t_stop + ctl.dt_model) {
        throw ArgumentError("module_timesteps: t_next beyond t_stop + dt");
    }
    if (dt.dt.size() != ens.np) {
        throw BoundsError("dt array length does not match ensemble");
    }
    for (std::size_t i = range.start; i < range.end; ++i) {
        const double step = std::min(ctl.dt_model, ctl.t_stop - ens.time[i]);
        dt.dt[i] = std::clamp(step, 0.0, ctl.dt_model);
    }
}

void module_advection(const Control&, ParticleEnsemble& ens,
                      const MeteoField& met0, const MeteoField& met1,
                      const DtArray& dt, const WorkRange& range)
{
    check_range(ens, range);
    for (std::size_t i = range.start; i < range.end; ++i) {
        const double h = dt.dt[i];
        if (h <= 0.0) {
            continue;
        }
        const double t = ens.time[i];
        const double lon = ens.lon[i];
        const double lat = ens.lat[i];
        const double p = ens.p[i];

        const auto w0 = interpolate_met(met0, met1, t, lon, lat, p);
        const double half = 0.5 * h;
        const double lon_m = lon + w0.u * half * lon_deg_per_m(lat);
        const double lat_m = lat + w0.v * half * phys::deg_per_m;
        const double p_m = p + w0.w * half;

        const auto wm = interpolate_met(met0, met1, t + half, lon_m, lat_m, p_m);
        ens.lon[i] = lon + wm.u * h * lon_deg_per_m(lat_m);
        ens.lat[i] = lat + wm.v * h * phys::deg_per_m;
        ens.p[i] = p + wm.w * h;
        ens.time[i] = t + h;
    }
}

void module_diffusion_turb(const Control& ctl, ParticleEnsemble& ens,
                           const MeteoField& met0, const MeteoField& met1,
                           const DtArray& dt, const RandomBatch& rnd,
                           const WorkRange& range)
{
    check_range(ens, range);
    if (ctl.turb_dx <= 0.0 && ctl.turb_dz <= 0.0) {
        return;
    }
    for (std::size_t i = range.start; i < range.end; ++i) {
        const double h = dt.dt[i];
        if (h <= 0.0) {
            continue;
        }
        const double* xi = &rnd.diff_turb[3 * i];
        if (ctl.turb_dx > 0.0) {
            const double sx = std::sqrt(2.0 * ctl.turb_dx * h);
            const double lat = ens.lat[i];
            ens.lon[i] += sx * xi[0] * lon_deg_per_m(lat);
            ens.lat[i] += sx * xi[1] * phys::deg_per_m;
        }
        if (ctl.turb_dz > 0.0) {
            const double dz = std::sqrt(2.0 * ctl.turb_dz * h) * xi[2];
            const auto m = interpolate_met(met0, met1, ens.time[i], ens.lon[i],
                                           ens.lat[i], ens.p[i]);
            const double rho = air_density(ens.p[i], m.T);
            ens.p[i] -= rho * phys::g0 * dz / 100.0;
        }
    }
}

void module_diffusion_meso(const Control& ctl, ParticleEnsemble& ens,
                           const MeteoField& met0, const MeteoField& met1,
                           const DtArray& dt, const RandomBatch& rnd,
                           CacheState& cache, const WorkRange& range)
{
    (void)met1;
    check_range(ens, range);
    if (ctl.turb_meso <= 0.0) {
        return;
    }
    for (std::size_t i = range.start; i < range.end; ++i) {
        const double h = dt.dt[i];
        if (h <= 0.0) {
            continue;
        }
        const double r = std::clamp(1.0 - 2.0 * h / ctl.met_dt, 0.0, 1.0);
        const double innov = std::sqrt(1.0 - r * r);
        const auto c = locate_cell(met0, ens.lon[i], ens.lat[i], ens.p[i]);
        const std::array<const std::vector<double>*, 3> fields = {
            &met0.u, &met0.v, &met0.w};
        for (std::size_t k = 0; k < 3; ++k) {
            const double sigma = ctl.turb_meso * cell_stddev(met0, *fields[k], c);
            auto& pert = cache.uvwp[k][i];
            pert = r * pert + innov * sigma * rnd.diff_meso[3 * i + k];
        }
        const double lat = ens.lat[i];
        ens.lon[i] += cache.uvwp[0][i] * h * lon_deg_per_m(lat);
        ens.lat[i] += cache.uvwp[1][i] * h * phys::deg_per_m;
        ens.p[i] += cache.uvwp[2][i] * h;
    }
}

void module_convection(const Control& ctl, ParticleEnsemble& ens,
                       const DtArray& dt, const RandomBatch& rnd,
                       const WorkRange& range)
{
    check_range(ens, range);
    if (ctl.conv_prob <= 0.0) {
        return;
    }
    for (std::size_t i = range.start; i < range.end; ++i) {
        if (dt.dt[i] <= 0.0 || ens.p[i] <= ctl.conv_p_top) {
            continue;
        }
        const double r = rnd.convection[i];
        if (r < ctl.conv_prob) {
            ens.p[i] = ctl.conv_p_top +
                       (r / ctl.conv_prob) * (ctl.p_surf - ctl.conv_p_top);
        }
    }
}

void module_sedi(const Control& ctl, ParticleEnsemble& ens,
                 const MeteoField& met0, const MeteoField& met1,
                 const DtArray& dt, const WorkRange& range)
{
    check_range(ens, range);
    if (ctl.sedi_radius <= 0.0) {
        return;
    }
    for (std::size_t i = range.start; i < range.end; ++i) {
        const double h = dt.dt[i];
        if (h <= 0.0) {
            continue;
        }
        const auto m = interpolate_met(met0, met1, ens.time[i], ens.lon[i],
                                       ens.lat[i], ens.p[i]);
        const double rho = air_density(ens.p[i], m.T);
        const double vs = stokes_velocity(ctl.sedi_radius, ctl.sedi_density, rho);
        ens.p[i] += rho * phys::g0 * vs * h / 100.0;
    }
}

void module_isosurf_init(const Control& ctl, const ParticleEnsemble& ens,
                         const MeteoField& met0, const MeteoField& met1,
                         CacheState& cache, const WorkRange& range)
{
    check_range(ens, range);
    if (cache.iso_var.size() != ens.np) {
        throw BoundsError("cache length does not match ensemble");
    }
    switch (ctl.isosurf_mode) {
    case IsosurfMode::off:
        return;
    case IsosurfMode::pressure:
        for (std::size_t i = range.start; i < range.end; ++i) {
            cache.iso_var[i] = ens.p[i];
        }
        return;
    case IsosurfMode::theta:
        for (std::size_t i = range.start; i < range.end; ++i) {
            const auto m = interpolate_met(met0, met1, ens.time[i], ens.lon[i],
                                           ens.lat[i], ens.p[i]);
            cache.iso_var[i] = m.T * std::pow(1000.0 / ens.p[i], phys::kappa);
        }
        return;
    }
}

std::size_t module_isosurf(const Control& ctl, ParticleEnsemble& ens,
                           const MeteoField& met0, const MeteoField& met1,
                           const CacheState& cache, const WorkRange& range)
{
    check_range(ens, range);
    std::size_t unconverged = 0;
    switch (ctl.isosurf_mode) {
    case IsosurfMode::off:
        break;
    case IsosurfMode::pressure:
        for (std::size_t i = range.start; i < range.end; ++i) {
            ens.p[i] = cache.iso_var[i];
        }
        break;
    case IsosurfMode::theta:
        for (std::size_t i = range.start; i < range.end; ++i) {
            const double theta = cache.iso_var[i];
            double p = ens.p[i];
            bool converged = false;
            for (int it = 0; it < 10; ++it) {
                const auto m = interpolate_met(met0, met1, ens.time[i],
                                               ens.lon[i], ens.lat[i], p);
                const double next =
                    1000.0 * std::pow(m.T / theta, 1.0 / phys::kappa);
                const double delta = next - p;
                p = next;
                if (std::abs(delta) < 0.1) {
                    converged = true;
                    break;
                }
            }
            if (!converged) {
                ++unconverged;
            }
            ens.p[i] = p;
        }
        break;
    }
    return unconverged;
}

void module_position(const Control& ctl, ParticleEnsemble& ens,
                     const WorkRange& range)
{
    check_range(ens, range);
    for (std::size_t i = range.start; i < range.end; ++i) {
        double lat = ens.lat[i];
        double lon = ens.lon[i];
        while (std::abs(lat) > 90.0) {
            lat = std::copysign(180.0 - std::abs(lat), lat);
            lon += 180.0;
        }
        ens.lat[i] = lat;
        ens.lon[i] = wrap_lon(lon);
        ens.p[i] = std::clamp(ens.p[i], ctl.p_top, ctl.p_surf);
    }
}

void module_meteo(const Control& ctl, ParticleEnsemble& ens,
                  const MeteoField& met0, const MeteoField& met1,
                  const ClimData& clim, const WorkRange& range)
{
    check_range(ens, range);
    if (!ctl.meteo || ens.nq() < qslot::num_fixed) {
        return;
    }
    for (std::size_t i = range.start; i < range.end; ++i) {
        const auto m = interpolate_met(met0, met1, ens.time[i], ens.lon[i],
                                       ens.lat[i], ens.p[i]);
        ens.q[qslot::temperature][i] = m.T;
        ens.q[qslot::u][i] = m.u;
        ens.q[qslot::v][i] = m.v;
        ens.q[qslot::hno3][i] = clim.hno3(ens.lat[i], ens.p[i]);
        ens.q[qslot::strat][i] =
            ens.p[i] < clim.p_trop(ens.lat[i]) ? 1.0 : 0.0;
    }
}

} // namespace ptrac
