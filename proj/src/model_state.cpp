#include "ptrac/model_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ptrac/errors.hpp"

namespace ptrac {

namespace {

std::string join_violations(const std::vector<std::string>& v)
{
    std::string out = "invalid control parameters:";
    for (const auto& s : v) {
        out += "\n  ";
        out += s;
    }
    return out;
}

std::string join_failures(const std::vector<DeviceErrors::Failure>& f)
{
    std::string out = "device task failure(s):";
    for (const auto& e : f) {
        out += "\n  device " + std::to_string(e.device_id) + ": " + e.message;
    }
    return out;
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

// Index of the lower node of the interval containing x on an increasing
// axis, clamped so that idx + 1 is valid. Also returns the weight of the
// upper node, clamped to [0, 1].
std::pair<std::size_t, double> bracket(const std::vector<double>& axis,
                                       double x)
{
    const auto n = axis.size();
    if (n < 2) {
        return {0, 0.0};
    }
    auto it = std::upper_bound(axis.begin(), axis.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - axis.begin());
    hi = std::clamp<std::size_t>(hi, 1, n - 1);
    const std::size_t lo = hi - 1;
    const double w = std::clamp((x - axis[lo]) / (axis[hi] - axis[lo]), 0.0,
                                1.0);
    return {lo, w};
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations))
{
}

DeviceErrors::DeviceErrors(std::vector<Failure> failures)
    : Error(join_failures(failures)), failures_(std::move(failures))
{
}

std::vector<std::string> validate_control(const Control& ctl)
{
    std::vector<std::string> out;
    auto require = [&out](bool ok, const char* rule) {
        if (!ok) {
            out.emplace_back(std::string(rule) + " violated");
        }
    };

    require(ctl.t_stop >= ctl.t_start, "t_stop >= t_start");
    require(ctl.dt_model > 0.0, "dt_model > 0");
    require(ctl.met_dt > 0.0, "met_dt > 0");
    require(ctl.turb_dx >= 0.0, "turb_dx >= 0");
    require(ctl.turb_dz >= 0.0, "turb_dz >= 0");
    require(in_unit(ctl.turb_meso), "turb_meso in [0, 1]");
    require(in_unit(ctl.conv_prob), "conv_prob in [0, 1]");
    require(ctl.p_top > 0.0, "p_top > 0");
    require(ctl.p_top < ctl.p_surf, "p_top < p_surf");
    require(ctl.conv_p_top >= ctl.p_top, "conv_p_top >= p_top");
    require(ctl.sedi_radius >= 0.0, "sedi_radius >= 0");
    require(ctl.sedi_density > 0.0, "sedi_density > 0");
    require(ctl.nq >= 0, "nq >= 0");
    require(!ctl.meteo || ctl.nq >= qslot::num_fixed,
            "nq >= 5 when meteo is enabled");
    require(ctl.mpi_rank >= 0, "mpi_rank >= 0");
    require(ctl.output_dt > 0.0, "output_dt > 0");
    require(ctl.grid_nx >= 0, "grid_nx >= 0");
    require(ctl.grid_ny >= 0, "grid_ny >= 0");
    require(ctl.ens_q < ctl.nq, "ens_q < nq");
    return out;
}

bool ParticleEnsemble::consistent() const noexcept
{
    auto ok = [this](const std::vector<double>& a) { return a.size() == np; };
    return ok(time) && ok(p) && ok(zeta) && ok(lon) && ok(lat) &&
           std::all_of(q.begin(), q.end(), ok);
}

ParticleEnsemble ensemble_allocate(const Control& ctl, std::size_t np)
{
    if (np > ctl.np_max) {
        throw CapacityError("ensemble of " + std::to_string(np) +
                            " particles exceeds np_max = " +
                            std::to_string(ctl.np_max));
    }
    ParticleEnsemble ens;
    ens.np = np;
    ens.time.assign(np, 0.0);
    ens.p.assign(np, 0.0);
    ens.zeta.assign(np, 0.0);
    ens.lon.assign(np, 0.0);
    ens.lat.assign(np, 0.0);
    ens.q.assign(static_cast<std::size_t>(std::max(ctl.nq, 0)),
                 std::vector<double>(np, 0.0));
    return ens;
}

void MeteoField::resize_fields()
{
    const auto n = nx() * ny() * nz();
    u.assign(n, 0.0);
    v.assign(n, 0.0);
    w.assign(n, 0.0);
    T.assign(n, 0.0);
}

std::string MeteoField::check() const
{
    if (nx() < 2 || ny() < 2 || nz() < 2) {
        return "grid needs at least 2 points per dimension";
    }
    if (std::adjacent_find(lons.begin(), lons.end(),
                           std::greater_equal<>()) != lons.end()) {
        return "longitudes must be strictly increasing";
    }
    if (std::adjacent_find(lats.begin(), lats.end(),
                           std::greater_equal<>()) != lats.end()) {
        return "latitudes must be strictly increasing";
    }
    if (std::adjacent_find(levs.begin(), levs.end(), std::less_equal<>()) !=
        levs.end()) {
        return "pressure levels must be strictly decreasing";
    }
    const auto n = nx() * ny() * nz();
    if (u.size() != n || v.size() != n || w.size() != n || T.size() != n) {
        return "field size does not match grid";
    }
    if (!std::all_of(T.begin(), T.end(), [](double t) { return t > 0.0; })) {
        return "temperature must be positive";
    }
    return {};
}

double ClimData::p_trop(double lat) const
{
    const auto [i, w] = bracket(lats, lat);
    return (1.0 - w) * p_trop_tab[i] + w * p_trop_tab[i + 1];
}

double ClimData::hno3(double lat, double p) const
{
    const auto [i, wy] = bracket(lats, lat);
    const auto [k, wp] = bracket(ps, p);
    const auto np = ps.size();
    auto at = [&](std::size_t a, std::size_t b) { return hno3_tab[a * np + b]; };
    return (1.0 - wy) * ((1.0 - wp) * at(i, k) + wp * at(i, k + 1)) +
           wy * ((1.0 - wp) * at(i + 1, k) + wp * at(i + 1, k + 1));
}

void CacheState::resize(std::size_t np)
{
    for (auto& c : uvwp) {
        c.assign(np, 0.0);
    }
    iso_var.assign(np, 0.0);
}

} // namespace ptrac
