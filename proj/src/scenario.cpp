#include "ptrac/scenario.hpp"

#include <cmath>
#include <numbers>

#include "ptrac/ingest.hpp"
#include "ptrac/output.hpp"
#include "ptrac/physics.hpp"
#include "ptrac/rng.hpp"

namespace ptrac::scenario {

namespace {

constexpr double deg2rad = std::numbers::pi / 180.0;

template <class F>
void fill(MeteoField& met, F&& f)
{
    for (std::size_t ix = 0; ix < met.nx(); ++ix) {
        for (std::size_t iy = 0; iy < met.ny(); ++iy) {
            for (std::size_t iz = 0; iz < met.nz(); ++iz) {
                f(met.index(ix, iy, iz), met.lons[ix], met.lats[iy],
                  met.levs[iz]);
            }
        }
    }
}

} // namespace

MeteoField global_grid(double t_met)
{
    MeteoField met;
    met.t_met = t_met;
    for (int k = 0; k < 36; ++k) {
        met.lons.push_back(10.0 * k);
    }
    for (int k = 0; k <= 18; ++k) {
        met.lats.push_back(-90.0 + 10.0 * k);
    }
    met.levs = {1000.0, 850.0, 700.0, 500.0, 300.0,
                200.0,  100.0, 50.0,  20.0,  10.0};
    met.resize_fields();
    return met;
}

MeteoField analytic_met(double t_met, double phase)
{
    auto met = global_grid(t_met);
    fill(met, [&](std::size_t i, double lon, double lat, double p) {
        const double cl = std::cos(lat * deg2rad);
        const double jet = std::exp(-std::pow(std::log(p / 250.0), 2));
        met.u[i] = (10.0 + 30.0 * jet) * cl * (1.0 + 0.2 * std::sin(phase));
        met.v[i] = 5.0 * std::sin(2.0 * lon * deg2rad + phase) * cl;
        met.w[i] = 1e-3 * std::sin(lon * deg2rad - phase) *
                   std::sin(2.0 * lat * deg2rad);
        met.T[i] = 288.0 * std::pow(p / 1000.0, 0.19) - 10.0 * (1.0 - cl);
    });
    return met;
}

MeteoField solid_body_met(double t_met, double omega)
{
    auto met = global_grid(t_met);
    fill(met, [&](std::size_t i, double, double lat, double) {
        met.u[i] = omega * phys::earth_radius * std::cos(lat * deg2rad);
        met.T[i] = 250.0;
    });
    return met;
}

ParticleEnsemble random_ensemble(const Control& ctl, std::size_t np,
                                 std::uint64_t seed, int group_slot)
{
    auto ens = ensemble_allocate(ctl, np);
    std::uint64_t state = seed;
    auto uniform = [&state] {
        const auto [value, next] = splitmix64_next(state);
        state = next;
        return to_unit(value);
    };
    for (std::size_t i = 0; i < np; ++i) {
        ens.time[i] = ctl.t_start;
        ens.lon[i] = -180.0 + 360.0 * uniform();
        ens.lat[i] = std::asin(2.0 * uniform() - 1.0) / deg2rad;
        ens.p[i] = 900.0 - 850.0 * uniform();
        if (group_slot >= 0 && group_slot < ens.nq()) {
            ens.q[static_cast<std::size_t>(group_slot)][i] =
                static_cast<double>(i % 4);
        }
    }
    return ens;
}

void write_inputs(const std::filesystem::path& dir, const Control& ctl,
                  const Spec& spec)
{
    std::filesystem::create_directories(dir);
    for (int k = 0; k < spec.met_snapshots; ++k) {
        const double t = ctl.t_start + k * spec.met_dt;
        write_met(analytic_met(t, 0.5 * k), dir / ("met_" + std::to_string(k) + ".txt"));
    }
    write_atm(random_ensemble(ctl, spec.np, spec.seed, ctl.ens_q), dir / "atm.csv");
}

} // namespace ptrac::scenario
