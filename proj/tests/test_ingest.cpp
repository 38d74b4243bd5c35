#include <gtest/gtest.h>

#include <cmath>

#include "ptrac/errors.hpp"
#include "ptrac/ingest.hpp"
#include "ptrac/output.hpp"
#include "ptrac/scenario.hpp"
#include "test_support.hpp"

namespace ptrac {
namespace {

using testing::TempDir;
using testing::write_text;

TEST(ReadCtl, MapsKeysAndKeepsDefaults)
{
    TempDir dir;
    write_text(dir / "a.ctl", "DT = 180\nT_STOP = 86400\n");
    const auto ctl = read_ctl(dir / "a.ctl");
    EXPECT_EQ(ctl.dt_model, 180.0);
    EXPECT_EQ(ctl.t_stop, 86400.0);
    EXPECT_EQ(ctl.turb_dx, Control{}.turb_dx);
}

TEST(ReadCtl, EmptyFileGivesDefaults)
{
    TempDir dir;
    write_text(dir / "e.ctl", "");
    const auto ctl = read_ctl(dir / "e.ctl");
    EXPECT_EQ(ctl.dt_model, Control{}.dt_model);
    EXPECT_EQ(ctl.np_max, Control{}.np_max);
}

TEST(ReadCtl, AllKeysAndComments)
{
    const auto ctl = parse_ctl(R"(# comment
NP_MAX = 500
NQ = 6        # trailing comment
T_START = 10
T_STOP = 20
DT = 5
MET_DT = 3600
TURB_DX = 1
TURB_DZ = 0.5
TURB_MESO = 0.3
CONV_PROB = 0.25
CONV_P_TOP = 250
P_SURF = 1013
P_TOP = 5
SEDI_RADIUS = 1e-6
SEDI_DENSITY = 1500
ISOSURF = 2
MPI_RANK = 3
NUM_DEVICES = -1
RNG_MODE = counter
RNG_SEED = 18446744073709551615
OUTPUT_DT = 10
GRID_NX = 4
GRID_NY = 2
ENS_Q = 5
)");
    EXPECT_EQ(ctl.np_max, 500u);
    EXPECT_EQ(ctl.nq, 6);
    EXPECT_EQ(ctl.isosurf_mode, IsosurfMode::theta);
    EXPECT_EQ(ctl.rng_mode, RngMode::counter);
    EXPECT_EQ(ctl.rng_seed_global, 18446744073709551615ULL);
    EXPECT_EQ(ctl.num_devices_requested, -1);
    EXPECT_EQ(ctl.mpi_rank, 3);
    EXPECT_EQ(ctl.sedi_radius, 1e-6);
    EXPECT_EQ(ctl.ens_q, 5);
}

TEST(ReadCtl, BadValueReportsLine)
{
    try {
        parse_ctl("DT = abc\n", "x.ctl");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
        EXPECT_NE(std::string(e.what()).find("DT"), std::string::npos);
    }
    try {
        parse_ctl("# header\nNQ = 5\nBOGUS = 1\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(parse_ctl("DT 180\n"), ParseError);
}

TEST(ReadCtl, InvariantViolationAfterParse)
{
    EXPECT_THROW(parse_ctl("P_TOP = 1200\nP_SURF = 1000\n"), ConfigError);
    EXPECT_THROW(read_ctl("/nonexistent/file.ctl"), ParseError);
}

TEST(ReadAtm, MapsColumns)
{
    TempDir dir;
    write_text(dir / "a.csv", "time,p,zeta,lon,lat\n0,500,0,10,20\n");
    const auto ens = read_atm(dir / "a.csv", Control{});
    ASSERT_EQ(ens.np, 1u);
    EXPECT_EQ(ens.time[0], 0.0);
    EXPECT_EQ(ens.p[0], 500.0);
    EXPECT_EQ(ens.zeta[0], 0.0);
    EXPECT_EQ(ens.lon[0], 10.0);
    EXPECT_EQ(ens.lat[0], 20.0);
    for (const auto& q : ens.q) {
        EXPECT_EQ(q[0], 0.0);
    }
}

TEST(ReadAtm, WrapsLongitude)
{
    TempDir dir;
    write_text(dir / "a.csv", "time,p,zeta,lon,lat,q0\n0,500,0,190,20,7\n");
    const auto ens = read_atm(dir / "a.csv", Control{});
    EXPECT_EQ(ens.lon[0], -170.0);
    EXPECT_EQ(ens.q[0][0], 7.0);
}

TEST(ReadAtm, Errors)
{
    TempDir dir;
    write_text(dir / "lat.csv", "time,p,zeta,lon,lat\n0,500,0,10,95\n");
    EXPECT_THROW(read_atm(dir / "lat.csv", Control{}), ParseError);

    write_text(dir / "row.csv", "time,p,zeta,lon,lat\n0,500,0,10\n");
    EXPECT_THROW(read_atm(dir / "row.csv", Control{}), ParseError);

    write_text(dir / "hdr.csv", "t,p,zeta,lon,lat\n");
    EXPECT_THROW(read_atm(dir / "hdr.csv", Control{}), ParseError);

    Control small;
    small.np_max = 1;
    write_text(dir / "many.csv",
               "time,p,zeta,lon,lat\n0,500,0,1,2\n0,500,0,1,2\n");
    EXPECT_THROW(read_atm(dir / "many.csv", small), CapacityError);
}

TEST(ReadAtm, RoundTripsWriteAtmBitExact)
{
    TempDir dir;
    Control ctl;
    ctl.nq = 7;
    auto ens = scenario::random_ensemble(ctl, 257, 99);
    for (std::size_t i = 0; i < ens.np; ++i) {
        ens.time[i] = 1.0 / 3.0 * static_cast<double>(i);
        ens.zeta[i] = std::nextafter(1.0, 2.0) * static_cast<double>(i);
        for (auto& q : ens.q) {
            q[i] = std::sin(static_cast<double>(i)) * 1e-9;
        }
    }
    write_atm(ens, dir / "rt.csv");
    const auto back = read_atm(dir / "rt.csv", ctl);
    EXPECT_EQ(back.np, ens.np);
    EXPECT_EQ(back.time, ens.time);
    EXPECT_EQ(back.p, ens.p);
    EXPECT_EQ(back.zeta, ens.zeta);
    EXPECT_EQ(back.lon, ens.lon);
    EXPECT_EQ(back.lat, ens.lat);
    EXPECT_EQ(back.q, ens.q);
}

std::string minimal_met(double u, int nx_header = 2)
{
    std::string s = "MET 0 " + std::to_string(nx_header) + " 2 2\n0 10\n0 10\n1000 500\n";
    auto block = [&](const std::string& name, double v) {
        s += name + "\n";
        for (int r = 0; r < 4; ++r) {
            s += std::to_string(v) + " " + std::to_string(v) + "\n";
        }
    };
    block("U", u);
    block("V", 0);
    block("W", 0);
    block("T", 250);
    return s;
}

TEST(ReadMet, ConstantField)
{
    TempDir dir;
    write_text(dir / "m.txt", minimal_met(10.0));
    const auto met = read_met(dir / "m.txt");
    EXPECT_EQ(met.nx(), 2u);
    EXPECT_EQ(met.nz(), 2u);
    for (const double u : met.u) {
        EXPECT_EQ(u, 10.0);
    }
}

TEST(ReadMet, DimensionMismatch)
{
    TempDir dir;
    write_text(dir / "m.txt", minimal_met(10.0, 3));
    try {
        read_met(dir / "m.txt");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("dimension mismatch"),
                  std::string::npos);
    }
}

TEST(ReadMet, RejectsIncreasingLevels)
{
    TempDir dir;
    auto s = minimal_met(10.0);
    s.replace(s.find("1000 500"), 8, "500 1000");
    write_text(dir / "m.txt", s);
    EXPECT_THROW(read_met(dir / "m.txt"), ParseError);
}

TEST(ReadMet, WriteMetRoundTrip)
{
    TempDir dir;
    const auto met = scenario::analytic_met(3600.0, 0.7);
    write_met(met, dir / "m.txt");
    const auto back = read_met(dir / "m.txt");
    EXPECT_EQ(back.t_met, met.t_met);
    EXPECT_EQ(back.lons, met.lons);
    EXPECT_EQ(back.levs, met.levs);
    EXPECT_EQ(back.u, met.u);
    EXPECT_EQ(back.T, met.T);
    EXPECT_EQ(read_met_time(dir / "m.txt"), 3600.0);
}

MeteoField grid_with_lons(std::vector<double> lons)
{
    MeteoField met;
    met.lons = std::move(lons);
    met.lats = {0, 10};
    met.levs = {1000, 500};
    met.resize_fields();
    for (std::size_t i = 0; i < met.u.size(); ++i) {
        met.u[i] = static_cast<double>(i);
        met.T[i] = 200.0 + static_cast<double>(i);
    }
    return met;
}

TEST(MetPeriodic, AppendsWrapColumn)
{
    const auto met = grid_with_lons({0, 90, 180, 270});
    const auto out = met_periodic(met);
    EXPECT_EQ(out.lons, (std::vector<double>{0, 90, 180, 270, 360}));
    for (std::size_t iy = 0; iy < 2; ++iy) {
        for (std::size_t iz = 0; iz < 2; ++iz) {
            EXPECT_EQ(out.u[out.index(4, iy, iz)], met.u[met.index(0, iy, iz)]);
            EXPECT_EQ(out.T[out.index(4, iy, iz)], met.T[met.index(0, iy, iz)]);
            EXPECT_EQ(out.u[out.index(2, iy, iz)], met.u[met.index(2, iy, iz)]);
        }
    }

    const auto shifted = met_periodic(grid_with_lons({-180, -90, 0, 90}));
    EXPECT_EQ(shifted.lons.back(), 180.0);
}

TEST(MetPeriodic, LeavesRegionalGridAndIsIdempotent)
{
    const auto regional = grid_with_lons({0, 10, 20});
    EXPECT_EQ(met_periodic(regional).lons, regional.lons);

    const auto once = met_periodic(grid_with_lons({0, 90, 180, 270}));
    const auto twice = met_periodic(once);
    EXPECT_EQ(twice.lons, once.lons);
    EXPECT_EQ(twice.u, once.u);
}

TEST(ReadClim, AnalyticValues)
{
    const auto clim = read_clim(Control{});
    EXPECT_NEAR(clim.p_trop(0.0), 100.0, 1e-12);
    EXPECT_NEAR(clim.p_trop(90.0), 300.0, 1e-12);
    EXPECT_NEAR(clim.hno3(90.0, 50.0), 0.5e-8, 1e-20);
    EXPECT_NEAR(clim.hno3(0.0, 50.0), 1e-8, 1e-20);
    // Between table nodes the lookup is linear.
    EXPECT_NEAR(clim.p_trop(2.5), 0.5 * (clim.p_trop(0) + clim.p_trop(5)), 1e-12);
}

TEST(WrapLon, Rules)
{
    EXPECT_EQ(wrap_lon(190.0), -170.0);
    EXPECT_EQ(wrap_lon(180.0), -180.0);
    EXPECT_EQ(wrap_lon(-180.0), -180.0);
    EXPECT_EQ(wrap_lon(-190.0), 170.0);
    EXPECT_EQ(wrap_lon(725.0), 5.0);
    const double tiny = -1e-300;
    EXPECT_EQ(wrap_lon(tiny), tiny);
}

} // namespace
} // namespace ptrac
