#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

#include "ptrac/driver.hpp"
#include "ptrac/errors.hpp"
#include "ptrac/ingest.hpp"
#include "sim_case.hpp"

namespace ptrac {
namespace {

using testing::read_text;
using testing::SimCase;

CliArgs parse(std::vector<std::string> words)
{
    std::vector<const char*> argv{"sim"};
    for (const auto& w : words) {
        argv.push_back(w.c_str());
    }
    return parse_args(static_cast<int>(argv.size()), argv.data());
}

TEST(ParseArgs, Positionals)
{
    const auto a = parse({"c.ctl", "atm.csv", "met_", "out"});
    EXPECT_EQ(a.ctl_path, "c.ctl");
    EXPECT_EQ(a.atm_path, "atm.csv");
    EXPECT_EQ(a.met_prefix, "met_");
    EXPECT_EQ(a.outdir, "out");
    EXPECT_FALSE(a.devices);
    EXPECT_FALSE(a.rng_mode);
    EXPECT_FALSE(a.sequential);
}

TEST(ParseArgs, Options)
{
    auto a = parse({"c", "a", "m", "o", "--devices", "-1"});
    EXPECT_EQ(a.devices, -1);
    a = parse({"c", "a", "m", "o", "--devices", "2", "--rng-mode", "counter",
               "--seed", "99", "--sequential"});
    EXPECT_EQ(a.devices, 2);
    EXPECT_EQ(a.rng_mode, RngMode::counter);
    EXPECT_EQ(a.seed, 99u);
    EXPECT_TRUE(a.sequential);
}

TEST(ParseArgs, Errors)
{
    EXPECT_THROW(parse({"c", "a", "m"}), ArgumentError);
    EXPECT_THROW(parse({"c", "a", "m", "o", "--devices", "two"}), ArgumentError);
    EXPECT_THROW(parse({"c", "a", "m", "o", "--rng-mode", "fast"}), ArgumentError);
    try {
        parse({});
        FAIL();
    } catch (const ArgumentError& e) {
        EXPECT_NE(std::string(e.what()).find("usage:"), std::string::npos);
    }
}

TEST(DeviceRequest, Priority)
{
    Control ctl;
    ctl.num_devices_requested = 3;
    EXPECT_EQ(resolve_device_request(ctl, 2, "5"), 2);
    EXPECT_EQ(resolve_device_request(ctl, std::nullopt, "5"), 5);
    EXPECT_EQ(resolve_device_request(ctl, std::nullopt, nullptr), 3);
    EXPECT_EQ(resolve_device_request(ctl, std::nullopt, ""), 3);
    EXPECT_THROW(resolve_device_request(ctl, std::nullopt, "x"), ArgumentError);
}

TEST(MetPath, PrefixAndDirectory)
{
    EXPECT_EQ(met_path("data/met_", 3), std::filesystem::path("data/met_3.txt"));
    EXPECT_EQ(met_path("data/", 0), std::filesystem::path("data/met_0.txt"));
}

TEST(TimerReport, Aggregation)
{
    EXPECT_EQ(report_timers({}), "name,group,scope,count,total_ns,mean_ns\n");
    const std::vector<TimerRecord> recs{
        {"module_advection", TimerGroup::PHYSICS, 0, 10},
        {"module_advection", TimerGroup::PHYSICS, 0, 20},
        {"module_advection", TimerGroup::PHYSICS, 1, 7},
        {"READ_INPUT", TimerGroup::IO, host_scope, 5},
    };
    const auto s = aggregate_timers(recs);
    ASSERT_EQ(s.size(), 3u);
    std::map<std::pair<std::string, int>, TimerSummary> by;
    for (const auto& x : s) {
        by[{x.name, x.device}] = x;
    }
    EXPECT_EQ(by.at({"module_advection", 0}).count, 2u);
    EXPECT_EQ(by.at({"module_advection", 0}).total_ns, 30);
    EXPECT_DOUBLE_EQ(by.at({"module_advection", 0}).mean_ns, 15.0);
    EXPECT_EQ(by.at({"module_advection", 1}).count, 1u);
    const auto table = report_timers(recs);
    EXPECT_NE(table.find("READ_INPUT,IO,host,1,5,5\n"), std::string::npos);
    EXPECT_NE(table.find("module_advection,PHYSICS,device0,2,30,15\n"),
              std::string::npos);
}

TEST(TimerRegistry, ConcurrentRecording)
{
    TimerRegistry reg;
    std::vector<std::thread> ts;
    for (int d = 0; d < 4; ++d) {
        ts.emplace_back([&reg, d] {
            for (int k = 0; k < 250; ++k) {
                ScopedTimer t(reg, "x", TimerGroup::PHYSICS, d);
            }
        });
    }
    for (auto& t : ts) {
        t.join();
    }
    EXPECT_EQ(reg.records().size(), 1000u);
}

TEST(RunSimulation, DegenerateInterval)
{
    auto ctl = testing::full_physics_control(0);
    SimCase sc(ctl, 64);
    RunResult r;
    const auto out = sc.run(2, {}, &r);
    EXPECT_EQ(r.steps, 0u);
    EXPECT_EQ(r.outputs, 1u);
    EXPECT_TRUE(std::filesystem::exists(out / "atm_0.csv"));
    EXPECT_TRUE(std::filesystem::exists(out / "timers.csv"));
}

TEST(RunSimulation, OutputCadence)
{
    auto ctl = testing::deterministic_control(25); // 4500 s
    SimCase sc(ctl, 32);
    RunResult r;
    const auto out = sc.run(1, {}, &r);
    EXPECT_EQ(r.steps, 25u);
    EXPECT_EQ(r.outputs, 3u);
    for (const char* f : {"atm_0.csv", "atm_3600.csv", "atm_4500.csv",
                          "grid_3600.csv", "ens_4500.csv"}) {
        EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
    }
    for (std::size_t i = 0; i < r.final_state.np; ++i) {
        EXPECT_EQ(r.final_state.time[i], ctl.t_stop);
    }
}

TEST(RunSimulation, CounterModeDeviceCountInvariance)
{
    auto ctl = testing::full_physics_control(10);
    ctl.rng_mode = RngMode::counter;
    SimCase sc(ctl, 257);
    const auto ref = SimCase::final_atm(sc.run(1), ctl);
    EXPECT_EQ(SimCase::final_atm(sc.run(4), ctl), ref);
    EXPECT_EQ(SimCase::final_atm(sc.run(7), ctl), ref);
}

TEST(RunSimulation, SequentialMatchesParallel)
{
    auto ctl = testing::full_physics_control(8);
    SimCase sc(ctl, 100);
    RunOptions seq;
    seq.dispatch = DispatchMode::sequential;
    EXPECT_EQ(SimCase::final_atm(sc.run(3, seq), ctl),
              SimCase::final_atm(sc.run(3), ctl));
}

TEST(RunSimulation, TimersPerDevice)
{
    auto ctl = testing::deterministic_control(3);
    SimCase sc(ctl, 40);
    RunResult r;
    std::ostringstream report;
    RunOptions opt;
    opt.report = &report;
    const auto out = sc.run(3, opt, &r);
    EXPECT_EQ(read_text(out / "timers.csv"), report.str());
    std::set<int> adv;
    for (const auto& t : aggregate_timers(r.timers)) {
        if (t.name == "module_advection") {
            EXPECT_EQ(t.count, 3u);
            adv.insert(t.device);
        }
    }
    EXPECT_EQ(adv, (std::set<int>{0, 1, 2}));
}

TEST(RunSimulation, DeviceCountResolution)
{
    auto ctl = testing::deterministic_control(1);
    SimCase sc(ctl, 10);
    RunResult r;
    RunOptions opt;
    opt.available_devices = 2;
    sc.run(-1, opt, &r);
    EXPECT_EQ(r.num_devices, 2);
    sc.run(5, opt, &r);
    EXPECT_EQ(r.num_devices, 5);
}

TEST(RunSimulation, Errors)
{
    auto ctl = testing::deterministic_control(2);
    SimCase sc(ctl, 10);
    auto bad = ctl;
    bad.p_top = 2000.0;
    EXPECT_THROW(sc.run(1, {}, nullptr, bad), ConfigError);
    auto late = ctl;
    late.t_stop = 1e7;
    EXPECT_THROW(sc.run(1, {}, nullptr, late), Error);
    EXPECT_THROW(run_simulation(ctl, {"nope.csv", "nope_", "/nonexistent_dir"}),
                 IoError);
}

TEST(SimMain, ExitCodes)
{
    std::ostringstream out, err;
    const char* argv1[] = {"sim"};
    EXPECT_EQ(sim_main(1, argv1, out, err), 2);
    testing::TempDir dir;
    testing::write_text(dir / "c.ctl", "T_STOP = 0\nGRID_NX = 0\n");
    const auto ctl = (dir / "c.ctl").string();
    const auto missing = (dir / "none.csv").string();
    const auto o = dir.path().string();
    const char* argv2[] = {"sim", ctl.c_str(), missing.c_str(), "m_", o.c_str()};
    EXPECT_EQ(sim_main(5, argv2, out, err), 1);
    EXPECT_NE(err.str().find("error:"), std::string::npos);
}

} // namespace
} // namespace ptrac
