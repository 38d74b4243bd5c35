#include "ptrac/driver.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ptrac/errors.hpp"
#include "ptrac/ingest.hpp"
#include "ptrac/output.hpp"
#include "ptrac/physics.hpp"
#include "ptrac/rng.hpp"
#include "text_util.hpp"

namespace ptrac {

namespace fs = std::filesystem;

namespace {

struct MetCatalog {
    std::string prefix;
    std::vector<double> times;

    MeteoField load(std::size_t k) const
    {
        return met_periodic(read_met(met_path(prefix, static_cast<int>(k))));
    }
};

MetCatalog scan_met(const std::string& prefix)
{
    MetCatalog cat{prefix, {}};
    for (int k = 0;; ++k) {
        const auto path = met_path(prefix, k);
        if (!fs::exists(path)) {
            break;
        }
        const double t = read_met_time(path);
        if (!cat.times.empty() && !(t > cat.times.back())) {
            throw ParseError(path.string(), 1,
                             "met snapshot times must increase strictly");
        }
        cat.times.push_back(t);
    }
    if (cat.times.empty()) {
        throw Error("no met snapshots found at " + met_path(prefix, 0).string());
    }
    return cat;
}

// Copies every device's own slice back to the host, concurrently.
void copy_back(DevicePool& pool, std::vector<DeviceRegion>& regions,
               ModelState& host, TimerRegistry& timers, DispatchMode mode)
{
    for_each_device_parallel(
        pool,
        [&](int d) {
            auto& region = regions[static_cast<std::size_t>(d)];
            ScopedTimer timer(timers, "UPDATE_HOST", TimerGroup::MEMORY, d);
            region_update_host(region, host, region.own_range());
        },
        mode);
}

} // namespace

std::string usage()
{
    return "usage: sim <ctl> <atm> <met_prefix> <outdir> [--devices N] "
           "[--rng-mode faithful|counter] [--seed S] [--sequential]";
}

CliArgs parse_args(int argc, const char* const* argv)
{
    CliArgs args;
    CLI::App app{"Lagrangian particle transport on simulated devices", "sim"};
    std::string ctl, atm, outdir, rng_mode;
    int devices = 0;
    std::uint64_t seed = 0;
    app.add_option("ctl", ctl, "control file")->required();
    app.add_option("atm", atm, "initial particle CSV")->required();
    app.add_option("met_prefix", args.met_prefix, "met snapshot prefix")
        ->required();
    app.add_option("outdir", outdir, "output directory")->required();
    auto* dev_opt = app.add_option(
        "--devices", devices, "number of devices, negative for all available");
    auto* rng_opt = app.add_option("--rng-mode", rng_mode, "faithful|counter")
                        ->check(CLI::IsMember({"faithful", "counter"}));
    auto* seed_opt = app.add_option("--seed", seed, "counter-mode base seed");
    app.add_flag("--sequential", args.sequential,
                 "dispatch devices in a plain loop instead of concurrently");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        throw ArgumentError(std::string(e.what()) + "\n" + usage());
    }
    args.ctl_path = ctl;
    args.atm_path = atm;
    args.outdir = outdir;
    if (dev_opt->count()) {
        args.devices = devices;
    }
    if (rng_opt->count()) {
        args.rng_mode =
            rng_mode == "counter" ? RngMode::counter : RngMode::faithful;
    }
    if (seed_opt->count()) {
        args.seed = seed;
    }
    return args;
}

int resolve_device_request(const Control& ctl, std::optional<int> cli,
                           const char* env_value)
{
    if (cli) {
        return *cli;
    }
    if (env_value && *env_value) {
        auto v = text::parse_number<int>(env_value);
        if (!v) {
            throw ArgumentError("SIM_NUM_DEVICES is not an integer: '" +
                                std::string(env_value) + "'");
        }
        return *v;
    }
    return ctl.num_devices_requested;
}

Control apply_overrides(Control ctl, const CliArgs& args, const char* env_value)
{
    ctl.num_devices_requested =
        resolve_device_request(ctl, args.devices, env_value);
    if (args.rng_mode) {
        ctl.rng_mode = *args.rng_mode;
    }
    if (args.seed) {
        ctl.rng_seed_global = *args.seed;
    }
    return ctl;
}

fs::path met_path(const std::string& prefix, int k)
{
    const auto name = std::to_string(k) + ".txt";
    std::error_code ec;
    if (!prefix.empty() &&
        (prefix.back() == '/' || fs::is_directory(prefix, ec))) {
        return fs::path(prefix) / ("met_" + name);
    }
    return fs::path(prefix + name);
}

RunResult run_simulation(const Control& ctl, const RunPaths& paths,
                         const RunOptions& options)
{
    if (auto v = validate_control(ctl); !v.empty()) {
        throw ConfigError(std::move(v));
    }
    std::error_code ec;
    if (!fs::is_directory(paths.outdir, ec)) {
        throw IoError("output directory does not exist: " +
                      paths.outdir.string());
    }

    TimerRegistry timers;
    RunResult result;
    ModelState host;
    MetCatalog met_files;
    std::size_t met_next = 0; // catalog index of the snapshot after met1

    {
        ScopedTimer timer(timers, "READ_INPUT", TimerGroup::IO);
        host.ctl = ctl;
        host.atm = read_atm(paths.atm, ctl);
        host.clim = read_clim(ctl);
        met_files = scan_met(paths.met_prefix);

        const auto& times = met_files.times;
        if (times.front() > ctl.t_start) {
            throw Error("first met snapshot is later than t_start");
        }
        if (times.back() < ctl.t_stop) {
            throw Error("t_stop exceeds the last met snapshot time");
        }
        if (times.size() == 1) {
            host.met0 = met_files.load(0);
            host.met1 = host.met0;
            met_next = 1;
        } else {
            std::size_t k0 = 0;
            while (k0 + 2 < times.size() && times[k0 + 1] <= ctl.t_start) {
                ++k0;
            }
            host.met0 = met_files.load(k0);
            host.met1 = met_files.load(k0 + 1);
            met_next = k0 + 2;
        }
    }
    const auto np = host.atm.np;
    host.cache.resize(np);
    host.dt.dt.assign(np, 0.0);
    host.rnd.resize(np);

    const int num_devices = options.available_devices
                                ? enumerate_devices(ctl.num_devices_requested,
                                                    *options.available_devices)
                                : enumerate_devices(ctl.num_devices_requested);
    result.num_devices = num_devices;
    DevicePool pool(num_devices);
    RngState rng = module_rng_init(ctl, num_devices);
    const auto mode = options.dispatch;

    for (int d = 0; d < num_devices; ++d) {
        ScopedTimer timer(timers, "ACC_INIT", TimerGroup::INIT, d);
        pool.device(d).submit([] {}).get();
    }

    std::vector<DeviceRegion> regions;
    regions.reserve(static_cast<std::size_t>(num_devices));
    for (int d = 0; d < num_devices; ++d) {
        {
            ScopedTimer timer(timers, "CREATE_DATA_REGION", TimerGroup::MEMORY, d);
            regions.push_back(region_create(pool, d, host));
        }
        ScopedTimer timer(timers, "UPDATE_DEVICE", TimerGroup::MEMORY, d);
        region_update_device(regions.back(), host,
                             Field::ctl | Field::atm | Field::cache |
                                 Field::clim | Field::met0 | Field::met1);
    }

    for_each_device_parallel(
        pool,
        [&](int d) {
            auto& region = regions[static_cast<std::size_t>(d)];
            auto& img = region.image();
            ScopedTimer timer(timers, "module_isosurf_init", TimerGroup::INIT, d);
            module_isosurf_init(img.ctl, img.atm, img.met0, img.met1, img.cache,
                                region.own_range());
        },
        mode);

    auto write = [&](double t) {
        copy_back(pool, regions, host, timers, mode);
        ScopedTimer timer(timers, "WRITE_OUTPUT", TimerGroup::IO);
        write_output(ctl, host.atm, t, paths.outdir);
        ++result.outputs;
    };

    write(ctl.t_start);

    std::atomic<std::size_t> unconverged{0};
    double t = ctl.t_start;
    double next_output = ctl.t_start + ctl.output_dt;
    std::uint64_t step = 0;
    while (t < ctl.t_stop) {
        const double t_next = std::min(t + ctl.dt_model, ctl.t_stop);

        if (host.met1.t_met < t_next) {
            while (host.met1.t_met < t_next && met_next < met_files.times.size()) {
                ScopedTimer timer(timers, "READ_MET", TimerGroup::IO);
                host.met0 = std::move(host.met1);
                host.met1 = met_files.load(met_next++);
            }
            for (int d = 0; d < num_devices; ++d) {
                ScopedTimer timer(timers, "UPDATE_DEVICE", TimerGroup::MEMORY, d);
                region_update_device(regions[static_cast<std::size_t>(d)], host,
                                     Field::met0 | Field::met1);
            }
        }

        for_each_device_parallel(
            pool,
            [&](int d) {
                auto& region = regions[static_cast<std::size_t>(d)];
                auto& img = region.image();
                const auto range = region.own_range();
                const auto& c = img.ctl;
                auto& atm = img.atm;
                auto physics = [&](const char* name, auto&& fn) {
                    ScopedTimer timer(timers, name, TimerGroup::PHYSICS, d);
                    fn();
                };

                module_timesteps(c, atm, t_next, range, img.dt);
                generate_random_nums(rng, step, range, d, img.rnd);

                physics("module_advection", [&] {
                    module_advection(c, atm, img.met0, img.met1, img.dt, range);
                });
                physics("module_diffusion_turb", [&] {
                    module_diffusion_turb(c, atm, img.met0, img.met1, img.dt,
                                          img.rnd, range);
                });
                physics("module_diffusion_meso", [&] {
                    module_diffusion_meso(c, atm, img.met0, img.met1, img.dt,
                                          img.rnd, img.cache, range);
                });
                physics("module_convection", [&] {
                    module_convection(c, atm, img.dt, img.rnd, range);
                });
                physics("module_sedi", [&] {
                    module_sedi(c, atm, img.met0, img.met1, img.dt, range);
                });
                physics("module_isosurf", [&] {
                    unconverged += module_isosurf(c, atm, img.met0, img.met1,
                                                  img.cache, range);
                });
                physics("module_position",
                        [&] { module_position(c, atm, range); });
                physics("module_meteo", [&] {
                    module_meteo(c, atm, img.met0, img.met1, img.clim, range);
                });
            },
            mode);

        t = t_next;
        ++step;
        if (t >= next_output || t >= ctl.t_stop) {
            write(t);
            while (next_output <= t) {
                next_output += ctl.output_dt;
            }
        }
    }

    for (int d = 0; d < num_devices; ++d) {
        auto& region = regions[static_cast<std::size_t>(d)];
        device_wait(region);
        ScopedTimer timer(timers, "DELETE_DATA_REGION", TimerGroup::MEMORY, d);
        region_delete(region);
    }

    result.steps = step;
    result.isosurf_unconverged = unconverged.load();
    result.timers = timers.records();
    result.final_state = std::move(host.atm);

    const auto table = report_timers(result.timers);
    {
        std::ofstream f(paths.outdir / "timers.csv", std::ios::binary);
        if (!f || !(f << table)) {
            throw IoError("cannot write " + (paths.outdir / "timers.csv").string());
        }
    }
    if (options.report) {
        *options.report << table;
    }
    return result;
}

int sim_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err)
{
    CliArgs args;
    try {
        args = parse_args(argc, argv);
    } catch (const ArgumentError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        const char* env = std::getenv("SIM_NUM_DEVICES");
        const auto ctl = apply_overrides(read_ctl(args.ctl_path), args, env);
        RunOptions options;
        options.dispatch =
            args.sequential ? DispatchMode::sequential : DispatchMode::parallel;
        options.report = &out;
        const auto result = run_simulation(
            ctl, {args.atm_path, args.met_prefix, args.outdir}, options);
        if (result.isosurf_unconverged) {
            err << "note: " << result.isosurf_unconverged
                << " isosurface iterations did not converge\n";
        }
    } catch (const DeviceErrors& e) {
        err << "simulation failed on " << e.failures().size() << " device(s):\n";
        for (const auto& f : e.failures()) {
            err << "  device " << f.device_id << ": " << f.message << "\n";
        }
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace ptrac
