#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ptrac/device_runtime.hpp"
#include "ptrac/model_state.hpp"
#include "ptrac/timers.hpp"

namespace ptrac {

struct CliArgs {
    std::filesystem::path ctl_path;
    std::filesystem::path atm_path;
    std::string met_prefix;
    std::filesystem::path outdir;
    std::optional<int> devices;
    std::optional<RngMode> rng_mode;
    std::optional<std::uint64_t> seed;
    bool sequential = false;
};

/// Usage text for the `sim` command.
std::string usage();

/// Parses `sim <ctl> <atm> <met_prefix> <outdir> [--devices N]
/// [--rng-mode faithful|counter] [--seed S] [--sequential]`. argv[0] is the
/// program name. Throws ArgumentError with a usage message on bad input.
CliArgs parse_args(int argc, const char* const* argv);

/// Device request after applying priorities: CLI over the SIM_NUM_DEVICES
/// environment value over the control file.
int resolve_device_request(const Control& ctl, std::optional<int> cli,
                           const char* env_value);

/// Applies CLI overrides to a control record read from file.
Control apply_overrides(Control ctl, const CliArgs& args, const char* env_value);

/// Path of met snapshot k: "<prefix><k>.txt", or "<prefix>/met_<k>.txt"
/// when the prefix names a directory.
std::filesystem::path met_path(const std::string& prefix, int k);

struct RunPaths {
    std::filesystem::path atm;
    std::string met_prefix;
    std::filesystem::path outdir;
};

struct RunOptions {
    DispatchMode dispatch = DispatchMode::parallel;
    /// Receives the timer table; null to suppress.
    std::ostream* report = nullptr;
    /// Overrides the platform's available device count when set.
    std::optional<int> available_devices;
};

struct RunResult {
    int num_devices = 0;
    std::size_t steps = 0;
    std::size_t outputs = 0;
    std::size_t isosurf_unconverged = 0;
    std::vector<TimerRecord> timers;
    ParticleEnsemble final_state;
};

/// Full simulation: input, device setup, time loop, output, teardown.
/// Writes output CSVs and timers.csv into paths.outdir. Device task
/// failures surface as DeviceErrors after the parallel section completes.
RunResult run_simulation(const Control& ctl, const RunPaths& paths,
                         const RunOptions& options = {});

/// Entry point of the `sim` command; returns the process exit status.
int sim_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

} // namespace ptrac
