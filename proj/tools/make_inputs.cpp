// Writes a synthetic input set (control file, particles, met snapshots) for
// trying out the `sim` command.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "ptrac/scenario.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Generate a synthetic sim input set", "make_inputs"};
    std::string dir;
    ptrac::scenario::Spec spec;
    double hours = 24.0;
    app.add_option("dir", dir, "target directory")->required();
    app.add_option("--np", spec.np, "number of particles");
    app.add_option("--hours", hours, "simulated duration in hours");
    app.add_option("--seed", spec.seed, "particle placement seed");
    CLI11_PARSE(app, argc, argv);

    ptrac::Control ctl;
    ctl.t_stop = hours * 3600.0;
    ctl.ens_q = ptrac::qslot::num_fixed;
    ctl.nq = ptrac::qslot::num_fixed + 1;
    spec.met_snapshots = static_cast<int>(ctl.t_stop / spec.met_dt) + 2;
    ptrac::scenario::write_inputs(dir, ctl, spec);

    std::ofstream f(std::filesystem::path(dir) / "sim.ctl");
    f << "# synthetic run\n"
      << "NQ = " << ctl.nq << "\n"
      << "T_STOP = " << ctl.t_stop << "\n"
      << "DT = 180\n"
      << "MET_DT = " << spec.met_dt << "\n"
      << "TURB_DX = 50\nTURB_DZ = 0.1\nTURB_MESO = 0.16\n"
      << "CONV_PROB = 0.01\nSEDI_RADIUS = 1e-6\n"
      << "ENS_Q = " << ctl.ens_q << "\n"
      << "RNG_MODE = counter\n";
    std::cout << "wrote inputs to " << dir << "\n";
    return 0;
}
