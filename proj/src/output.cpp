#include "ptrac/output.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "ptrac/errors.hpp"
#include "text_util.hpp"

namespace ptrac {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& body)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    f << body;
    if (!f) {
        throw IoError("write to " + path.string() + " failed");
    }
}

void append_row(std::string& out, std::initializer_list<double> values)
{
    bool first = true;
    for (const double v : values) {
        if (!first) {
            out += ',';
        }
        first = false;
        text::append_double(out, v);
    }
    out += '\n';
}

} // namespace

std::string output_filename(std::string_view kind, double t)
{
    return std::string(kind) + "_" + std::to_string(std::llround(t)) + ".csv";
}

void write_atm(const ParticleEnsemble& ens, const fs::path& path)
{
    std::string out = "time,p,zeta,lon,lat";
    for (int k = 0; k < ens.nq(); ++k) {
        out += ",q" + std::to_string(k);
    }
    out += '\n';
    for (std::size_t i = 0; i < ens.np; ++i) {
        text::append_double(out, ens.time[i]);
        for (const auto* col : {&ens.p, &ens.zeta, &ens.lon, &ens.lat}) {
            out += ',';
            text::append_double(out, (*col)[i]);
        }
        for (const auto& q : ens.q) {
            out += ',';
            text::append_double(out, q[i]);
        }
        out += '\n';
    }
    write_file(path, out);
}

int grid_bin(double x, double lo, double hi, int n) noexcept
{
    const double width = (hi - lo) / n;
    const double b = std::floor((x - lo) / width);
    if (!(b >= 0.0)) {
        return 0;
    }
    return b >= n - 1 ? n - 1 : static_cast<int>(b);
}

void write_grid(const Control& ctl, const ParticleEnsemble& ens,
                const fs::path& path)
{
    const int nx = ctl.grid_nx;
    const int ny = ctl.grid_ny;
    if (nx < 1 || ny < 1) {
        throw ArgumentError("write_grid needs grid_nx, grid_ny >= 1");
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(nx) *
                                    static_cast<std::size_t>(ny));
    for (std::size_t i = 0; i < ens.np; ++i) {
        const auto ix = grid_bin(ens.lon[i], -180.0, 180.0, nx);
        const auto iy = grid_bin(ens.lat[i], -90.0, 90.0, ny);
        ++counts[static_cast<std::size_t>(iy) * nx + ix];
    }
    const double dx = 360.0 / nx;
    const double dy = 180.0 / ny;
    std::string out = "lon_center,lat_center,count\n";
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            text::append_double(out, -180.0 + (ix + 0.5) * dx);
            out += ',';
            text::append_double(out, -90.0 + (iy + 0.5) * dy);
            out += ',';
            out += std::to_string(counts[static_cast<std::size_t>(iy) * nx + ix]);
            out += '\n';
        }
    }
    write_file(path, out);
}

void write_ens(const Control& ctl, const ParticleEnsemble& ens,
               const fs::path& path)
{
    if (ctl.ens_q < 0 || ctl.ens_q >= ens.nq()) {
        throw ArgumentError("write_ens needs a valid group-id slot");
    }
    const auto& ids = ens.q[static_cast<std::size_t>(ctl.ens_q)];
    std::map<long long, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < ens.np; ++i) {
        const double g = ids[i];
        if (!(g >= 0.0) || std::floor(g) != g) {
            throw ArgumentError("particle " + std::to_string(i) +
                                " has a group id that is not a non-negative "
                                "integer");
        }
        groups[static_cast<long long>(g)].push_back(i);
    }

    auto stats = [](const std::vector<double>& x,
                     const std::vector<std::size_t>& members) {
        double mean = 0.0;
        for (const auto i : members) {
            mean += x[i];
        }
        mean /= static_cast<double>(members.size());
        double var = 0.0;
        for (const auto i : members) {
            var += (x[i] - mean) * (x[i] - mean);
        }
        return std::pair{mean, std::sqrt(var / static_cast<double>(members.size()))};
    };

    std::string out =
        "group,count,lon_mean,lon_std,lat_mean,lat_std,p_mean,p_std\n";
    for (const auto& [g, members] : groups) {
        const auto [lon_m, lon_s] = stats(ens.lon, members);
        const auto [lat_m, lat_s] = stats(ens.lat, members);
        const auto [p_m, p_s] = stats(ens.p, members);
        out += std::to_string(g) + "," + std::to_string(members.size()) + ",";
        append_row(out, {lon_m, lon_s, lat_m, lat_s, p_m, p_s});
    }
    write_file(path, out);
}

void write_output(const Control& ctl, const ParticleEnsemble& ens, double t,
                  const fs::path& outdir)
{
    std::error_code ec;
    if (!fs::is_directory(outdir, ec)) {
        throw IoError("output directory does not exist: " + outdir.string());
    }
    write_atm(ens, outdir / output_filename("atm", t));
    if (ctl.grid_nx > 0 && ctl.grid_ny > 0) {
        write_grid(ctl, ens, outdir / output_filename("grid", t));
    }
    if (ctl.ens_q >= 0) {
        write_ens(ctl, ens, outdir / output_filename("ens", t));
    }
}

} // namespace ptrac
