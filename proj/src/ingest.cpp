#include "ptrac/ingest.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "ptrac/errors.hpp"
#include "text_util.hpp"

namespace ptrac {

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <class T>
T to_number(std::string_view value)
{
    auto parsed = text::parse_number<T>(value);
    if (!parsed) {
        throw ArgumentError("invalid value '" + std::string(value) + "'");
    }
    return *parsed;
}

using Setter = std::function<void(Control&, std::string_view)>;

template <class T>
Setter field(T Control::*member)
{
    return [member](Control& c, std::string_view v) {
        c.*member = to_number<T>(v);
    };
}

const std::unordered_map<std::string_view, Setter>& ctl_keys()
{
    static const std::unordered_map<std::string_view, Setter> keys = {
        {"NP_MAX", field(&Control::np_max)},
        {"NQ", field(&Control::nq)},
        {"T_START", field(&Control::t_start)},
        {"T_STOP", field(&Control::t_stop)},
        {"DT", field(&Control::dt_model)},
        {"MET_DT", field(&Control::met_dt)},
        {"TURB_DX", field(&Control::turb_dx)},
        {"TURB_DZ", field(&Control::turb_dz)},
        {"TURB_MESO", field(&Control::turb_meso)},
        {"CONV_PROB", field(&Control::conv_prob)},
        {"CONV_P_TOP", field(&Control::conv_p_top)},
        {"P_SURF", field(&Control::p_surf)},
        {"P_TOP", field(&Control::p_top)},
        {"SEDI_RADIUS", field(&Control::sedi_radius)},
        {"SEDI_DENSITY", field(&Control::sedi_density)},
        {"ISOSURF",
         [](Control& c, std::string_view v) {
             const int m = to_number<int>(v);
             if (m < 0 || m > 2) {
                 throw ArgumentError("ISOSURF must be 0, 1 or 2");
             }
             c.isosurf_mode = static_cast<IsosurfMode>(m);
         }},
        {"METEO",
         [](Control& c, std::string_view v) {
             c.meteo = to_number<int>(v) != 0;
         }},
        {"MPI_RANK", field(&Control::mpi_rank)},
        {"NUM_DEVICES", field(&Control::num_devices_requested)},
        {"RNG_MODE",
         [](Control& c, std::string_view v) {
             if (v == "faithful") {
                 c.rng_mode = RngMode::faithful;
             } else if (v == "counter") {
                 c.rng_mode = RngMode::counter;
             } else {
                 throw ArgumentError("RNG_MODE must be faithful or counter");
             }
         }},
        {"RNG_SEED", field(&Control::rng_seed_global)},
        {"OUTPUT_DT", field(&Control::output_dt)},
        {"GRID_NX", field(&Control::grid_nx)},
        {"GRID_NY", field(&Control::grid_ny)},
        {"ENS_Q", field(&Control::ens_q)},
    };
    return keys;
}

struct LineCursor {
    std::string body;
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    std::string path;

    LineCursor(std::string contents, std::string p)
        : body(std::move(contents)), path(std::move(p))
    {
        lines = text::split(body, '\n');
    }
    LineCursor(const LineCursor&) = delete;
    LineCursor& operator=(const LineCursor&) = delete;

    // Next non-blank line, or throws at end of input.
    std::pair<std::size_t, std::string_view> next(const char* expecting)
    {
        while (pos < lines.size()) {
            const auto line = text::trim(lines[pos++]);
            if (!line.empty()) {
                return {pos, line};
            }
        }
        throw ParseError(path, 0, std::string("unexpected end of file, ") +
                                      "expecting " + expecting);
    }
};

std::vector<double> parse_row(const LineCursor& cur, std::size_t lineno,
                              std::string_view line, std::size_t expected,
                              const char* what)
{
    const auto toks = text::split_ws(line);
    if (toks.size() != expected) {
        throw ParseError(cur.path, lineno,
                         std::string("dimension mismatch in ") + what +
                             ": expected " + std::to_string(expected) +
                             " values, found " + std::to_string(toks.size()));
    }
    std::vector<double> out;
    out.reserve(expected);
    for (const auto tok : toks) {
        auto v = text::parse_number<double>(tok);
        if (!v) {
            throw ParseError(cur.path, lineno,
                             "not a number: '" + std::string(tok) + "'");
        }
        out.push_back(*v);
    }
    return out;
}

} // namespace

double wrap_lon(double lon) noexcept
{
    if (lon >= -180.0 && lon < 180.0) {
        return lon;
    }
    double r = std::fmod(lon + 180.0, 360.0);
    if (r < 0.0) {
        r += 360.0;
    }
    r -= 180.0;
    // fmod and the shifts can round onto the open upper edge.
    if (r >= 180.0) {
        r -= 360.0;
    }
    return r;
}

bool set_ctl_key(Control& ctl, std::string_view key, std::string_view value)
{
    const auto& keys = ctl_keys();
    const auto it = keys.find(key);
    if (it == keys.end()) {
        return false;
    }
    try {
        it->second(ctl, text::trim(value));
    } catch (const ArgumentError& e) {
        throw ArgumentError(std::string(key) + ": " + e.what());
    }
    return true;
}

Control parse_ctl(std::string_view body, const std::string& origin)
{
    Control ctl;
    const auto lines = text::split(body, '\n');
    for (std::size_t n = 0; n < lines.size(); ++n) {
        auto line = lines[n];
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = text::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(origin, n + 1, "expected 'KEY = value'");
        }
        const auto key = text::trim(line.substr(0, eq));
        const auto value = text::trim(line.substr(eq + 1));
        try {
            if (!set_ctl_key(ctl, key, value)) {
                throw ParseError(origin, n + 1,
                                 "unknown key '" + std::string(key) + "'");
            }
        } catch (const ArgumentError& e) {
            throw ParseError(origin, n + 1, e.what());
        }
    }
    if (auto v = validate_control(ctl); !v.empty()) {
        throw ConfigError(std::move(v));
    }
    return ctl;
}

Control read_ctl(const fs::path& path)
{
    return parse_ctl(slurp(path), path.string());
}

ParticleEnsemble read_atm(const fs::path& path, const Control& ctl)
{
    const auto body = slurp(path);
    const auto origin = path.string();
    const auto lines = text::split(body, '\n');

    std::size_t n = 0;
    while (n < lines.size() && lines[n].empty()) {
        ++n;
    }
    if (n == lines.size()) {
        throw ParseError(origin, 0, "missing header");
    }
    const auto header = text::split(lines[n], ',');
    static constexpr std::array<std::string_view, 5> fixed = {
        "time", "p", "zeta", "lon", "lat"};
    if (header.size() < fixed.size() ||
        !std::equal(fixed.begin(), fixed.end(), header.begin())) {
        throw ParseError(origin, n + 1,
                         "header must start with time,p,zeta,lon,lat");
    }
    const std::size_t nqcols = header.size() - fixed.size();
    for (std::size_t k = 0; k < nqcols; ++k) {
        if (header[fixed.size() + k] != "q" + std::to_string(k)) {
            throw ParseError(origin, n + 1,
                             "expected column q" + std::to_string(k));
        }
    }
    if (nqcols > static_cast<std::size_t>(std::max(ctl.nq, 0))) {
        throw ParseError(origin, n + 1,
                         "file has more quantity columns than NQ");
    }

    std::vector<std::pair<std::size_t, std::string_view>> rows;
    for (std::size_t k = n + 1; k < lines.size(); ++k) {
        if (!lines[k].empty()) {
            rows.emplace_back(k + 1, lines[k]);
        }
    }
    if (rows.size() > ctl.np_max) {
        throw CapacityError(origin + ": " + std::to_string(rows.size()) +
                            " particles exceed np_max = " +
                            std::to_string(ctl.np_max));
    }

    auto ens = ensemble_allocate(ctl, rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto [lineno, line] = rows[i];
        const auto cols = text::split(line, ',');
        if (cols.size() != header.size()) {
            throw ParseError(origin, lineno,
                             "expected " + std::to_string(header.size()) +
                                 " columns, found " +
                                 std::to_string(cols.size()));
        }
        std::vector<double> v(cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c) {
            auto x = text::parse_number<double>(cols[c]);
            if (!x) {
                throw ParseError(origin, lineno,
                                 "not a number: '" + std::string(cols[c]) +
                                     "'");
            }
            v[c] = *x;
        }
        if (!(v[4] >= -90.0 && v[4] <= 90.0)) {
            throw ParseError(origin, lineno, "latitude outside [-90, 90]");
        }
        ens.time[i] = v[0];
        ens.p[i] = v[1];
        ens.zeta[i] = v[2];
        ens.lon[i] = wrap_lon(v[3]);
        ens.lat[i] = v[4];
        for (std::size_t k = 0; k < nqcols; ++k) {
            ens.q[k][i] = v[fixed.size() + k];
        }
    }
    return ens;
}

MeteoField read_met(const fs::path& path)
{
    LineCursor cur(slurp(path), path.string());

    const auto [hline, header] = cur.next("MET header");
    const auto htoks = text::split_ws(header);
    if (htoks.size() != 5 || htoks[0] != "MET") {
        throw ParseError(cur.path, hline,
                         "header must be 'MET <t_met> <nx> <ny> <nz>'");
    }
    const auto t_met = text::parse_number<double>(htoks[1]);
    const auto nx = text::parse_number<std::size_t>(htoks[2]);
    const auto ny = text::parse_number<std::size_t>(htoks[3]);
    const auto nz = text::parse_number<std::size_t>(htoks[4]);
    if (!t_met || !nx || !ny || !nz) {
        throw ParseError(cur.path, hline, "malformed MET header values");
    }

    MeteoField met;
    met.t_met = *t_met;
    {
        const auto [l, s] = cur.next("longitudes");
        met.lons = parse_row(cur, l, s, *nx, "longitudes");
    }
    {
        const auto [l, s] = cur.next("latitudes");
        met.lats = parse_row(cur, l, s, *ny, "latitudes");
    }
    {
        const auto [l, s] = cur.next("levels");
        met.levs = parse_row(cur, l, s, *nz, "levels");
    }
    met.resize_fields();

    const std::array<std::pair<const char*, std::vector<double>*>, 4> blocks =
        {{{"U", &met.u}, {"V", &met.v}, {"W", &met.w}, {"T", &met.T}}};
    for (const auto& [name, dst] : blocks) {
        const auto [l, s] = cur.next(name);
        if (s != name) {
            throw ParseError(cur.path, l,
                             std::string("expected variable block '") + name +
                                 "', found '" + std::string(s) + "'");
        }
        for (std::size_t iz = 0; iz < *nz; ++iz) {
            for (std::size_t iy = 0; iy < *ny; ++iy) {
                const auto [rl, rs] = cur.next(name);
                const auto row = parse_row(cur, rl, rs, *nx, name);
                for (std::size_t ix = 0; ix < *nx; ++ix) {
                    (*dst)[met.index(ix, iy, iz)] = row[ix];
                }
            }
        }
    }
    while (cur.pos < cur.lines.size()) {
        if (!text::trim(cur.lines[cur.pos]).empty()) {
            throw ParseError(cur.path, cur.pos + 1,
                             "dimension mismatch: trailing data after T block");
        }
        ++cur.pos;
    }
    if (auto err = met.check(); !err.empty()) {
        throw ParseError(cur.path, 0, err);
    }
    return met;
}

double read_met_time(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open file");
    }
    std::string tag;
    double t = 0.0;
    if (!(in >> tag >> t) || tag != "MET") {
        throw ParseError(path.string(), 1, "malformed MET header");
    }
    return t;
}

void write_met(const MeteoField& met, const fs::path& path)
{
    std::string out = "MET ";
    text::append_double(out, met.t_met);
    out += " " + std::to_string(met.nx()) + " " + std::to_string(met.ny()) +
           " " + std::to_string(met.nz()) + "\n";
    auto row = [&out](const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) {
                out += ' ';
            }
            text::append_double(out, v[i]);
        }
        out += '\n';
    };
    row(met.lons);
    row(met.lats);
    row(met.levs);
    const std::array<std::pair<const char*, const std::vector<double>*>, 4>
        blocks = {{{"U", &met.u}, {"V", &met.v}, {"W", &met.w}, {"T", &met.T}}};
    for (const auto& [name, src] : blocks) {
        out += name;
        out += '\n';
        for (std::size_t iz = 0; iz < met.nz(); ++iz) {
            for (std::size_t iy = 0; iy < met.ny(); ++iy) {
                for (std::size_t ix = 0; ix < met.nx(); ++ix) {
                    if (ix) {
                        out += ' ';
                    }
                    text::append_double(out, (*src)[met.index(ix, iy, iz)]);
                }
                out += '\n';
            }
        }
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << out)) {
        throw IoError("cannot write " + path.string());
    }
}

MeteoField met_periodic(MeteoField met)
{
    if (met.nx() < 2) {
        return met;
    }
    const double spacing = met.lons[1] - met.lons[0];
    const double span = met.lons.back() - met.lons.front();
    if (std::abs(span + spacing - 360.0) >= 1e-6) {
        return met;
    }

    MeteoField out;
    out.t_met = met.t_met;
    out.lons = met.lons;
    out.lons.push_back(met.lons.front() + 360.0);
    out.lats = met.lats;
    out.levs = met.levs;
    out.resize_fields();
    const auto nx = met.nx();
    for (std::size_t ix = 0; ix <= nx; ++ix) {
        const std::size_t src_x = ix == nx ? 0 : ix;
        for (std::size_t iy = 0; iy < met.ny(); ++iy) {
            for (std::size_t iz = 0; iz < met.nz(); ++iz) {
                const auto s = met.index(src_x, iy, iz);
                const auto d = out.index(ix, iy, iz);
                out.u[d] = met.u[s];
                out.v[d] = met.v[s];
                out.w[d] = met.w[s];
                out.T[d] = met.T[s];
            }
        }
    }
    return out;
}

ClimData read_clim(const Control& ctl)
{
    constexpr double deg = std::numbers::pi / 180.0;
    ClimData clim;
    for (int k = 0; k <= 36; ++k) {
        clim.lats.push_back(-90.0 + 5.0 * k);
    }
    const int np = static_cast<int>(std::ceil(std::max(ctl.p_surf, 1000.0) /
                                              10.0));
    for (int k = 0; k <= np; ++k) {
        clim.ps.push_back(10.0 * k);
    }
    for (const double lat : clim.lats) {
        const double c = std::cos(lat * deg);
        clim.p_trop_tab.push_back(300.0 - 200.0 * c * c);
    }
    for (const double lat : clim.lats) {
        const double lat_factor = 0.5 + 0.5 * std::cos(lat * deg);
        for (const double p : clim.ps) {
            const double x = (p - 50.0) / 40.0;
            clim.hno3_tab.push_back(1e-8 * std::exp(-x * x) * lat_factor);
        }
    }
    return clim;
}

} // namespace ptrac
