#pragma once

#include <filesystem>
#include <string_view>

#include "ptrac/model_state.hpp"

namespace ptrac {

/// Parses a "KEY = value" control file ('#' starts a comment). Unknown keys
/// and unparseable values raise ParseError with the line number; the result
/// is validated and a ConfigError is raised on invariant violations.
Control read_ctl(const std::filesystem::path& path);

/// Same as read_ctl() on in-memory text. `origin` names the source in
/// error messages.
Control parse_ctl(std::string_view text, const std::string& origin = "<ctl>");

/// Applies a single "KEY = value" assignment to ctl. Returns false when the
/// key is unknown; throws ArgumentError when the value does not parse.
bool set_ctl_key(Control& ctl, std::string_view key, std::string_view value);

/// Reads the particle CSV ("time,p,zeta,lon,lat[,q0..]"). Longitudes are
/// wrapped into [-180, 180).
ParticleEnsemble read_atm(const std::filesystem::path& path, const Control& ctl);

/// Reads one meteorological snapshot in the MET text format.
MeteoField read_met(const std::filesystem::path& path);

/// Reads only the validity time from a MET file header.
double read_met_time(const std::filesystem::path& path);

/// Writes a snapshot in the MET text format, full precision.
void write_met(const MeteoField& met, const std::filesystem::path& path);

/// Appends a duplicate of the first longitude column at lons[0] + 360 when
/// the grid covers the full circle; otherwise returns met unchanged.
MeteoField met_periodic(MeteoField met);

/// Built-in analytic climatology tables.
ClimData read_clim(const Control& ctl);

/// Wraps a longitude into [-180, 180). Values already in range are returned
/// unchanged.
double wrap_lon(double lon) noexcept;

} // namespace ptrac
