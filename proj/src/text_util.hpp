#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace ptrac::text {

inline std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, next - pos)));
        if (next == std::string_view::npos) {
            break;
        }
        pos = next + 1;
    }
    return out;
}

inline std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        pos = s.find_first_not_of(" \t\r\n", pos);
        if (pos == std::string_view::npos) {
            break;
        }
        const auto e = s.find_first_of(" \t\r\n", pos);
        out.push_back(s.substr(pos, e - pos));
        if (e == std::string_view::npos) {
            break;
        }
        pos = e;
    }
    return out;
}

template <class T>
std::optional<T> parse_number(std::string_view s)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    T value{};
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc() || ptr != end || s.empty()) {
        return std::nullopt;
    }
    return value;
}

/// Shortest representation that reads back to the identical double.
inline void append_double(std::string& out, double x)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, ptr);
}

} // namespace ptrac::text
