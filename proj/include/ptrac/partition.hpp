#pragma once

#include <cstddef>

namespace ptrac {

/// Half-open particle-index interval [start, end) owned by one device.
struct WorkRange {
    int device_id = 0;
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - start; }
    bool empty() const noexcept { return start == end; }
    bool contains(std::size_t i) const noexcept { return i >= start && i < end; }

    friend bool operator==(const WorkRange&, const WorkRange&) = default;
};

/// Range spanning the whole ensemble, for single-context use.
inline WorkRange full_range(std::size_t np) noexcept { return {0, 0, np}; }

/// Contiguous block split of [0, np) over num_devices. The first
/// np % num_devices devices receive one extra particle. Throws ArgumentError
/// when num_devices < 1 or device_id is outside [0, num_devices).
WorkRange calc_device_workload_range(std::size_t np, int num_devices,
                                     int device_id);

} // namespace ptrac
