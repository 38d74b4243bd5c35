#include "ptrac/partition.hpp"

#include <algorithm>
#include <string>

#include "ptrac/errors.hpp"

namespace ptrac {

WorkRange calc_device_workload_range(std::size_t np, int num_devices,
                                     int device_id)
{
    if (num_devices < 1) {
        throw ArgumentError("num_devices must be >= 1, got " +
                            std::to_string(num_devices));
    }
    if (device_id < 0 || device_id >= num_devices) {
        throw ArgumentError("device_id " + std::to_string(device_id) +
                            " outside [0, " + std::to_string(num_devices) +
                            ")");
    }
    const auto d = static_cast<std::size_t>(device_id);
    const auto n = static_cast<std::size_t>(num_devices);
    const std::size_t base = np / n;
    const std::size_t rem = np % n;
    const std::size_t size = base + (d < rem ? 1 : 0);
    const std::size_t start = d * base + std::min(d, rem);
    return {device_id, start, start + size};
}

} // namespace ptrac
