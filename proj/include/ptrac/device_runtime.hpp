#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "ptrac/model_state.hpp"
#include "ptrac/partition.hpp"
#include "ptrac/rng.hpp"

namespace ptrac {

/// The complete model state that a device region mirrors.
struct ModelState {
    Control ctl;
    ParticleEnsemble atm;
    CacheState cache;
    ClimData clim;
    MeteoField met0;
    MeteoField met1;
    DtArray dt;
    RandomBatch rnd;
};

/// Members of ModelState that can be transferred host -> device.
enum class Field : std::uint32_t {
    ctl = 1u << 0,
    atm = 1u << 1,
    cache = 1u << 2,
    clim = 1u << 3,
    met0 = 1u << 4,
    met1 = 1u << 5,
    dt = 1u << 6,
    random = 1u << 7,
};

class FieldSet {
public:
    constexpr FieldSet() = default;
    constexpr FieldSet(Field f) : bits_(static_cast<std::uint32_t>(f)) {}

    constexpr bool has(Field f) const noexcept
    {
        return (bits_ & static_cast<std::uint32_t>(f)) != 0;
    }

    friend constexpr FieldSet operator|(FieldSet a, FieldSet b) noexcept
    {
        FieldSet out;
        out.bits_ = a.bits_ | b.bits_;
        return out;
    }

    static constexpr FieldSet all() noexcept
    {
        FieldSet out;
        out.bits_ = 0xFFu;
        return out;
    }

private:
    std::uint32_t bits_ = 0;
};

constexpr FieldSet operator|(Field a, Field b) noexcept
{
    return FieldSet(a) | FieldSet(b);
}

/// Hard upper bound on simulated devices.
inline constexpr int max_devices = 64;

/// Number of simulated devices the platform offers: SIM_AVAILABLE_DEVICES
/// when set, else the number of hardware threads (at least 1).
int available_devices();

/// Resolves a requested device count. Negative means all available devices;
/// zero raises ArgumentError; positive counts are capped at max_devices.
int enumerate_devices(int requested, int available);
int enumerate_devices(int requested);

/// One simulated accelerator: a worker thread executing submitted tasks in
/// order.
class Device {
public:
    explicit Device(int id);
    ~Device();

    Device(const Device&) = delete;
    Device& operator=(const Device&) = delete;

    int id() const noexcept { return id_; }

    /// Queues a task. The future carries its exception, if any.
    std::future<void> submit(std::function<void()> task);

    /// Blocks until every submitted task has finished.
    void wait();

    /// Tasks queued or running.
    std::size_t in_flight() const;

private:
    void run();

    int id_;
    mutable std::mutex mutex_;
    std::condition_variable work_cv_;
    std::condition_variable idle_cv_;
    std::deque<std::packaged_task<void()>> queue_;
    std::size_t pending_ = 0;
    bool stopping_ = false;
    std::thread worker_;
};

class DeviceRegion;

class DevicePool {
public:
    explicit DevicePool(int num_devices);

    int size() const noexcept { return static_cast<int>(devices_.size()); }
    Device& device(int device_id);

    /// Enables contract checks on copy-back ranges. On by default.
    void set_debug_checks(bool on) noexcept { debug_checks_ = on; }
    bool debug_checks() const noexcept { return debug_checks_; }

private:
    friend class DeviceRegion;
    friend DeviceRegion region_create(DevicePool&, int, const ModelState&);

    void check_id(int device_id) const;

    std::vector<std::unique_ptr<Device>> devices_;
    std::mutex live_mutex_;
    std::vector<bool> live_;
    bool debug_checks_ = true;
};

enum class RegionState { empty, created, populated, deleted };

const char* to_string(RegionState s) noexcept;

/// A device-private image of the model state with an explicit
/// create / update / delete lifecycle. The image never shares storage with
/// the host state.
class DeviceRegion {
public:
    DeviceRegion() = default;
    ~DeviceRegion();

    DeviceRegion(DeviceRegion&& other) noexcept;
    DeviceRegion& operator=(DeviceRegion&& other) noexcept;
    DeviceRegion(const DeviceRegion&) = delete;
    DeviceRegion& operator=(const DeviceRegion&) = delete;

    int device_id() const noexcept { return device_id_; }
    RegionState state() const noexcept { return state_; }

    /// Device-side state. LifecycleError unless created or populated.
    ModelState& image();
    const ModelState& image() const;

    /// The slice of the ensemble this device owns.
    WorkRange own_range() const;

private:
    friend DeviceRegion region_create(DevicePool&, int, const ModelState&);
    friend void region_update_device(DeviceRegion&, const ModelState&,
                                     FieldSet);
    friend void region_update_host(DeviceRegion&, ModelState&,
                                   const WorkRange&);
    friend void region_delete(DeviceRegion&);
    friend void device_wait(DeviceRegion&);

    void require_live(const char* op) const;
    void release() noexcept;

    DevicePool* pool_ = nullptr;
    int device_id_ = -1;
    RegionState state_ = RegionState::empty;
    std::unique_ptr<ModelState> image_;
};

/// Allocates a region shaped like `host` on one device. The content is not
/// populated. Throws ArgumentError for a bad id and LifecycleError when the
/// device already has a live region.
DeviceRegion region_create(DevicePool& pool, int device_id,
                           const ModelState& host);

/// Deep-copies the named fields host -> device.
void region_update_device(DeviceRegion& region, const ModelState& host,
                          FieldSet fields);

/// Copies the ensemble size and the [start, end) slices of every
/// per-particle ensemble and cache array device -> host. Nothing else on the
/// host is touched.
void region_update_host(DeviceRegion& region, ModelState& host,
                        const WorkRange& range);

/// Releases the image. LifecycleError if already deleted or if the device
/// still has tasks in flight.
void region_delete(DeviceRegion& region);

/// Blocks until the region's device has drained its queue.
void device_wait(DeviceRegion& region);

enum class DispatchMode { parallel, sequential };

/// Runs task(d) once for every device of the pool, concurrently in parallel
/// mode or as a plain loop on the calling thread in sequential mode.
/// Returns after all invocations completed; failures are collected and
/// raised together as DeviceErrors.
void for_each_device_parallel(DevicePool& pool,
                              const std::function<void(int)>& task,
                              DispatchMode mode = DispatchMode::parallel);

} // namespace ptrac
