#include "ptrac/device_runtime.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "ptrac/errors.hpp"
#include "text_util.hpp"

namespace ptrac {

namespace {

template <class T>
void copy_slice(const std::vector<T>& src, std::vector<T>& dst,
                const WorkRange& r)
{
    std::copy(src.begin() + static_cast<std::ptrdiff_t>(r.start),
              src.begin() + static_cast<std::ptrdiff_t>(r.end),
              dst.begin() + static_cast<std::ptrdiff_t>(r.start));
}

std::string range_str(const WorkRange& r)
{
    return "[" + std::to_string(r.start) + ", " + std::to_string(r.end) + ")";
}

} // namespace

int available_devices()
{
    if (const char* env = std::getenv("SIM_AVAILABLE_DEVICES")) {
        if (auto n = text::parse_number<int>(env); n && *n > 0) {
            return std::min(*n, max_devices);
        }
    }
    const auto hw = static_cast<int>(std::thread::hardware_concurrency());
    return std::clamp(hw, 1, max_devices);
}

int enumerate_devices(int requested, int available)
{
    if (requested == 0) {
        throw ArgumentError("device count 0 is invalid; use a negative value "
                            "for all available devices");
    }
    if (requested < 0) {
        return std::clamp(available, 1, max_devices);
    }
    return std::min(requested, max_devices);
}

int enumerate_devices(int requested)
{
    return enumerate_devices(requested, available_devices());
}

// ---------------------------------------------------------------------------

Device::Device(int id) : id_(id), worker_([this] { run(); }) {}

Device::~Device()
{
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    work_cv_.notify_all();
    worker_.join();
}

std::future<void> Device::submit(std::function<void()> task)
{
    std::packaged_task<void()> job(std::move(task));
    auto fut = job.get_future();
    {
        std::lock_guard lock(mutex_);
        queue_.push_back(std::move(job));
        ++pending_;
    }
    work_cv_.notify_one();
    return fut;
}

void Device::wait()
{
    std::unique_lock lock(mutex_);
    idle_cv_.wait(lock, [this] { return pending_ == 0; });
}

std::size_t Device::in_flight() const
{
    std::lock_guard lock(mutex_);
    return pending_;
}

void Device::run()
{
    while (true) {
        std::packaged_task<void()> job;
        {
            std::unique_lock lock(mutex_);
            work_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
            if (queue_.empty()) {
                return;
            }
            job = std::move(queue_.front());
            queue_.pop_front();
        }
        job();
        {
            std::lock_guard lock(mutex_);
            --pending_;
        }
        idle_cv_.notify_all();
    }
}

// ---------------------------------------------------------------------------

DevicePool::DevicePool(int num_devices)
{
    if (num_devices < 1 || num_devices > max_devices) {
        throw ArgumentError("device pool size must be in [1, " +
                            std::to_string(max_devices) + "], got " +
                            std::to_string(num_devices));
    }
    devices_.reserve(static_cast<std::size_t>(num_devices));
    for (int d = 0; d < num_devices; ++d) {
        devices_.push_back(std::make_unique<Device>(d));
    }
    live_.assign(static_cast<std::size_t>(num_devices), false);
}

void DevicePool::check_id(int device_id) const
{
    if (device_id < 0 || device_id >= size()) {
        throw ArgumentError("device id " + std::to_string(device_id) +
                            " outside [0, " + std::to_string(size()) + ")");
    }
}

Device& DevicePool::device(int device_id)
{
    check_id(device_id);
    return *devices_[static_cast<std::size_t>(device_id)];
}

// ---------------------------------------------------------------------------

const char* to_string(RegionState s) noexcept
{
    switch (s) {
    case RegionState::empty:
        return "empty";
    case RegionState::created:
        return "created";
    case RegionState::populated:
        return "populated";
    case RegionState::deleted:
        return "deleted";
    }
    return "?";
}

DeviceRegion::~DeviceRegion() { release(); }

DeviceRegion::DeviceRegion(DeviceRegion&& other) noexcept
    : pool_(std::exchange(other.pool_, nullptr)),
      device_id_(std::exchange(other.device_id_, -1)),
      state_(std::exchange(other.state_, RegionState::empty)),
      image_(std::move(other.image_))
{
}

DeviceRegion& DeviceRegion::operator=(DeviceRegion&& other) noexcept
{
    if (this != &other) {
        release();
        pool_ = std::exchange(other.pool_, nullptr);
        device_id_ = std::exchange(other.device_id_, -1);
        state_ = std::exchange(other.state_, RegionState::empty);
        image_ = std::move(other.image_);
    }
    return *this;
}

void DeviceRegion::release() noexcept
{
    if (pool_ && state_ != RegionState::deleted &&
        state_ != RegionState::empty) {
        std::lock_guard lock(pool_->live_mutex_);
        pool_->live_[static_cast<std::size_t>(device_id_)] = false;
    }
    image_.reset();
}

void DeviceRegion::require_live(const char* op) const
{
    if (state_ != RegionState::created && state_ != RegionState::populated) {
        throw LifecycleError(std::string(op) + " on device " +
                             std::to_string(device_id_) + " region in state " +
                             to_string(state_));
    }
}

ModelState& DeviceRegion::image()
{
    require_live("image access");
    return *image_;
}

const ModelState& DeviceRegion::image() const
{
    require_live("image access");
    return *image_;
}

WorkRange DeviceRegion::own_range() const
{
    require_live("own_range");
    return calc_device_workload_range(image_->atm.np, pool_->size(),
                                      device_id_);
}

DeviceRegion region_create(DevicePool& pool, int device_id,
                           const ModelState& host)
{
    pool.check_id(device_id);
    {
        std::lock_guard lock(pool.live_mutex_);
        const auto slot = static_cast<std::size_t>(device_id);
        if (pool.live_[slot]) {
            throw LifecycleError("device " + std::to_string(device_id) +
                                 " already has a live data region");
        }
        pool.live_[slot] = true;
    }

    // Shape only; contents are undefined until the first device update.
    auto image = std::make_unique<ModelState>();
    const auto np = host.atm.np;
    image->atm.np = np;
    image->atm.time.resize(np);
    image->atm.p.resize(np);
    image->atm.zeta.resize(np);
    image->atm.lon.resize(np);
    image->atm.lat.resize(np);
    image->atm.q.assign(host.atm.q.size(), std::vector<double>(np));
    image->cache.resize(np);
    image->dt.dt.resize(np);
    image->rnd.resize(np);

    DeviceRegion region;
    region.pool_ = &pool;
    region.device_id_ = device_id;
    region.state_ = RegionState::created;
    region.image_ = std::move(image);
    return region;
}

void region_update_device(DeviceRegion& region, const ModelState& host,
                          FieldSet fields)
{
    region.require_live("update device");
    auto& img = *region.image_;
    if (fields.has(Field::ctl)) {
        img.ctl = host.ctl;
    }
    if (fields.has(Field::atm)) {
        img.atm = host.atm;
    }
    if (fields.has(Field::cache)) {
        img.cache = host.cache;
    }
    if (fields.has(Field::clim)) {
        img.clim = host.clim;
    }
    if (fields.has(Field::met0)) {
        img.met0 = host.met0;
    }
    if (fields.has(Field::met1)) {
        img.met1 = host.met1;
    }
    if (fields.has(Field::dt)) {
        img.dt = host.dt;
    }
    if (fields.has(Field::random)) {
        img.rnd = host.rnd;
    }
    region.state_ = RegionState::populated;
}

void region_update_host(DeviceRegion& region, ModelState& host,
                        const WorkRange& range)
{
    region.require_live("update host");
    if (region.state_ != RegionState::populated) {
        throw LifecycleError("update host on device " +
                             std::to_string(region.device_id_) +
                             " before the region was populated");
    }
    const auto& img = *region.image_;
    const auto np = img.atm.np;
    if (range.start > range.end || range.end > np) {
        throw BoundsError("copy-back range " + range_str(range) +
                          " outside ensemble of " + std::to_string(np));
    }
    if (host.atm.np != np || !host.atm.consistent() ||
        host.atm.q.size() != img.atm.q.size() ||
        host.cache.iso_var.size() != np) {
        throw ContractError("host state is not shaped like device " +
                            std::to_string(region.device_id_) + " image");
    }
    if (region.pool_->debug_checks() && !range.empty()) {
        const auto own = region.own_range();
        if (range.start < own.start || range.end > own.end) {
            throw ContractError("device " + std::to_string(region.device_id_) +
                                " copy-back " + range_str(range) +
                                " overlaps ranges owned by other devices (own " +
                                range_str(own) + ")");
        }
    }

    host.atm.np = np;
    copy_slice(img.atm.time, host.atm.time, range);
    copy_slice(img.atm.p, host.atm.p, range);
    copy_slice(img.atm.zeta, host.atm.zeta, range);
    copy_slice(img.atm.lon, host.atm.lon, range);
    copy_slice(img.atm.lat, host.atm.lat, range);
    for (std::size_t k = 0; k < img.atm.q.size(); ++k) {
        copy_slice(img.atm.q[k], host.atm.q[k], range);
    }
    for (std::size_t c = 0; c < 3; ++c) {
        copy_slice(img.cache.uvwp[c], host.cache.uvwp[c], range);
    }
    copy_slice(img.cache.iso_var, host.cache.iso_var, range);
}

void region_delete(DeviceRegion& region)
{
    if (region.state_ == RegionState::deleted) {
        throw LifecycleError("device " + std::to_string(region.device_id_) +
                             " region deleted twice");
    }
    region.require_live("delete");
    if (region.pool_->device(region.device_id_).in_flight() != 0) {
        throw LifecycleError("delete on device " +
                             std::to_string(region.device_id_) +
                             " with tasks in flight; wait first");
    }
    region.release();
    region.state_ = RegionState::deleted;
}

void device_wait(DeviceRegion& region)
{
    if (region.pool_) {
        region.pool_->device(region.device_id_).wait();
    }
}

void for_each_device_parallel(DevicePool& pool,
                              const std::function<void(int)>& task,
                              DispatchMode mode)
{
    std::vector<DeviceErrors::Failure> failures;
    auto record = [&failures](int d, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            failures.push_back({d, e.what()});
        } catch (...) {
            failures.push_back({d, "unknown exception"});
        }
    };

    if (mode == DispatchMode::sequential) {
        for (int d = 0; d < pool.size(); ++d) {
            try {
                task(d);
            } catch (...) {
                record(d, std::current_exception());
            }
        }
    } else {
        std::vector<std::future<void>> futures;
        futures.reserve(static_cast<std::size_t>(pool.size()));
        for (int d = 0; d < pool.size(); ++d) {
            futures.push_back(pool.device(d).submit([&task, d] { task(d); }));
        }
        for (int d = 0; d < pool.size(); ++d) {
            try {
                futures[static_cast<std::size_t>(d)].get();
            } catch (...) {
                record(d, std::current_exception());
            }
            pool.device(d).wait();
        }
    }
    if (!failures.empty()) {
        throw DeviceErrors(std::move(failures));
    }
}

} // namespace ptrac
