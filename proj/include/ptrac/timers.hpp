#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

namespace ptrac {

enum class TimerGroup { INIT, MEMORY, PHYSICS, IO };

const char* to_string(TimerGroup g) noexcept;

/// Device id of a host-scoped timer.
inline constexpr int host_scope = -1;

struct TimerRecord {
    std::string name;
    TimerGroup group = TimerGroup::INIT;
    int device = host_scope;
    std::int64_t elapsed_ns = 0;
};

/// Thread-safe sink for timer records; the only state shared between
/// concurrently running device tasks.
class TimerRegistry {
public:
    void record(TimerRecord rec);
    std::vector<TimerRecord> records() const;

private:
    mutable std::mutex mutex_;
    std::vector<TimerRecord> records_;
};

/// Records the lifetime of the object into a registry.
class ScopedTimer {
public:
    ScopedTimer(TimerRegistry& reg, std::string name, TimerGroup group,
                int device = host_scope);
    ~ScopedTimer();

    ScopedTimer(const ScopedTimer&) = delete;
    ScopedTimer& operator=(const ScopedTimer&) = delete;

private:
    TimerRegistry& reg_;
    std::string name_;
    TimerGroup group_;
    int device_;
    std::chrono::steady_clock::time_point start_;
};

struct TimerSummary {
    std::string name;
    TimerGroup group = TimerGroup::INIT;
    int device = host_scope;
    std::size_t count = 0;
    std::int64_t total_ns = 0;
    double mean_ns = 0.0;
};

/// Aggregates by (name, group, scope), sorted by group, then name, then
/// scope with host first and devices by id.
std::vector<TimerSummary> aggregate_timers(const std::vector<TimerRecord>& records);

/// "host" or "device<d>".
std::string scope_string(int device);

/// CSV table "name,group,scope,count,total_ns,mean_ns".
std::string report_timers(const std::vector<TimerRecord>& records);

} // namespace ptrac
