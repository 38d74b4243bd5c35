#include "ptrac/timers.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "text_util.hpp"

namespace ptrac {

const char* to_string(TimerGroup g) noexcept
{
    switch (g) {
    case TimerGroup::INIT:
        return "INIT";
    case TimerGroup::MEMORY:
        return "MEMORY";
    case TimerGroup::PHYSICS:
        return "PHYSICS";
    case TimerGroup::IO:
        return "IO";
    }
    return "?";
}

void TimerRegistry::record(TimerRecord rec)
{
    std::lock_guard lock(mutex_);
    records_.push_back(std::move(rec));
}

std::vector<TimerRecord> TimerRegistry::records() const
{
    std::lock_guard lock(mutex_);
    return records_;
}

ScopedTimer::ScopedTimer(TimerRegistry& reg, std::string name,
                         TimerGroup group, int device)
    : reg_(reg), name_(std::move(name)), group_(group), device_(device),
      start_(std::chrono::steady_clock::now())
{
}

ScopedTimer::~ScopedTimer()
{
    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                        std::chrono::steady_clock::now() - start_)
                        .count();
    try {
        reg_.record({std::move(name_), group_, device_, std::max<std::int64_t>(ns, 0)});
    } catch (...) {
        // Allocation failure while recording is not worth terminating for.
    }
}

std::string scope_string(int device)
{
    return device == host_scope ? "host" : "device" + std::to_string(device);
}

std::vector<TimerSummary> aggregate_timers(const std::vector<TimerRecord>& records)
{
    using Key = std::tuple<TimerGroup, std::string, int>;
    std::map<Key, TimerSummary> acc;
    for (const auto& r : records) {
        auto& s = acc[Key{r.group, r.name, r.device}];
        s.name = r.name;
        s.group = r.group;
        s.device = r.device;
        ++s.count;
        s.total_ns += r.elapsed_ns;
    }
    std::vector<TimerSummary> out;
    out.reserve(acc.size());
    for (auto& [key, s] : acc) {
        s.mean_ns = static_cast<double>(s.total_ns) / static_cast<double>(s.count);
        out.push_back(std::move(s));
    }
    return out;
}

std::string report_timers(const std::vector<TimerRecord>& records)
{
    std::string out = "name,group,scope,count,total_ns,mean_ns\n";
    for (const auto& s : aggregate_timers(records)) {
        out += s.name + "," + to_string(s.group) + "," + scope_string(s.device) +
               "," + std::to_string(s.count) + "," + std::to_string(s.total_ns) +
               ",";
        text::append_double(out, s.mean_ns);
        out += '\n';
    }
    return out;
}

} // namespace ptrac
