#include "affect/rap.hpp"

namespace affect {

std::vector<DwellEvent> detect_dwells(std::span<const GazeSample> samples, const RuleConfig& cfg) {
    const auto min_ms = static_cast<std::int64_t>(cfg.dwell_seconds * 1000.0);
    std::vector<DwellEvent> out;

    std::size_t i = 0;
    while (i < samples.size()) {
        if (!samples[i].available()) {
            ++i;
            continue;
        }
        Point2 sum = *samples[i].position;
        std::size_t count = 1;
        std::size_t j = i + 1;
        for (; j < samples.size() && samples[j].available(); ++j) {
            const Point2 centroid{sum.x / static_cast<double>(count), sum.y / static_cast<double>(count)};
            const Point2 p = *samples[j].position;
            if (distance(p, centroid) > cfg.dwell_radius) break;
            sum.x += p.x;
            sum.y += p.y;
            ++count;
        }
        const auto first = samples[i].ts;
        const auto last = samples[j - 1].ts;
        if (last - first > min_ms) {
            out.push_back({first, last,
                           {sum.x / static_cast<double>(count), sum.y / static_cast<double>(count)},
                           count});
        }
        i = j;
    }
    return out;
}

std::vector<AbsenceInterval> detect_absences(std::span<const GazeSample> samples) {
    std::vector<AbsenceInterval> out;
    std::size_t i = 0;
    while (i < samples.size()) {
        if (samples[i].available()) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < samples.size() && !samples[j].available()) ++j;
        const Timestamp end = j < samples.size() ? samples[j].ts : samples[j - 1].ts;
        out.push_back({samples[i].ts, end});
        i = j;
    }
    return out;
}

}  // namespace affect
