#include "affect/activity.hpp"

#include <algorithm>
#include <vector>

namespace affect {

bool low_productivity(std::size_t total_keystrokes, const RuleConfig& cfg) {
    return total_keystrokes < static_cast<std::size_t>(cfg.keystroke_threshold);
}

bool disengaged(std::size_t breaks, const RuleConfig& cfg) {
    return breaks >= static_cast<std::size_t>(cfg.break_threshold);
}

KeystrokeReport keystroke_stats(std::span<const KeystrokeEvent> events, const RuleConfig& cfg) {
    KeystrokeReport r;
    r.total_keystrokes = events.size();
    r.low_productivity_flag = low_productivity(r.total_keystrokes, cfg);
    if (events.empty()) return r;

    const auto gap_ms = static_cast<std::int64_t>(cfg.typing_gap_seconds * 1000.0);
    std::int64_t active_ms = 0;
    std::int64_t gaps_ms = 0;
    Timestamp session_start = events.front().ts;
    r.typing_sessions = 1;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (e.key_class == KeyClass::Character) ++r.character_keystrokes;
        if (e.word_completed) ++r.words_completed;
        if (i == 0) continue;
        const auto gap = e.ts - events[i - 1].ts;
        if (gap > gap_ms) {
            active_ms += events[i - 1].ts - session_start;
            gaps_ms += gap;
            session_start = e.ts;
            ++r.typing_sessions;
        }
    }
    active_ms += events.back().ts - session_start;

    r.mean_session_duration = static_cast<double>(active_ms) / 1000.0 / static_cast<double>(r.typing_sessions);
    if (r.typing_sessions > 1) {
        r.mean_gap_between_sessions =
            static_cast<double>(gaps_ms) / 1000.0 / static_cast<double>(r.typing_sessions - 1);
    }
    if (active_ms > 0) {
        const double minutes = static_cast<double>(active_ms) / 60'000.0;
        r.words_per_minute = static_cast<double>(r.character_keystrokes) / 5.0 / minutes;
    }
    return r;
}

InterruptionReport interruption_stats(std::span<const SessionEvent> events, const RuleConfig& cfg) {
    const std::vector<SessionEvent> normalized =
        normalize_sessions(std::vector<SessionEvent>(events.begin(), events.end()));
    const std::int64_t day_end = cfg.workday_ms();

    InterruptionReport r;
    std::int64_t locked_ms = 0;
    for (std::size_t i = 0; i < normalized.size(); ++i) {
        if (normalized[i].kind != SessionKind::Locked) continue;
        ++r.breaks;
        const Timestamp start = normalized[i].ts;
        const Timestamp end = i + 1 < normalized.size() ? normalized[i + 1].ts
                                                        : std::max(start, Timestamp{day_end});
        locked_ms += end - start;
    }
    r.total_locked_time = static_cast<double>(locked_ms) / 1000.0;
    if (r.breaks > 0) r.mean_break_duration = r.total_locked_time / static_cast<double>(r.breaks);
    r.disengagement_flag = disengaged(r.breaks, cfg);
    return r;
}

}  // namespace affect
