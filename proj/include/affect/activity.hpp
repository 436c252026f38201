#pragma once

#include "affect/config.hpp"
#include "affect/trace.hpp"

#include <span>

namespace affect {

struct KeystrokeReport {
    std::size_t total_keystrokes = 0;
    std::size_t character_keystrokes = 0;
    std::size_t words_completed = 0;
    // (character keystrokes / 5) per minute of active typing time.
    double words_per_minute = 0.0;
    std::size_t typing_sessions = 0;
    double mean_session_duration = 0.0;      // seconds
    double mean_gap_between_sessions = 0.0;  // seconds
    bool low_productivity_flag = true;

    bool operator==(const KeystrokeReport&) const = default;
};

struct InterruptionReport {
    std::size_t breaks = 0;
    double mean_break_duration = 0.0;  // seconds
    double total_locked_time = 0.0;    // seconds
    bool disengagement_flag = false;

    bool operator==(const InterruptionReport&) const = default;
};

/// Every key class counts toward the total. A new typing session starts
/// after a gap longer than cfg.typing_gap_seconds.
KeystrokeReport keystroke_stats(std::span<const KeystrokeEvent> events, const RuleConfig& cfg);

/// One break per Locked event (after alternation normalization). A Locked
/// with no following Unlocked ends at the workday end (epoch +
/// cfg.workday_hours), or at the lock itself if that is later.
InterruptionReport interruption_stats(std::span<const SessionEvent> events, const RuleConfig& cfg);

// Flags depend only on counts and thresholds.
bool low_productivity(std::size_t total_keystrokes, const RuleConfig& cfg);
bool disengaged(std::size_t breaks, const RuleConfig& cfg);

}  // namespace affect
