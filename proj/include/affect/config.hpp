#pragma once

#include "affect/core.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <string_view>

namespace affect {

/// Order in which modalities win vote ties, highest priority first.
using TiePriority = std::array<Modality, kVotingModalityCount>;

inline constexpr TiePriority kDefaultTiePriority = {Modality::Face, Modality::Speech,
                                                    Modality::Posture};

/// Thresholds and windowing parameters shared by the predictors.
///
/// Face thresholds (`t_lip`, `t_eye`, `d_cheek`) are fractions of the
/// cheek-to-cheek width so a rule fires the same way at any sensor distance.
/// Posture thresholds are in sensor meters.
struct RuleConfig {
    int window_len = 10;
    int frame_majority = 6;
    double t_lip = 0.45;
    double t_eye = 0.04;
    double d_cheek = 0.25;
    double r_head = 0.15;
    double w_front = 0.25;
    double tilt_thresh = 0.08;
    double dwell_seconds = 5.0;
    double dwell_radius = 0.05;
    int keystroke_threshold = 6000;
    int break_threshold = 10;
    double typing_gap_seconds = 60.0;
    double workday_hours = 8.0;
    // Frames further apart than this start a new monitored session.
    double sensor_gap_seconds = 60.0;
    TiePriority tie_order = kDefaultTiePriority;

    /// Throws ValidationError naming the first offending field.
    void validate() const;

    std::int64_t workday_ms() const;

    bool operator==(const RuleConfig&) const = default;
};

/// Parses `key=value` lines; `#` starts a comment. Unknown keys, malformed
/// values, and non-positive fields are errors. Missing keys keep defaults.
RuleConfig parse_rule_config(std::string_view text, const std::string& origin = "<config>");
RuleConfig load_rule_config(const std::filesystem::path& path);

/// Inverse of parse_rule_config; every field is written.
std::string serialize_rule_config(const RuleConfig& cfg);

}  // namespace affect
