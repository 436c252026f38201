/**
 * report.hpp: per-day pipeline and the daily report.
 *
 * predict_day runs every predictor over one workday trace; build_daily_report
 * combines those predictions with activity statistics and self-reports. Both
 * report serializations are deterministic, so equal inputs give equal bytes.
 */

#pragma once

#include "affect/activity.hpp"
#include "affect/config.hpp"
#include "affect/fap.hpp"
#include "affect/fusion.hpp"
#include "affect/rap.hpp"
#include "affect/trace.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace affect {

struct DayPredictions {
    std::vector<ModalityPrediction> posture;
    std::vector<ModalityPrediction> face;
    std::vector<ModalityPrediction> speech;
    std::vector<FusedPrediction> fused;
    std::vector<SessionSummary> sessions;  // one per monitored session
    SessionSummary overall;                // all fused windows of the day
    std::vector<DwellEvent> dwells;
    std::vector<AbsenceInterval> absences;

    bool operator==(const DayPredictions&) const = default;
};

DayPredictions predict_day(const WorkdayTrace& trace, const EmotionDictionary& dict, const RuleConfig& cfg);

using EmotionCounts = std::array<std::size_t, kEmotionCount>;

/// Two separate series: measured (fused-window top emotions) and self-reported
/// (questionnaire selections). A series is absent when it has no source data.
struct BarChart {
    std::optional<EmotionCounts> rap;
    std::optional<EmotionCounts> fap;

    bool operator==(const BarChart&) const = default;
};

struct DailyReport {
    std::string user_id;
    std::string date;
    std::vector<SessionSummary> session_summaries;
    SessionSummary overall;
    KeystrokeReport keystrokes;
    InterruptionReport interruptions;
    std::size_t dwell_count = 0;
    double absence_total_seconds = 0.0;
    std::size_t fap_responses = 0;
    std::vector<Emotion> fap_emotions;  // multiset, sorted
    RapFapAgreement agreement;
    BarChart bar_chart;

    bool operator==(const DailyReport&) const = default;
};

/// Throws ValidationError when a response belongs to another user.
DailyReport build_daily_report(const WorkdayTrace& trace, const DayPredictions& predictions,
                               std::span<const StateResponse> responses, const RuleConfig& cfg);

/// Sectioned plain text, one section per report field.
std::string format_report_text(const DailyReport& report);
nlohmann::ordered_json to_json(const DailyReport& report);
/// to_json(report) dumped with two-space indentation and a final newline.
std::string format_report_machine(const DailyReport& report);

nlohmann::ordered_json to_json(const ModalityPrediction& p);
nlohmann::ordered_json to_json(const FusedPrediction& p);
nlohmann::ordered_json to_json(const SessionSummary& s);
/// Fused windows, session summaries, and the day summary.
nlohmann::ordered_json predictions_to_json(const std::string& user_id, const std::string& date,
                                           const DayPredictions& predictions);

/// Gaze x-coordinate time series: `ts_ms,available,x`, x empty while away.
std::string format_gaze_scatter(std::span<const GazeSample> samples);

}  // namespace affect
