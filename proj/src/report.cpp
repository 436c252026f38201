#include "affect/report.hpp"

#include "affect/csv.hpp"
#include "affect/text.hpp"

#include <fmt/core.h>

#include <algorithm>

namespace affect {

namespace {

using nlohmann::ordered_json;

ordered_json emotion_counts_json(const EmotionCounts& counts) {
    ordered_json j = ordered_json::object();
    for (auto e : kAllEmotions) j[std::string(to_string(e))] = counts[index_of(e)];
    return j;
}

ordered_json emotion_list_json(const std::vector<Emotion>& emotions) {
    ordered_json j = ordered_json::array();
    for (auto e : emotions) j.push_back(to_string(e));
    return j;
}

std::string emotion_list_text(const std::vector<Emotion>& emotions) {
    if (emotions.empty()) return "-";
    std::vector<std::string> parts;
    for (auto e : emotions) parts.emplace_back(to_string(e));
    return text::join(parts, " ");
}

std::string agreement_rate_text(const RapFapAgreement& a) {
    const auto rate = a.rate();
    return rate ? format_fraction(*rate) : "undefined";
}

void append_summary_text(std::string& out, const SessionSummary& s) {
    out += fmt::format("start_ms {}\nend_ms {}\nwindows {}\nargmax {}\n", s.start.ms, s.end.ms, s.window_count,
                       emotion_list_text(s.argmax()));
    for (auto e : kAllEmotions) {
        out += fmt::format("rate {} {}\n", to_string(e), format_fraction(s.rate(e)));
    }
}

}  // namespace

DayPredictions predict_day(const WorkdayTrace& trace, const EmotionDictionary& dict, const RuleConfig& cfg) {
    DayPredictions p;
    p.posture = classify_posture(trace.skeleton, cfg);
    p.face = classify_face(trace.face, cfg);
    p.speech.reserve(trace.speech.size());
    for (const auto& token : trace.speech) p.speech.push_back(classify_speech(token, dict));
    p.fused = fuse_windows(p.posture, p.face, p.speech, cfg);
    for (auto session : split_sessions(p.fused, cfg)) p.sessions.push_back(summarize_session(session));
    p.overall = summarize_session(p.fused);
    p.dwells = detect_dwells(trace.gaze, cfg);
    p.absences = detect_absences(trace.gaze);
    return p;
}

DailyReport build_daily_report(const WorkdayTrace& trace, const DayPredictions& predictions,
                               std::span<const StateResponse> responses, const RuleConfig& cfg) {
    DailyReport r;
    r.user_id = trace.user_id;
    r.date = trace.date;
    r.session_summaries = predictions.sessions;
    r.overall = predictions.overall;
    r.keystrokes = keystroke_stats(trace.keystrokes, cfg);
    r.interruptions = interruption_stats(trace.sessions, cfg);
    r.dwell_count = predictions.dwells.size();
    std::int64_t absent_ms = 0;
    for (const auto& a : predictions.absences) absent_ms += a.end - a.start;
    r.absence_total_seconds = static_cast<double>(absent_ms) / 1000.0;

    for (const auto& resp : responses) {
        if (!trace.user_id.empty() && resp.user_id != trace.user_id) {
            throw ValidationError(
                fmt::format("response from '{}' in report for '{}'", resp.user_id, trace.user_id));
        }
        r.fap_emotions.insert(r.fap_emotions.end(), resp.emotions_experienced.begin(),
                              resp.emotions_experienced.end());
    }
    std::sort(r.fap_emotions.begin(), r.fap_emotions.end());
    r.fap_responses = responses.size();
    r.agreement = compute_agreement(predictions.sessions, responses);

    if (predictions.overall.window_count > 0) r.bar_chart.rap = predictions.overall.top_counts;
    if (!responses.empty()) {
        EmotionCounts counts{};
        for (auto e : r.fap_emotions) ++counts[index_of(e)];
        r.bar_chart.fap = counts;
    }
    return r;
}

std::string format_report_text(const DailyReport& r) {
    std::string out;
    out += fmt::format("daily report\nuser {}\ndate {}\n", r.user_id.empty() ? "-" : r.user_id,
                       r.date.empty() ? "-" : r.date);

    out += fmt::format("\n[sessions]\ncount {}\n", r.session_summaries.size());
    for (std::size_t i = 0; i < r.session_summaries.size(); ++i) {
        out += fmt::format("\n[session {}]\n", i + 1);
        append_summary_text(out, r.session_summaries[i]);
    }
    out += "\n[overall]\n";
    append_summary_text(out, r.overall);

    const auto& k = r.keystrokes;
    out += "\n[keystrokes]\n";
    out += fmt::format("total {}\ncharacter {}\nwords_completed {}\nwords_per_minute {}\n", k.total_keystrokes,
                       k.character_keystrokes, k.words_completed, text::format_fixed(k.words_per_minute, 2));
    out += fmt::format("typing_sessions {}\nmean_session_duration_s {}\nmean_gap_between_sessions_s {}\n",
                       k.typing_sessions, text::format_fixed(k.mean_session_duration, 2),
                       text::format_fixed(k.mean_gap_between_sessions, 2));
    out += fmt::format("low_productivity_flag {}\n", k.low_productivity_flag);

    const auto& b = r.interruptions;
    out += "\n[interruptions]\n";
    out += fmt::format("breaks {}\nmean_break_duration_s {}\ntotal_locked_time_s {}\ndisengagement_flag {}\n",
                       b.breaks, text::format_fixed(b.mean_break_duration, 2),
                       text::format_fixed(b.total_locked_time, 2), b.disengagement_flag);

    out += "\n[gaze]\n";
    out += fmt::format("dwell_count {}\nabsence_total_s {}\n", r.dwell_count,
                       text::format_fixed(r.absence_total_seconds, 2));

    out += "\n[self_reports]\n";
    out += fmt::format("responses {}\nemotions {}\n", r.fap_responses, emotion_list_text(r.fap_emotions));

    out += "\n[agreement]\n";
    out += fmt::format("sessions_compared {}\nagreed {}\nrate {}\n", r.agreement.sessions_compared,
                       r.agreement.agreed, agreement_rate_text(r.agreement));

    out += "\n[bar_chart]\n";
    if (!r.bar_chart.rap && !r.bar_chart.fap) {
        out += "no data\n";
        return out;
    }
    std::string header = "emotion";
    if (r.bar_chart.rap) header += " rap";
    if (r.bar_chart.fap) header += " fap";
    out += header + "\n";
    for (auto e : kAllEmotions) {
        std::string row(to_string(e));
        if (r.bar_chart.rap) row += fmt::format(" {}", (*r.bar_chart.rap)[index_of(e)]);
        if (r.bar_chart.fap) row += fmt::format(" {}", (*r.bar_chart.fap)[index_of(e)]);
        out += row + "\n";
    }
    return out;
}

ordered_json to_json(const SessionSummary& s) {
    ordered_json rates = ordered_json::object();
    for (auto e : kAllEmotions) rates[std::string(to_string(e))] = format_fraction(s.rate(e));
    return {{"start_ms", s.start.ms},
            {"end_ms", s.end.ms},
            {"window_count", s.window_count},
            {"top_counts", emotion_counts_json(s.top_counts)},
            {"rates", rates},
            {"argmax", emotion_list_json(s.argmax())}};
}

ordered_json to_json(const DailyReport& r) {
    ordered_json sessions = ordered_json::array();
    for (const auto& s : r.session_summaries) sessions.push_back(to_json(s));

    const auto& k = r.keystrokes;
    const auto& b = r.interruptions;
    ordered_json series = ordered_json::array();
    if (r.bar_chart.rap) {
        series.push_back({{"name", "rap"}, {"counts", emotion_counts_json(*r.bar_chart.rap)}});
    }
    if (r.bar_chart.fap) {
        series.push_back({{"name", "fap"}, {"counts", emotion_counts_json(*r.bar_chart.fap)}});
    }

    return {{"user_id", r.user_id},
            {"date", r.date},
            {"session_summaries", sessions},
            {"overall", to_json(r.overall)},
            {"keystrokes",
             {{"total_keystrokes", k.total_keystrokes},
              {"character_keystrokes", k.character_keystrokes},
              {"words_completed", k.words_completed},
              {"words_per_minute", k.words_per_minute},
              {"typing_sessions", k.typing_sessions},
              {"mean_session_duration", k.mean_session_duration},
              {"mean_gap_between_sessions", k.mean_gap_between_sessions},
              {"low_productivity_flag", k.low_productivity_flag}}},
            {"interruptions",
             {{"breaks", b.breaks},
              {"mean_break_duration", b.mean_break_duration},
              {"total_locked_time", b.total_locked_time},
              {"disengagement_flag", b.disengagement_flag}}},
            {"dwell_count", r.dwell_count},
            {"absence_total_seconds", r.absence_total_seconds},
            {"fap_responses", r.fap_responses},
            {"fap_emotions", emotion_list_json(r.fap_emotions)},
            {"agreement",
             {{"sessions_compared", r.agreement.sessions_compared},
              {"agreed", r.agreement.agreed},
              {"rate", agreement_rate_text(r.agreement)}}},
            {"bar_chart", {{"series", series}}}};
}

std::string format_report_machine(const DailyReport& report) { return to_json(report).dump(2) + "\n"; }

ordered_json to_json(const ModalityPrediction& p) {
    return {{"modality", to_string(p.modality)},
            {"window_start", p.window_start.ms},
            {"window_end", p.window_end.ms},
            {"emotion", to_string(p.emotion)},
            {"fired_rule", p.fired_rule ? ordered_json(to_string(*p.fired_rule)) : ordered_json(nullptr)}};
}

ordered_json to_json(const FusedPrediction& p) {
    ordered_json ranked = ordered_json::array();
    for (const auto& r : p.ranked) {
        ranked.push_back({{"emotion", to_string(r.emotion)}, {"probability", format_fraction(r.probability)}});
    }
    ordered_json votes = ordered_json::array();
    for (const auto& v : p.votes) votes.push_back(to_json(v));
    return {{"window_start", p.window_start.ms},
            {"window_end", p.window_end.ms},
            {"top", to_string(p.top)},
            {"ranked", ranked},
            {"votes", votes}};
}

ordered_json predictions_to_json(const std::string& user_id, const std::string& date, const DayPredictions& p) {
    ordered_json fused = ordered_json::array();
    for (const auto& f : p.fused) fused.push_back(to_json(f));
    ordered_json sessions = ordered_json::array();
    for (const auto& s : p.sessions) sessions.push_back(to_json(s));
    return {{"user_id", user_id},
            {"date", date},
            {"fused", fused},
            {"session_summaries", sessions},
            {"overall", to_json(p.overall)}};
}

std::string format_gaze_scatter(std::span<const GazeSample> samples) {
    std::string out = "ts_ms,available,x\n";
    for (const auto& s : samples) {
        out += csv::format_row({std::to_string(s.ts.ms), s.available() ? "true" : "false",
                                s.available() ? text::format_double(s.position->x) : ""});
    }
    return out;
}

}  // namespace affect
