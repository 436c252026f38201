/**
 * fap.hpp: self-reported feedback: the twice-daily state questionnaire, the
 * end-of-day system evaluation, their CSV stores, and agreement between
 * self-reports and rule-based predictions.
 *
 * responses.csv and eval.csv share one row shape, one row per answered
 * question:
 *
 *   ts_ms,user_id,question_id,answer
 *
 * Multi-choice answers are joined with ';'. A response is the run of rows
 * sharing (ts_ms, user_id), with every question of its questionnaire present
 * exactly once and in order.
 */

#pragma once

#include "affect/core.hpp"
#include "affect/fusion.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace affect {

class CapExceeded : public Error {
public:
    using Error::Error;
};

class DuplicateResponse : public Error {
public:
    using Error::Error;
};

class EmptySession : public Error {
public:
    using Error::Error;
};

inline constexpr std::size_t kDailyStateResponseCap = 2;

// ---------------------------------------------------------------------------
// Questionnaire definitions
// ---------------------------------------------------------------------------

enum class QuestionKind : std::uint8_t { Choice, Multi, Scale };

struct Question {
    std::string id;  // "Q1".."Q7"
    QuestionKind kind = QuestionKind::Choice;
    std::string text;
    std::vector<std::string> options;

    bool allows(std::string_view option) const;
};

/// Both questionnaires as shipped in data/questionnaire.json. Loading checks
/// the fixed structure: state Q1..Q7 with Q4..Q6 multi-choice and Q6 over the
/// emotion labels; evaluation Q1..Q5 with Q3..Q5 on the effectiveness scale.
struct Questionnaire {
    std::vector<Question> state;
    std::vector<Question> evaluation;

    const Question& state_question(std::string_view id) const;
    const Question& evaluation_question(std::string_view id) const;
};

Questionnaire parse_questionnaire(std::string_view json_text, const std::string& origin = "<questionnaire>");
Questionnaire load_questionnaire(const std::filesystem::path& path);
std::filesystem::path default_data_dir();
/// Cached parse of default_data_dir()/questionnaire.json.
const Questionnaire& default_questionnaire();

nlohmann::ordered_json to_json(const Questionnaire& q);

// ---------------------------------------------------------------------------
// Responses
// ---------------------------------------------------------------------------

enum class Effectiveness : std::uint8_t { NotEffective, SomewhatEffective, VeryEffective };

inline constexpr std::array<Effectiveness, 3> kAllEffectiveness = {
    Effectiveness::NotEffective, Effectiveness::SomewhatEffective, Effectiveness::VeryEffective};

std::string_view to_string(Effectiveness e);
std::optional<Effectiveness> parse_effectiveness(std::string_view text);

struct StateResponse {
    std::string user_id;
    Timestamp ts;
    std::string age_group;                         // Q1
    std::string years_at_job;                      // Q2
    std::string mental_health_rating;              // Q3
    std::vector<std::string> unhappiness_reasons;  // Q4
    std::vector<std::string> satisfaction_reasons; // Q5
    std::set<Emotion> emotions_experienced;        // Q6
    std::string physical_feeling;                  // Q7

    bool operator==(const StateResponse&) const = default;
};

struct EvalResponse {
    std::string user_id;
    Timestamp ts;
    std::string age_group;     // Q1
    std::string years_at_job;  // Q2
    // Q3 assessment, Q4 boosters, Q5 overall.
    std::array<Effectiveness, 3> ratings{};

    bool operator==(const EvalResponse&) const = default;
};

/// Throws ValidationError: empty user id, answers outside the option sets,
/// empty or repeated multi-choice selections, option text containing ';'.
void validate(const StateResponse& r, const Questionnaire& q = default_questionnaire());
void validate(const EvalResponse& r, const Questionnaire& q = default_questionnaire());

inline constexpr std::string_view kResponsesHeader = "ts_ms,user_id,question_id,answer\n";

std::string format_rows(const StateResponse& r);
std::string format_rows(const EvalResponse& r);

/// Whole-file parsers (header optional). Throw ParseError on malformed or
/// incomplete groups and ValidationError on answers outside the option sets.
std::vector<StateResponse> parse_state_responses(std::string_view content, const std::string& origin,
                                                 const Questionnaire& q = default_questionnaire());
std::vector<EvalResponse> parse_eval_responses(std::string_view content, const std::string& origin,
                                               const Questionnaire& q = default_questionnaire());

// Wire form: {"user_id", "ts", "answers": {"Q1": "...", "Q4": [...], ...}}.
// Parsing throws ValidationError on any missing, extra, or invalid field.
nlohmann::ordered_json to_json(const StateResponse& r);
nlohmann::ordered_json to_json(const EvalResponse& r);
StateResponse state_response_from_json(const nlohmann::json& j, const Questionnaire& q = default_questionnaire());
EvalResponse eval_response_from_json(const nlohmann::json& j, const Questionnaire& q = default_questionnaire());

/// Cuts a torn final line and any trailing incomplete response group so the
/// file parses again after an interrupted append. Returns bytes removed.
std::size_t repair_response_file(const std::filesystem::path& path, std::size_t questions_per_response);

/// File-backed response store rooted at a data directory:
///
///   <root>/<user>/<date>/responses.csv   state responses, at most two per day
///   <root>/eval.csv                      evaluation responses
///
/// Appends are durable before record_* returns. Recording is serialized per
/// user, so concurrent submissions can never admit a third daily response.
class ResponseStore {
public:
    explicit ResponseStore(std::filesystem::path root, const Questionnaire& q = default_questionnaire());

    /// Throws ValidationError, DuplicateResponse (same ts and user already
    /// stored that day), or CapExceeded.
    void record_state(const std::string& date, const StateResponse& r);
    /// Throws ValidationError or DuplicateResponse.
    void record_eval(const EvalResponse& r);

    std::vector<StateResponse> state_responses(const std::string& user_id, const std::string& date) const;
    std::vector<EvalResponse> eval_responses() const;

    std::filesystem::path responses_path(const std::string& user_id, const std::string& date) const;
    std::filesystem::path eval_path() const;

private:
    std::mutex& user_mutex(const std::string& user_id) const;

    std::filesystem::path root_;
    const Questionnaire* questionnaire_;
    mutable std::mutex table_mutex_;
    mutable std::map<std::string, std::unique_ptr<std::mutex>> user_mutexes_;
    mutable std::mutex eval_mutex_;
};

// ---------------------------------------------------------------------------
// Validation against predictions
// ---------------------------------------------------------------------------

/// True when an emotion with the session's highest rate was reported. Throws
/// EmptySession for a summary without windows.
bool validate_rap(const SessionSummary& summary, const StateResponse& response);

struct RapFapAgreement {
    std::size_t sessions_compared = 0;
    std::size_t agreed = 0;

    void add(bool agreement);
    /// agreed / sessions_compared; empty when nothing was compared.
    std::optional<Fraction> rate() const;

    bool operator==(const RapFapAgreement&) const = default;
};

/// Pairs every non-empty session with the response closest in time to the
/// session midpoint (earlier response on ties). No responses -> nothing
/// compared.
RapFapAgreement compute_agreement(std::span<const SessionSummary> sessions,
                                  std::span<const StateResponse> responses);

// ---------------------------------------------------------------------------
// Evaluation summary
// ---------------------------------------------------------------------------

struct EvalSummary {
    std::size_t responses = 0;
    // counts[question][scale point] for Q3..Q5.
    std::array<std::array<std::size_t, 3>, 3> counts{};
    bool none_not_effective = true;

    bool operator==(const EvalSummary&) const = default;
};

EvalSummary summarize_eval(std::span<const EvalResponse> responses);
nlohmann::ordered_json to_json(const EvalSummary& s);

}  // namespace affect
