#include "affect/fap.hpp"

#include "affect/csv.hpp"
#include "affect/fileio.hpp"
#include "affect/text.hpp"
#include "affect/trace.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>

namespace affect {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::size_t kStateQuestions = 7;
constexpr std::size_t kEvalQuestions = 5;

std::string question_id(std::size_t index) { return fmt::format("Q{}", index + 1); }

std::string_view to_string(QuestionKind k) {
    switch (k) {
        case QuestionKind::Choice: return "choice";
        case QuestionKind::Multi: return "multi";
        case QuestionKind::Scale: return "scale";
    }
    return "choice";
}

std::optional<QuestionKind> parse_kind(std::string_view s) {
    if (s == "choice") return QuestionKind::Choice;
    if (s == "multi") return QuestionKind::Multi;
    if (s == "scale") return QuestionKind::Scale;
    return std::nullopt;
}

std::vector<Question> parse_section(const json& j, const char* name, std::size_t expected,
                                    const std::string& origin) {
    auto fail = [&](const std::string& why) { throw ParseError(origin, 0, fmt::format("{}: {}", name, why)); };
    if (!j.contains(name) || !j.at(name).is_array()) fail("missing question list");
    const auto& list = j.at(name);
    if (list.size() != expected) fail(fmt::format("expected {} questions, got {}", expected, list.size()));
    std::vector<Question> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& item = list[i];
        if (!item.is_object()) fail("question is not an object");
        Question q;
        try {
            q.id = item.at("id").get<std::string>();
            q.text = item.at("text").get<std::string>();
            const auto kind = parse_kind(item.at("kind").get<std::string>());
            if (!kind) fail(fmt::format("{} has an unknown kind", q.id));
            q.kind = *kind;
            q.options = item.at("options").get<std::vector<std::string>>();
        } catch (const json::exception& e) {
            fail(e.what());
        }
        if (q.id != question_id(i)) fail(fmt::format("expected {}, got {}", question_id(i), q.id));
        if (q.options.empty()) fail(fmt::format("{} has no options", q.id));
        std::set<std::string> seen;
        for (const auto& opt : q.options) {
            if (opt.empty() || opt.find(';') != std::string::npos || opt.find('\n') != std::string::npos) {
                fail(fmt::format("{} has an invalid option '{}'", q.id, opt));
            }
            if (!seen.insert(opt).second) fail(fmt::format("{} repeats option '{}'", q.id, opt));
        }
        out.push_back(std::move(q));
    }
    return out;
}

const Question& find_question(const std::vector<Question>& list, std::string_view id) {
    for (const auto& q : list) {
        if (q.id == id) return q;
    }
    throw ValidationError(fmt::format("unknown question {}", id));
}

void check_choice(const Question& q, const std::string& answer) {
    if (!q.allows(answer)) throw ValidationError(fmt::format("{}: '{}' is not an option", q.id, answer));
}

void check_multi(const Question& q, const std::vector<std::string>& answers) {
    if (answers.empty()) throw ValidationError(fmt::format("{}: no option selected", q.id));
    std::set<std::string> seen;
    for (const auto& a : answers) {
        check_choice(q, a);
        if (!seen.insert(a).second) throw ValidationError(fmt::format("{}: '{}' selected twice", q.id, a));
    }
}

void check_common(const std::string& user_id, Timestamp ts) {
    if (!text::is_safe_id(user_id)) throw ValidationError(fmt::format("invalid user id '{}'", user_id));
    if (ts.ms < 0) throw ValidationError("negative timestamp");
}

std::string join_emotions(const std::set<Emotion>& emotions) {
    std::vector<std::string> parts;
    for (auto e : emotions) parts.emplace_back(to_string(e));
    return text::join(parts, ";");
}

std::set<Emotion> parse_emotions(const std::vector<std::string>& labels) {
    if (labels.empty()) throw ValidationError("Q6: no option selected");
    std::set<Emotion> out;
    for (const auto& label : labels) {
        const auto e = parse_emotion(label);
        if (!e) throw ValidationError(fmt::format("Q6: unknown emotion '{}'", label));
        if (!out.insert(*e).second) throw ValidationError(fmt::format("Q6: '{}' selected twice", label));
    }
    return out;
}

std::vector<std::string> state_answers(const StateResponse& r) {
    return {r.age_group,
            r.years_at_job,
            r.mental_health_rating,
            text::join(r.unhappiness_reasons, ";"),
            text::join(r.satisfaction_reasons, ";"),
            join_emotions(r.emotions_experienced),
            r.physical_feeling};
}

std::vector<std::string> eval_answers(const EvalResponse& r) {
    return {r.age_group, r.years_at_job, std::string(to_string(r.ratings[0])),
            std::string(to_string(r.ratings[1])), std::string(to_string(r.ratings[2]))};
}

std::string format_group(const std::string& user_id, Timestamp ts, const std::vector<std::string>& answers) {
    std::string out;
    for (std::size_t i = 0; i < answers.size(); ++i) {
        out += csv::format_row({std::to_string(ts.ms), user_id, question_id(i), answers[i]});
    }
    return out;
}

struct RawGroup {
    std::size_t line = 0;
    std::string user_id;
    Timestamp ts;
    std::vector<std::string> answers;
};

std::vector<RawGroup> parse_groups(std::string_view content, const std::string& origin, std::size_t per_group) {
    auto records = csv::parse(content, origin);
    std::size_t i = 0;
    if (!records.empty()) {
        const auto& f = records[0].fields;
        if (f.size() == 4 && f[0] == "ts_ms" && f[1] == "user_id" && f[2] == "question_id" && f[3] == "answer") {
            i = 1;
        }
    }
    std::vector<RawGroup> groups;
    while (i < records.size()) {
        RawGroup g;
        g.line = records[i].line;
        for (std::size_t q = 0; q < per_group; ++q, ++i) {
            if (i >= records.size()) {
                throw ParseError(origin, g.line, fmt::format("incomplete response: {} of {} rows", q, per_group));
            }
            const auto& rec = records[i];
            if (rec.fields.size() != 4) {
                throw ParseError(origin, rec.line, fmt::format("expected 4 fields, got {}", rec.fields.size()));
            }
            const auto ts = text::parse_int(rec.fields[0]);
            if (!ts) throw ParseError(origin, rec.line, fmt::format("bad timestamp '{}'", rec.fields[0]));
            if (q == 0) {
                g.ts = Timestamp{*ts};
                g.user_id = rec.fields[1];
            } else if (*ts != g.ts.ms || rec.fields[1] != g.user_id) {
                throw ParseError(origin, rec.line, "row does not belong to the response that starts at line " +
                                                       std::to_string(g.line));
            }
            if (rec.fields[2] != question_id(q)) {
                throw ParseError(origin, rec.line,
                                 fmt::format("expected question {}, got '{}'", question_id(q), rec.fields[2]));
            }
            g.answers.push_back(rec.fields[3]);
        }
        groups.push_back(std::move(g));
    }
    return groups;
}

std::vector<std::string> split_multi(const std::string& s) {
    if (s.empty()) return {};
    return text::split(s, ';');
}

template <class F>
auto with_location(const std::string& origin, std::size_t line, F&& f) {
    try {
        return f();
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}:{}: {}", origin, line, e.what()));
    }
}

std::string read_or_empty(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return {};
    return read_file(path);
}

const json& require(const json& j, const char* key) {
    if (!j.contains(key)) throw ValidationError(fmt::format("missing field '{}'", key));
    return j.at(key);
}

std::string require_string(const json& j, const char* key) {
    const auto& v = require(j, key);
    if (!v.is_string()) throw ValidationError(fmt::format("field '{}' must be a string", key));
    return v.get<std::string>();
}

std::vector<std::string> require_strings(const json& j, const char* key) {
    const auto& v = require(j, key);
    if (!v.is_array()) throw ValidationError(fmt::format("field '{}' must be a list", key));
    std::vector<std::string> out;
    for (const auto& item : v) {
        if (!item.is_string()) throw ValidationError(fmt::format("field '{}' must hold strings", key));
        out.push_back(item.get<std::string>());
    }
    return out;
}

void require_exact_keys(const json& j, std::initializer_list<const char*> keys, const char* what) {
    if (!j.is_object()) throw ValidationError(fmt::format("{} must be an object", what));
    for (const auto& [k, _] : j.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* key) { return k == key; })) {
            throw ValidationError(fmt::format("unexpected field '{}' in {}", k, what));
        }
    }
}

std::pair<std::string, Timestamp> require_header(const json& j) {
    require_exact_keys(j, {"user_id", "ts", "answers"}, "response");
    const auto user = require_string(j, "user_id");
    const auto& ts = require(j, "ts");
    if (!ts.is_number_integer()) throw ValidationError("field 'ts' must be an integer");
    return {user, Timestamp{ts.get<std::int64_t>()}};
}

}  // namespace

bool Question::allows(std::string_view option) const {
    return std::find(options.begin(), options.end(), option) != options.end();
}

const Question& Questionnaire::state_question(std::string_view id) const { return find_question(state, id); }

const Question& Questionnaire::evaluation_question(std::string_view id) const {
    return find_question(evaluation, id);
}

Questionnaire parse_questionnaire(std::string_view json_text, const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin, 0, e.what());
    }
    if (!j.is_object()) throw ParseError(origin, 0, "top level must be an object");
    Questionnaire q;
    q.state = parse_section(j, "state", kStateQuestions, origin);
    q.evaluation = parse_section(j, "evaluation", kEvalQuestions, origin);

    auto expect_kind = [&](const Question& question, QuestionKind kind, const char* section) {
        if (question.kind != kind) {
            throw ParseError(origin, 0, fmt::format("{}: {} must be of kind {}", section, question.id, to_string(kind)));
        }
    };
    for (std::size_t i = 0; i < kStateQuestions; ++i) {
        const bool multi = i >= 3 && i <= 5;
        expect_kind(q.state[i], multi ? QuestionKind::Multi : QuestionKind::Choice, "state");
    }
    std::vector<std::string> labels;
    for (auto e : kAllEmotions) labels.emplace_back(to_string(e));
    if (q.state[5].options != labels) throw ParseError(origin, 0, "state: Q6 options must be the emotion labels");

    std::vector<std::string> scale;
    for (auto e : kAllEffectiveness) scale.emplace_back(to_string(e));
    for (std::size_t i = 0; i < kEvalQuestions; ++i) {
        expect_kind(q.evaluation[i], i >= 2 ? QuestionKind::Scale : QuestionKind::Choice, "evaluation");
        if (i >= 2 && q.evaluation[i].options != scale) {
            throw ParseError(origin, 0, fmt::format("evaluation: {} must use the effectiveness scale",
                                                    q.evaluation[i].id));
        }
    }
    return q;
}

Questionnaire load_questionnaire(const std::filesystem::path& path) {
    return parse_questionnaire(read_file(path), path.string());
}

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("AFFECT_DATA_DIR"); env && *env) return env;
    return AFFECT_DATA_DIR;
}

const Questionnaire& default_questionnaire() {
    static const Questionnaire q = load_questionnaire(default_data_dir() / "questionnaire.json");
    return q;
}

ordered_json to_json(const Questionnaire& q) {
    auto section = [](const std::vector<Question>& list) {
        ordered_json arr = ordered_json::array();
        for (const auto& question : list) {
            arr.push_back({{"id", question.id},
                           {"kind", to_string(question.kind)},
                           {"text", question.text},
                           {"options", question.options}});
        }
        return arr;
    };
    return {{"state", section(q.state)}, {"evaluation", section(q.evaluation)}};
}

std::string_view to_string(Effectiveness e) {
    switch (e) {
        case Effectiveness::NotEffective: return "NotEffective";
        case Effectiveness::SomewhatEffective: return "SomewhatEffective";
        case Effectiveness::VeryEffective: return "VeryEffective";
    }
    return "NotEffective";
}

std::optional<Effectiveness> parse_effectiveness(std::string_view text) {
    for (auto e : kAllEffectiveness) {
        if (to_string(e) == text) return e;
    }
    return std::nullopt;
}

void validate(const StateResponse& r, const Questionnaire& q) {
    check_common(r.user_id, r.ts);
    check_choice(q.state[0], r.age_group);
    check_choice(q.state[1], r.years_at_job);
    check_choice(q.state[2], r.mental_health_rating);
    check_multi(q.state[3], r.unhappiness_reasons);
    check_multi(q.state[4], r.satisfaction_reasons);
    if (r.emotions_experienced.empty()) throw ValidationError("Q6: no option selected");
    check_choice(q.state[6], r.physical_feeling);
}

void validate(const EvalResponse& r, const Questionnaire& q) {
    check_common(r.user_id, r.ts);
    check_choice(q.evaluation[0], r.age_group);
    check_choice(q.evaluation[1], r.years_at_job);
    for (auto e : r.ratings) {
        if (!parse_effectiveness(to_string(e))) throw ValidationError("rating outside the effectiveness scale");
    }
}

std::string format_rows(const StateResponse& r) { return format_group(r.user_id, r.ts, state_answers(r)); }

std::string format_rows(const EvalResponse& r) { return format_group(r.user_id, r.ts, eval_answers(r)); }

std::vector<StateResponse> parse_state_responses(std::string_view content, const std::string& origin,
                                                 const Questionnaire& q) {
    std::vector<StateResponse> out;
    for (auto& g : parse_groups(content, origin, kStateQuestions)) {
        out.push_back(with_location(origin, g.line, [&] {
            StateResponse r;
            r.user_id = g.user_id;
            r.ts = g.ts;
            r.age_group = g.answers[0];
            r.years_at_job = g.answers[1];
            r.mental_health_rating = g.answers[2];
            r.unhappiness_reasons = split_multi(g.answers[3]);
            r.satisfaction_reasons = split_multi(g.answers[4]);
            r.emotions_experienced = parse_emotions(split_multi(g.answers[5]));
            r.physical_feeling = g.answers[6];
            validate(r, q);
            return r;
        }));
    }
    return out;
}

std::vector<EvalResponse> parse_eval_responses(std::string_view content, const std::string& origin,
                                               const Questionnaire& q) {
    std::vector<EvalResponse> out;
    for (auto& g : parse_groups(content, origin, kEvalQuestions)) {
        out.push_back(with_location(origin, g.line, [&] {
            EvalResponse r;
            r.user_id = g.user_id;
            r.ts = g.ts;
            r.age_group = g.answers[0];
            r.years_at_job = g.answers[1];
            for (std::size_t i = 0; i < 3; ++i) {
                const auto e = parse_effectiveness(g.answers[2 + i]);
                if (!e) {
                    throw ValidationError(fmt::format("{}: '{}' is not on the effectiveness scale", question_id(2 + i),
                                                      g.answers[2 + i]));
                }
                r.ratings[i] = *e;
            }
            validate(r, q);
            return r;
        }));
    }
    return out;
}

ordered_json to_json(const StateResponse& r) {
    ordered_json emotions = ordered_json::array();
    for (auto e : r.emotions_experienced) emotions.push_back(to_string(e));
    return {{"user_id", r.user_id},
            {"ts", r.ts.ms},
            {"answers",
             {{"Q1", r.age_group},
              {"Q2", r.years_at_job},
              {"Q3", r.mental_health_rating},
              {"Q4", r.unhappiness_reasons},
              {"Q5", r.satisfaction_reasons},
              {"Q6", emotions},
              {"Q7", r.physical_feeling}}}};
}

ordered_json to_json(const EvalResponse& r) {
    return {{"user_id", r.user_id},
            {"ts", r.ts.ms},
            {"answers",
             {{"Q1", r.age_group},
              {"Q2", r.years_at_job},
              {"Q3", to_string(r.ratings[0])},
              {"Q4", to_string(r.ratings[1])},
              {"Q5", to_string(r.ratings[2])}}}};
}

StateResponse state_response_from_json(const json& j, const Questionnaire& q) {
    auto [user, ts] = require_header(j);
    const auto& a = j.at("answers");
    require_exact_keys(a, {"Q1", "Q2", "Q3", "Q4", "Q5", "Q6", "Q7"}, "answers");
    StateResponse r;
    r.user_id = user;
    r.ts = ts;
    r.age_group = require_string(a, "Q1");
    r.years_at_job = require_string(a, "Q2");
    r.mental_health_rating = require_string(a, "Q3");
    r.unhappiness_reasons = require_strings(a, "Q4");
    r.satisfaction_reasons = require_strings(a, "Q5");
    r.emotions_experienced = parse_emotions(require_strings(a, "Q6"));
    r.physical_feeling = require_string(a, "Q7");
    validate(r, q);
    return r;
}

EvalResponse eval_response_from_json(const json& j, const Questionnaire& q) {
    auto [user, ts] = require_header(j);
    const auto& a = j.at("answers");
    require_exact_keys(a, {"Q1", "Q2", "Q3", "Q4", "Q5"}, "answers");
    EvalResponse r;
    r.user_id = user;
    r.ts = ts;
    r.age_group = require_string(a, "Q1");
    r.years_at_job = require_string(a, "Q2");
    for (std::size_t i = 0; i < 3; ++i) {
        const auto id = question_id(2 + i);
        const auto value = require_string(a, id.c_str());
        const auto e = parse_effectiveness(value);
        if (!e) throw ValidationError(fmt::format("{}: '{}' is not on the effectiveness scale", id, value));
        r.ratings[i] = *e;
    }
    validate(r, q);
    return r;
}

std::size_t repair_response_file(const std::filesystem::path& path, std::size_t questions_per_response) {
    std::size_t removed = truncate_torn_tail(path);
    if (!std::filesystem::exists(path)) return removed;
    const auto content = read_file(path);
    // Answers never contain line breaks, so every line is one row.
    std::vector<std::size_t> line_ends;
    for (std::size_t i = 0; i < content.size(); ++i) {
        if (content[i] == '\n') line_ends.push_back(i + 1);
    }
    const bool has_header = content.rfind(kResponsesHeader.substr(0, kResponsesHeader.size() - 1), 0) == 0;
    const std::size_t header_lines = has_header ? 1 : 0;
    if (line_ends.size() <= header_lines) return removed;
    const std::size_t rows = line_ends.size() - header_lines;
    const std::size_t keep_rows = rows - rows % questions_per_response;
    if (keep_rows == rows) return removed;
    const std::size_t keep_lines = header_lines + keep_rows;
    const std::size_t keep_bytes = keep_lines == 0 ? 0 : line_ends[keep_lines - 1];
    std::filesystem::resize_file(path, keep_bytes);
    return removed + (content.size() - keep_bytes);
}

ResponseStore::ResponseStore(std::filesystem::path root, const Questionnaire& q)
    : root_(std::move(root)), questionnaire_(&q) {}

std::filesystem::path ResponseStore::responses_path(const std::string& user_id, const std::string& date) const {
    return root_ / user_id / date / "responses.csv";
}

std::filesystem::path ResponseStore::eval_path() const { return root_ / "eval.csv"; }

std::mutex& ResponseStore::user_mutex(const std::string& user_id) const {
    std::lock_guard lock(table_mutex_);
    auto& slot = user_mutexes_[user_id];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
}

void ResponseStore::record_state(const std::string& date, const StateResponse& r) {
    validate(r, *questionnaire_);
    if (!text::is_iso_date(date)) throw ValidationError(fmt::format("invalid date '{}'", date));
    std::lock_guard lock(user_mutex(r.user_id));
    const auto path = responses_path(r.user_id, date);
    const auto existing = parse_state_responses(read_or_empty(path), path.string(), *questionnaire_);
    for (const auto& prior : existing) {
        if (prior.ts == r.ts && prior.user_id == r.user_id) {
            throw DuplicateResponse(fmt::format("response at ts {} already recorded for {}", r.ts.ms, r.user_id));
        }
    }
    if (existing.size() >= kDailyStateResponseCap) {
        throw CapExceeded(fmt::format("{} already answered {} times on {}", r.user_id, existing.size(), date));
    }
    append_durable(path, format_rows(r), kResponsesHeader);
}

void ResponseStore::record_eval(const EvalResponse& r) {
    validate(r, *questionnaire_);
    std::lock_guard lock(eval_mutex_);
    const auto path = eval_path();
    for (const auto& prior : parse_eval_responses(read_or_empty(path), path.string(), *questionnaire_)) {
        if (prior.ts == r.ts && prior.user_id == r.user_id) {
            throw DuplicateResponse(fmt::format("evaluation at ts {} already recorded for {}", r.ts.ms, r.user_id));
        }
    }
    append_durable(path, format_rows(r), kResponsesHeader);
}

std::vector<StateResponse> ResponseStore::state_responses(const std::string& user_id, const std::string& date) const {
    if (!text::is_safe_id(user_id) || !text::is_iso_date(date)) return {};
    std::lock_guard lock(user_mutex(user_id));
    const auto path = responses_path(user_id, date);
    return parse_state_responses(read_or_empty(path), path.string(), *questionnaire_);
}

std::vector<EvalResponse> ResponseStore::eval_responses() const {
    std::lock_guard lock(eval_mutex_);
    const auto path = eval_path();
    return parse_eval_responses(read_or_empty(path), path.string(), *questionnaire_);
}

bool validate_rap(const SessionSummary& summary, const StateResponse& response) {
    if (summary.window_count == 0) throw EmptySession("session has no fused windows");
    const auto top = summary.argmax();
    return std::any_of(top.begin(), top.end(),
                       [&](Emotion e) { return response.emotions_experienced.count(e) > 0; });
}

void RapFapAgreement::add(bool agreement) {
    ++sessions_compared;
    if (agreement) ++agreed;
}

std::optional<Fraction> RapFapAgreement::rate() const {
    if (sessions_compared == 0) return std::nullopt;
    return Fraction(static_cast<std::int64_t>(agreed), static_cast<std::int64_t>(sessions_compared));
}

RapFapAgreement compute_agreement(std::span<const SessionSummary> sessions,
                                  std::span<const StateResponse> responses) {
    RapFapAgreement out;
    if (responses.empty()) return out;
    for (const auto& s : sessions) {
        if (s.window_count == 0) continue;
        const std::int64_t mid = s.start.ms + (s.end.ms - s.start.ms) / 2;
        const StateResponse* best = nullptr;
        std::int64_t best_distance = 0;
        for (const auto& r : responses) {
            const std::int64_t d = r.ts.ms > mid ? r.ts.ms - mid : mid - r.ts.ms;
            if (!best || d < best_distance || (d == best_distance && r.ts < best->ts)) {
                best = &r;
                best_distance = d;
            }
        }
        out.add(validate_rap(s, *best));
    }
    return out;
}

EvalSummary summarize_eval(std::span<const EvalResponse> responses) {
    EvalSummary s;
    for (const auto& r : responses) {
        ++s.responses;
        for (std::size_t q = 0; q < 3; ++q) {
            ++s.counts[q][static_cast<std::size_t>(r.ratings[q])];
            if (r.ratings[q] == Effectiveness::NotEffective) s.none_not_effective = false;
        }
    }
    return s;
}

ordered_json to_json(const EvalSummary& s) {
    ordered_json questions = ordered_json::object();
    for (std::size_t q = 0; q < 3; ++q) {
        ordered_json counts = ordered_json::object();
        for (auto e : kAllEffectiveness) counts[std::string(to_string(e))] = s.counts[q][static_cast<std::size_t>(e)];
        questions[question_id(2 + q)] = counts;
    }
    return {{"responses", s.responses}, {"questions", questions}, {"none_not_effective", s.none_not_effective}};
}

}  // namespace affect
