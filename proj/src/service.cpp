#include "affect/service.hpp"

#include "affect/fileio.hpp"
#include "affect/text.hpp"

#include <fmt/core.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <limits>

namespace affect {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::int64_t kDayMs = 86'400'000;
constexpr std::int64_t kMaxTicksPerRequest = 3'000;

struct ParsedBatch {
    std::vector<std::int64_t> timestamps;
    std::string formatted;
};

template <class T>
ParsedBatch to_batch(const std::vector<T>& records) {
    ParsedBatch b;
    for (const auto& r : records) {
        b.timestamps.push_back(r.ts.ms);
        b.formatted += format_record(r);
    }
    return b;
}

ParsedBatch parse_batch(StreamKind kind, std::string_view body, const std::string& origin,
                        std::vector<std::string>* warnings) {
    const std::string content(body);
    if (text::trim(content).empty()) return {};
    switch (kind) {
        case StreamKind::Keystroke: return to_batch(parse_keystrokes(content, origin));
        case StreamKind::Session: return to_batch(parse_sessions(content, origin, warnings));
        case StreamKind::Speech: return to_batch(parse_speech(content, origin));
        case StreamKind::Gaze: return to_batch(parse_gaze(content, origin));
        case StreamKind::Skeleton: return to_batch(parse_skeleton(content, origin));
        case StreamKind::Face: return to_batch(parse_face(content, origin));
    }
    return {};
}

void check_user_date(const std::string& user_id, const std::string& date) {
    if (!text::is_safe_id(user_id)) throw ValidationError(fmt::format("invalid user id '{}'", user_id));
    if (!text::is_iso_date(date)) throw ValidationError(fmt::format("invalid date '{}'", date));
}

void write_atomic(const std::filesystem::path& path, const std::string& data) {
    std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << data;
        if (!out) throw IoError("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

HttpResponse json_response(int status, const ordered_json& body) { return {status, "application/json", body.dump()}; }

HttpResponse error_response(int status, std::string_view kind, const std::string& message) {
    return json_response(status, {{"error", kind}, {"message", message}});
}

json parse_body(const std::string& body) {
    try {
        return json::parse(body.empty() ? std::string("{}") : body);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON body: ") + e.what());
    }
}

std::optional<std::int64_t> query_int(const HttpRequest& r, const std::string& key) {
    const auto it = r.query.find(key);
    if (it == r.query.end()) return std::nullopt;
    const auto v = text::parse_int(it->second);
    if (!v) throw ValidationError(fmt::format("query parameter '{}' must be an integer", key));
    return v;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> out;
    for (auto& part : text::split(path, '/')) {
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

std::int64_t system_clock_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace

// ---------------------------------------------------------------------------
// UserDayStore
// ---------------------------------------------------------------------------

UserDayStore::UserDayStore(std::filesystem::path root, const Questionnaire& questionnaire)
    : root_(std::move(root)), responses_(root_, questionnaire) {
    dictionary_ = load_dictionary(default_data_dir() / "dictionary.xml");
}

std::filesystem::path UserDayStore::day_dir(const std::string& user_id, const std::string& date) const {
    return root_ / user_id / date;
}

std::filesystem::path UserDayStore::cache_dir(const std::string& user_id, const std::string& date) const {
    return day_dir(user_id, date) / "cache";
}

UserDayStore::Day& UserDayStore::day(const std::string& user_id, const std::string& date) {
    std::lock_guard lock(days_mutex_);
    auto& slot = days_[{user_id, date}];
    if (!slot) {
        slot = std::make_unique<Day>();
        for (auto kind : kAllStreams) {
            slot->stream_mutexes[kind];
            slot->last_ts[kind];
        }
    }
    return *slot;
}

std::size_t UserDayStore::recover() {
    std::size_t removed = 0;
    if (!std::filesystem::exists(root_)) return 0;
    for (const auto& user : std::filesystem::directory_iterator(root_)) {
        if (!user.is_directory()) continue;
        for (const auto& date : std::filesystem::directory_iterator(user.path())) {
            if (!date.is_directory()) continue;
            for (auto kind : kAllStreams) removed += truncate_torn_tail(date.path() / file_name(kind));
            removed += repair_response_file(date.path() / "responses.csv", 7);
            std::error_code ec;
            std::filesystem::remove_all(date.path() / "cache", ec);
        }
    }
    removed += repair_response_file(root_ / "eval.csv", 5);
    return removed;
}

IngestResult UserDayStore::ingest(StreamKind kind, const std::string& user_id, const std::string& date,
                                  std::string_view body) {
    check_user_date(user_id, date);
    IngestResult result;
    const auto batch = parse_batch(kind, body, fmt::format("{} batch", to_string(kind)), &result.warnings);

    auto& d = day(user_id, date);
    std::shared_lock day_lock(d.rw);
    std::lock_guard stream_lock(d.stream_mutexes.at(kind));
    const auto path = day_dir(user_id, date) / file_name(kind);

    auto& last = d.last_ts.at(kind);
    if (!last) {
        last = std::numeric_limits<std::int64_t>::min();
        if (std::filesystem::exists(path)) {
            const auto persisted = parse_batch(kind, read_file(path), path.string(), nullptr);
            if (!persisted.timestamps.empty()) last = persisted.timestamps.back();
        }
    }
    if (batch.timestamps.empty()) return result;
    if (batch.timestamps.front() < *last) {
        throw OrderError(path.string(), 0,
                         fmt::format("timestamp {} precedes last persisted {}", batch.timestamps.front(), *last));
    }
    append_durable(path, batch.formatted, file_header(kind));
    last = batch.timestamps.back();
    result.accepted = batch.timestamps.size();
    invalidate(user_id, date);
    return result;
}

void UserDayStore::invalidate(const std::string& user_id, const std::string& date) {
    std::error_code ec;
    std::filesystem::remove_all(cache_dir(user_id, date), ec);
}

UserDayStore::Derived UserDayStore::derive(const std::string& user_id, const std::string& date) {
    Derived out;
    const auto dir = day_dir(user_id, date);
    if (std::filesystem::exists(dir)) out.trace = load_trace(dir);
    out.trace.user_id = user_id;
    out.trace.date = date;
    out.predictions = predict_day(out.trace, dictionary_, rules_);
    const auto responses = responses_.state_responses(user_id, date);
    out.report = build_daily_report(out.trace, out.predictions, responses, rules_);
    return out;
}

std::string UserDayStore::cached(const std::string& user_id, const std::string& date, const char* name,
                                 const std::function<std::string()>& compute) {
    check_user_date(user_id, date);
    auto& d = day(user_id, date);
    std::unique_lock lock(d.rw);
    const auto path = cache_dir(user_id, date) / name;
    if (std::filesystem::exists(path)) return read_file(path);
    auto data = compute();
    if (std::filesystem::exists(day_dir(user_id, date))) write_atomic(path, data);
    return data;
}

std::string UserDayStore::report_machine(const std::string& user_id, const std::string& date) {
    return cached(user_id, date, "report.json",
                  [&] { return format_report_machine(derive(user_id, date).report); });
}

std::string UserDayStore::report_text(const std::string& user_id, const std::string& date) {
    return cached(user_id, date, "report.txt", [&] { return format_report_text(derive(user_id, date).report); });
}

std::string UserDayStore::predictions(const std::string& user_id, const std::string& date) {
    return cached(user_id, date, "predictions.json", [&] {
        return predictions_to_json(user_id, date, derive(user_id, date).predictions).dump(2) + "\n";
    });
}

void UserDayStore::record_state(const std::string& date, const StateResponse& r) {
    check_user_date(r.user_id, date);
    auto& d = day(r.user_id, date);
    std::unique_lock lock(d.rw);
    responses_.record_state(date, r);
    invalidate(r.user_id, date);
}

std::vector<StateResponse> UserDayStore::state_responses(const std::string& user_id, const std::string& date) {
    return responses_.state_responses(user_id, date);
}

// ---------------------------------------------------------------------------
// Prompts
// ---------------------------------------------------------------------------

std::array<std::int64_t, kDailyStateResponseCap> PromptSchedule::times_ms(const RuleConfig& cfg) const {
    std::array<std::int64_t, kDailyStateResponseCap> out{};
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::int64_t>(fractions[i] * static_cast<double>(cfg.workday_ms()));
    }
    return out;
}

std::optional<std::size_t> PromptSchedule::pending(std::int64_t now_ms, std::size_t recorded,
                                                   const RuleConfig& cfg) const {
    if (recorded >= kDailyStateResponseCap) return std::nullopt;
    if (now_ms < times_ms(cfg)[recorded]) return std::nullopt;
    return recorded;
}

std::string prompt_token(const std::string& user_id, const std::string& date, std::size_t prompt_index) {
    return fmt::format("{}/{}/{}", user_id, date, prompt_index + 1);
}

// ---------------------------------------------------------------------------
// Service
// ---------------------------------------------------------------------------

namespace {

Questionnaire questionnaire_for(const ServiceConfig& cfg) {
    const auto dir = cfg.assets_dir.empty() ? default_data_dir() : cfg.assets_dir;
    return load_questionnaire(dir / "questionnaire.json");
}

}  // namespace

Service::Service(ServiceConfig cfg)
    : cfg_(std::move(cfg)), questionnaire_(questionnaire_for(cfg_)), store_(cfg_.data_dir, questionnaire_) {
    cfg_.rules.validate();
    cfg_.game.validate();
    if (!cfg_.clock) cfg_.clock = system_clock_ms;
    if (cfg_.assets_dir.empty()) cfg_.assets_dir = default_data_dir();
    store_.set_rules(cfg_.rules);
    store_.set_dictionary(load_dictionary(cfg_.assets_dir / "dictionary.xml"));
    for (auto kind : {QuoteKind::Inspirational, QuoteKind::Funny}) {
        quote_sets_.emplace(kind, load_quotes(default_quotes_path(cfg_.assets_dir, kind), kind));
    }
    store_.recover();
}

std::string Service::today() const {
    const auto start = static_cast<std::int64_t>(cfg_.workday_start_hour * 3'600'000.0);
    const std::int64_t shifted = cfg_.clock() - start;
    const std::time_t day_start = static_cast<std::time_t>((shifted >= 0 ? shifted / kDayMs : (shifted - kDayMs + 1) / kDayMs) * 86'400);
    std::tm tm{};
    gmtime_r(&day_start, &tm);
    return fmt::format("{:04d}-{:02d}-{:02d}", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday);
}

std::int64_t Service::workday_now_ms() const {
    const auto start = static_cast<std::int64_t>(cfg_.workday_start_hour * 3'600'000.0);
    const std::int64_t shifted = cfg_.clock() - start;
    return ((shifted % kDayMs) + kDayMs) % kDayMs;
}

HttpResponse Service::handle(const HttpRequest& request) {
    try {
        return route(request);
    } catch (const NotFound& e) {
        return error_response(404, "NotFound", e.what());
    } catch (const OrderError& e) {
        return error_response(409, "OrderError", e.what());
    } catch (const CapExceeded& e) {
        return error_response(409, "CapExceeded", e.what());
    } catch (const DuplicateResponse& e) {
        return error_response(409, "DuplicateResponse", e.what());
    } catch (const GameOver& e) {
        return error_response(409, "GameOver", e.what());
    } catch (const ParseError& e) {
        return error_response(400, "ParseError", e.what());
    } catch (const ValidationError& e) {
        return error_response(400, "ValidationError", e.what());
    } catch (const std::exception& e) {
        return error_response(500, "InternalError", e.what());
    }
}

HttpResponse Service::route(const HttpRequest& request) {
    const auto parts = split_path(request.path);
    const bool get = request.method == "GET";
    const bool post = request.method == "POST";
    if (parts.empty() || parts[0] != "v1") throw NotFound("no route for " + request.path);
    const std::size_t n = parts.size();

    if (n == 2 && parts[1] == "healthz" && get) return json_response(200, {{"status", "ok"}});
    if (n == 3 && parts[1] == "events" && post) return post_events(parts[2], request);
    if (n == 2 && parts[1] == "report" && get) return get_report(request);
    if (n == 2 && parts[1] == "predictions" && get) return get_predictions(request);
    if (n == 2 && parts[1] == "prompt" && get) return get_prompt(request);
    if (n == 2 && parts[1] == "questionnaire" && get) return json_response(200, to_json(questionnaire_));
    if (n == 3 && parts[1] == "questionnaire" && parts[2] == "state" && post) return post_state(request);
    if (n == 3 && parts[1] == "questionnaire" && parts[2] == "evaluation" && post) return post_evaluation(request);
    if (n == 3 && parts[1] == "evaluation" && parts[2] == "summary" && get) return get_evaluation_summary();
    if (n == 3 && parts[1] == "quotes" && parts[2] == "next" && get) return get_quote(request);
    if (n == 2 && parts[1] == "game" && post) return post_game(request);
    if (n == 4 && parts[1] == "game" && parts[3] == "input" && post) return post_game_input(parts[2], request);
    if (n == 4 && parts[1] == "game" && parts[3] == "state" && get) return get_game_state(parts[2]);
    throw NotFound(fmt::format("no route for {} {}", request.method, request.path));
}

std::pair<std::string, std::string> Service::user_and_date(const HttpRequest& request) const {
    const auto user = request.query.find("user");
    if (user == request.query.end()) throw ValidationError("missing query parameter 'user'");
    const auto date = request.query.find("date");
    std::pair<std::string, std::string> out{user->second, date == request.query.end() ? today() : date->second};
    check_user_date(out.first, out.second);
    return out;
}

HttpResponse Service::post_events(const std::string& kind_name, const HttpRequest& request) {
    const auto kind = parse_stream_kind(kind_name);
    if (!kind) throw ValidationError(fmt::format("unknown modality '{}'", kind_name));
    const auto [user, date] = user_and_date(request);
    const auto result = store_.ingest(*kind, user, date, request.body);
    return json_response(200, {{"accepted", result.accepted}, {"warnings", result.warnings}});
}

HttpResponse Service::get_report(const HttpRequest& request) {
    const auto [user, date] = user_and_date(request);
    const auto fmt_it = request.query.find("format");
    const std::string format = fmt_it == request.query.end() ? "machine" : fmt_it->second;
    if (format == "machine") return {200, "application/json", store_.report_machine(user, date)};
    if (format == "text") return {200, "text/plain; charset=utf-8", store_.report_text(user, date)};
    throw ValidationError(fmt::format("unknown report format '{}'", format));
}

HttpResponse Service::get_predictions(const HttpRequest& request) {
    const auto [user, date] = user_and_date(request);
    return {200, "application/json", store_.predictions(user, date)};
}

HttpResponse Service::get_prompt(const HttpRequest& request) {
    const auto [user, date] = user_and_date(request);
    const auto now = query_int(request, "now").value_or(workday_now_ms());
    const auto recorded = store_.state_responses(user, date).size();
    const auto due = schedule_.pending(now, recorded, cfg_.rules);
    ordered_json times = ordered_json::array();
    for (auto t : schedule_.times_ms(cfg_.rules)) times.push_back(t);
    ordered_json body = {{"user_id", user}, {"date", date}, {"now_ms", now}, {"prompt_times_ms", times},
                         {"responses_recorded", recorded}};
    body["token"] = due ? ordered_json(prompt_token(user, date, *due)) : ordered_json(nullptr);
    return json_response(200, body);
}

HttpResponse Service::post_state(const HttpRequest& request) {
    auto body = parse_body(request.body);
    if (!body.is_object()) throw ValidationError("body must be an object");
    std::string date = today();
    if (body.contains("date")) {
        if (!body["date"].is_string()) throw ValidationError("field 'date' must be a string");
        date = body["date"].get<std::string>();
        body.erase("date");
    }
    std::optional<std::string> token;
    if (body.contains("token")) {
        if (!body["token"].is_string()) throw ValidationError("field 'token' must be a string");
        token = body["token"].get<std::string>();
        body.erase("token");
    }
    const auto response = state_response_from_json(body, questionnaire_);
    check_user_date(response.user_id, date);
    if (token) {
        const auto recorded = store_.state_responses(response.user_id, date).size();
        if (recorded >= kDailyStateResponseCap) {
            throw CapExceeded(fmt::format("{} already answered {} times on {}", response.user_id, recorded, date));
        }
        if (*token != prompt_token(response.user_id, date, recorded)) {
            throw ValidationError(fmt::format("prompt token '{}' is not the pending prompt", *token));
        }
    }
    store_.record_state(date, response);
    return json_response(201, {{"recorded", true}, {"date", date}, {"response", to_json(response)}});
}

HttpResponse Service::post_evaluation(const HttpRequest& request) {
    const auto response = eval_response_from_json(parse_body(request.body), questionnaire_);
    store_.responses().record_eval(response);
    return json_response(201, {{"recorded", true}, {"response", to_json(response)}});
}

HttpResponse Service::get_evaluation_summary() {
    const auto responses = store_.responses().eval_responses();
    return json_response(200, to_json(summarize_eval(responses)));
}

HttpResponse Service::get_quote(const HttpRequest& request) {
    const auto kind_it = request.query.find("kind");
    if (kind_it == request.query.end()) throw ValidationError("missing query parameter 'kind'");
    const auto kind = parse_quote_kind(kind_it->second);
    if (!kind) throw ValidationError(fmt::format("unknown quote kind '{}'", kind_it->second));
    const auto widget_it = request.query.find("widget");
    const std::string widget = widget_it == request.query.end() ? "default" : widget_it->second;
    const Timestamp now{query_int(request, "now").value_or(cfg_.clock())};

    std::lock_guard lock(quotes_mutex_);
    auto& rot = rotators_[{*kind, widget}];
    if (!rot) {
        const auto seed = cfg_.seed ^ fnv1a(fmt::format("{}/{}", to_string(*kind), widget));
        rot = std::make_unique<QuoteRotator>(quote_sets_.at(*kind), seed);
    }
    const auto& quote = rot->next_quote(now);
    return json_response(200, {{"kind", to_string(*kind)},
                               {"widget", widget},
                               {"index", rot->current_index()},
                               {"text", quote.text},
                               {"author", quote.author},
                               {"next_change_ms", rot->next_change()->ms}});
}

Service::GameSession& Service::game(const std::string& id) {
    std::lock_guard lock(games_mutex_);
    const auto it = games_.find(id);
    if (it == games_.end()) throw NotFound(fmt::format("no game session '{}'", id));
    return *it->second;
}

HttpResponse Service::post_game(const HttpRequest& request) {
    const auto body = parse_body(request.body);
    if (!body.is_object()) throw ValidationError("body must be an object");
    std::lock_guard lock(games_mutex_);
    const auto number = next_game_++;
    std::uint64_t seed = cfg_.seed + number;
    if (body.contains("seed")) {
        if (!body["seed"].is_number_unsigned()) throw ValidationError("field 'seed' must be a non-negative integer");
        seed = body["seed"].get<std::uint64_t>();
    }
    const auto id = fmt::format("g{}", number);
    auto session = std::make_unique<GameSession>();
    session->state = new_game(cfg_.game, seed);
    auto snapshot = to_json(session->state, cfg_.game);
    games_.emplace(id, std::move(session));
    return json_response(201, {{"id", id}, {"config", to_json(cfg_.game)}, {"state", snapshot}});
}

HttpResponse Service::post_game_input(const std::string& id, const HttpRequest& request) {
    const auto body = parse_body(request.body);
    if (!body.is_object() || !body.contains("input") || !body["input"].is_string()) {
        throw ValidationError("body must carry a string field 'input'");
    }
    const auto input = parse_game_input(body["input"].get<std::string>());
    if (!input) throw ValidationError("input must be MoveLeft, MoveRight, or Stay");
    std::int64_t ticks = 1;
    if (body.contains("ticks")) {
        if (!body["ticks"].is_number_integer()) throw ValidationError("field 'ticks' must be an integer");
        ticks = body["ticks"].get<std::int64_t>();
        if (ticks < 1 || ticks > kMaxTicksPerRequest) {
            throw ValidationError(fmt::format("ticks must be in [1, {}]", kMaxTicksPerRequest));
        }
    }
    auto& session = game(id);
    std::lock_guard lock(session.mutex);
    for (std::int64_t i = 0; i < ticks && !(i > 0 && session.state.over); ++i) {
        session.state = game_step(session.state, *input, cfg_.game);
    }
    return json_response(200, {{"id", id}, {"state", to_json(session.state, cfg_.game)}});
}

HttpResponse Service::get_game_state(const std::string& id) {
    auto& session = game(id);
    std::lock_guard lock(session.mutex);
    return json_response(200, {{"id", id}, {"state", to_json(session.state, cfg_.game)}});
}

}  // namespace affect
