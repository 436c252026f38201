/**
 * service.hpp: file-backed store and the /v1 HTTP API.
 *
 * Layout under the data directory:
 *
 *   <user>/<date>/keystrokes.csv ... face.jsonl   raw events, append-only
 *   <user>/<date>/responses.csv                   state questionnaire
 *   <user>/<date>/cache/report.{json,txt}         derived, safe to delete
 *   <user>/<date>/cache/predictions.json          derived, safe to delete
 *   eval.csv                                      evaluation questionnaire
 *
 * Handlers are plain functions over HttpRequest/HttpResponse; run_server
 * only adapts them to a socket.
 */

#pragma once

#include "affect/booster.hpp"
#include "affect/config.hpp"
#include "affect/fap.hpp"
#include "affect/rap.hpp"
#include "affect/report.hpp"
#include "affect/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace affect {

class NotFound : public Error {
public:
    using Error::Error;
};

struct IngestResult {
    std::size_t accepted = 0;
    std::vector<std::string> warnings;
};

/// Raw event files, derived caches, and questionnaire responses for every
/// (user, date). Appends for one (user, date, stream) are serialized; reads
/// of a day exclude writers of that day, so every read is a consistent
/// snapshot.
class UserDayStore {
public:
    UserDayStore(std::filesystem::path root, const Questionnaire& questionnaire);

    /// Cuts torn tails left by an interrupted append in every stream and
    /// response file. Returns the number of bytes removed.
    std::size_t recover();

    /// Parses `body` in the stream's file format (header optional). Throws
    /// ValidationError/ParseError for bad input and OrderError when the batch
    /// starts before the last persisted timestamp of that stream. The batch
    /// is durable before this returns.
    IngestResult ingest(StreamKind kind, const std::string& user_id, const std::string& date,
                        std::string_view body);

    /// Report in machine form; an unknown user/date yields an empty report.
    std::string report_machine(const std::string& user_id, const std::string& date);
    std::string report_text(const std::string& user_id, const std::string& date);
    std::string predictions(const std::string& user_id, const std::string& date);

    void record_state(const std::string& date, const StateResponse& r);
    std::vector<StateResponse> state_responses(const std::string& user_id, const std::string& date);
    ResponseStore& responses() { return responses_; }

    void set_rules(const RuleConfig& cfg) { rules_ = cfg; }
    void set_dictionary(EmotionDictionary dict) { dictionary_ = std::move(dict); }
    const RuleConfig& rules() const { return rules_; }

    std::filesystem::path day_dir(const std::string& user_id, const std::string& date) const;
    std::filesystem::path cache_dir(const std::string& user_id, const std::string& date) const;

private:
    struct Day {
        std::shared_mutex rw;
        std::map<StreamKind, std::mutex> stream_mutexes;
        std::map<StreamKind, std::optional<std::int64_t>> last_ts;  // loaded lazily
    };

    Day& day(const std::string& user_id, const std::string& date);
    struct Derived {
        WorkdayTrace trace;
        DayPredictions predictions;
        DailyReport report;
    };
    Derived derive(const std::string& user_id, const std::string& date);
    std::string cached(const std::string& user_id, const std::string& date, const char* name,
                       const std::function<std::string()>& compute);
    void invalidate(const std::string& user_id, const std::string& date);

    std::filesystem::path root_;
    ResponseStore responses_;
    RuleConfig rules_;
    EmotionDictionary dictionary_;
    std::mutex days_mutex_;
    std::map<std::pair<std::string, std::string>, std::unique_ptr<Day>> days_;
};

/// Two prompts per workday at fixed fractions of the workday.
struct PromptSchedule {
    std::array<double, kDailyStateResponseCap> fractions = {0.25, 0.75};

    std::array<std::int64_t, kDailyStateResponseCap> times_ms(const RuleConfig& cfg) const;
    /// Index of the prompt due at `now_ms` (ms since workday start) given the
    /// number of responses already recorded that day, if any.
    std::optional<std::size_t> pending(std::int64_t now_ms, std::size_t recorded, const RuleConfig& cfg) const;
};

std::string prompt_token(const std::string& user_id, const std::string& date, std::size_t prompt_index);

struct ServiceConfig {
    std::filesystem::path data_dir = "affect-data";
    std::filesystem::path assets_dir;  // dictionary, quotes, questionnaire; default_data_dir() when empty
    RuleConfig rules;
    GameConfig game;
    std::uint64_t seed = 0;
    double workday_start_hour = 9.0;  // UTC
    // Wall-clock milliseconds since the Unix epoch; injectable for tests.
    std::function<std::int64_t()> clock;
};

struct HttpRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

class Service {
public:
    explicit Service(ServiceConfig cfg);

    HttpResponse handle(const HttpRequest& request);

    UserDayStore& store() { return store_; }
    /// Current date (UTC) and milliseconds since the configured workday start.
    std::string today() const;
    std::int64_t workday_now_ms() const;

private:
    struct GameSession {
        std::mutex mutex;
        GameState state;
    };

    HttpResponse route(const HttpRequest& request);
    HttpResponse post_events(const std::string& kind, const HttpRequest& request);
    HttpResponse get_report(const HttpRequest& request);
    HttpResponse get_predictions(const HttpRequest& request);
    HttpResponse get_prompt(const HttpRequest& request);
    HttpResponse post_state(const HttpRequest& request);
    HttpResponse post_evaluation(const HttpRequest& request);
    HttpResponse get_evaluation_summary();
    HttpResponse get_quote(const HttpRequest& request);
    HttpResponse post_game(const HttpRequest& request);
    HttpResponse post_game_input(const std::string& id, const HttpRequest& request);
    HttpResponse get_game_state(const std::string& id);

    std::pair<std::string, std::string> user_and_date(const HttpRequest& request) const;
    GameSession& game(const std::string& id);

    ServiceConfig cfg_;
    Questionnaire questionnaire_;
    UserDayStore store_;
    PromptSchedule schedule_;

    std::mutex quotes_mutex_;
    std::map<std::pair<QuoteKind, std::string>, std::unique_ptr<QuoteRotator>> rotators_;
    std::map<QuoteKind, QuoteSet> quote_sets_;

    std::mutex games_mutex_;
    std::map<std::string, std::unique_ptr<GameSession>> games_;
    std::uint64_t next_game_ = 1;
};

/// Serves `service` until the process is stopped. Throws IoError when the
/// address cannot be bound.
void run_server(Service& service, const std::string& host, int port);

}  // namespace affect
