// affectctl: batch entry point for simulation, analysis, reports, and the HTTP service.

#include "affect/config.hpp"
#include "affect/csv.hpp"
#include "affect/fap.hpp"
#include "affect/report.hpp"
#include "affect/service.hpp"
#include "affect/simulate.hpp"
#include "affect/text.hpp"
#include "affect/trace.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace affect;

namespace {

struct Options {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "text";
    std::string user;
    std::string date;
    std::string data_dir = "affect-data";
    std::string assets_dir;
    std::string persona;
    std::string trace_dir;
    std::string responses;
    std::string host = "127.0.0.1";
    int port = 8080;
};

RuleConfig rules_from(const Options& o) {
    return o.config.empty() ? RuleConfig{} : load_rule_config(o.config);
}

fs::path assets_from(const Options& o) { return o.assets_dir.empty() ? default_data_dir() : fs::path(o.assets_dir); }

void write_text(const fs::path& path, const std::string& data) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << data;
    if (!out) throw IoError("cannot write " + path.string());
}

std::string sessions_csv(const std::vector<SessionSummary>& sessions) {
    std::vector<std::string> header = {"session", "start_ms", "end_ms", "windows"};
    for (auto e : kAllEmotions) header.emplace_back(to_string(e));
    header.emplace_back("argmax");
    std::string out = csv::format_row(header);
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        const auto& s = sessions[i];
        std::vector<std::string> row = {std::to_string(i + 1), std::to_string(s.start.ms), std::to_string(s.end.ms),
                                        std::to_string(s.window_count)};
        for (auto e : kAllEmotions) row.push_back(std::to_string(s.top_counts[index_of(e)]));
        std::vector<std::string> top;
        for (auto e : s.argmax()) top.emplace_back(to_string(e));
        row.push_back(text::join(top, ";"));
        out += csv::format_row(row);
    }
    return out;
}

int cmd_simulate(const Options& o) {
    const auto persona = parse_persona(o.persona);
    if (!persona) throw ValidationError(fmt::format("unknown persona '{}'", o.persona));
    const auto cfg = rules_from(o);
    const auto trace = simulate_workday(*persona, o.seed, cfg, o.user.empty() ? "sim-user" : o.user,
                                        o.date.empty() ? "2024-01-15" : o.date);
    write_trace(trace, o.out);
    return 0;
}

int cmd_analyze(const Options& o) {
    const auto cfg = rules_from(o);
    std::vector<std::string> warnings;
    auto trace = load_trace(o.trace_dir, &warnings);
    if (!o.user.empty()) trace.user_id = o.user;
    if (!o.date.empty()) trace.date = o.date;
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    const auto dict = load_dictionary(assets_from(o) / "dictionary.xml");
    const auto questionnaire = load_questionnaire(assets_from(o) / "questionnaire.json");
    std::vector<StateResponse> responses;
    fs::path responses_path = o.responses.empty() ? fs::path(o.trace_dir) / "responses.csv" : fs::path(o.responses);
    if (!o.responses.empty() || fs::exists(responses_path)) {
        responses = parse_state_responses(read_file(responses_path), responses_path.string(), questionnaire);
    }

    const auto predictions = predict_day(trace, dict, cfg);
    const auto report = build_daily_report(trace, predictions, responses, cfg);
    const bool machine = o.format == "machine";
    const auto rendered = machine ? format_report_machine(report) : format_report_text(report);
    if (o.out.empty()) {
        std::cout << rendered;
        return 0;
    }
    const fs::path out(o.out);
    write_text(out / (machine ? "report.json" : "report.txt"), rendered);
    write_text(out / "sessions.csv", sessions_csv(report.session_summaries));
    write_text(out / "gaze_x.csv", format_gaze_scatter(trace.gaze));
    return 0;
}

int cmd_report(const Options& o) {
    if (o.user.empty()) throw ValidationError("--user is required");
    if (o.date.empty()) throw ValidationError("--date is required");
    const auto questionnaire = load_questionnaire(assets_from(o) / "questionnaire.json");
    UserDayStore store(o.data_dir, questionnaire);
    store.set_rules(rules_from(o));
    store.set_dictionary(load_dictionary(assets_from(o) / "dictionary.xml"));
    const auto rendered = o.format == "machine" ? store.report_machine(o.user, o.date) : store.report_text(o.user, o.date);
    if (o.out.empty()) {
        std::cout << rendered;
    } else {
        write_text(fs::path(o.out) / (o.format == "machine" ? "report.json" : "report.txt"), rendered);
    }
    return 0;
}

int cmd_eval_summary(const Options& o) {
    const auto questionnaire = load_questionnaire(assets_from(o) / "questionnaire.json");
    const fs::path path = o.responses.empty() ? fs::path(o.data_dir) / "eval.csv" : fs::path(o.responses);
    std::vector<EvalResponse> responses;
    if (fs::exists(path)) responses = parse_eval_responses(read_file(path), path.string(), questionnaire);
    else if (!o.responses.empty()) throw IoError("evaluation file not found: " + path.string());
    const auto summary = summarize_eval(responses);
    if (o.format == "machine") {
        std::cout << to_json(summary).dump(2) << "\n";
        return 0;
    }
    std::cout << fmt::format("responses {}\n", summary.responses);
    for (std::size_t q = 0; q < 3; ++q) {
        std::cout << fmt::format("Q{}", q + 3);
        for (auto e : kAllEffectiveness) {
            std::cout << fmt::format(" {}={}", to_string(e), summary.counts[q][static_cast<std::size_t>(e)]);
        }
        std::cout << "\n";
    }
    std::cout << fmt::format("none_not_effective {}\n", summary.none_not_effective);
    return 0;
}

int cmd_serve(const Options& o) {
    ServiceConfig cfg;
    cfg.data_dir = o.data_dir;
    cfg.assets_dir = assets_from(o);
    cfg.rules = rules_from(o);
    cfg.seed = o.seed;
    Service service(std::move(cfg));
    std::cerr << fmt::format("listening on {}:{}\n", o.host, o.port);
    run_server(service, o.host, o.port);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Affect monitoring engine: simulate, analyze, report, serve"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Rule configuration file (key=value)")->check(CLI::ExistingFile);
        sub->add_option("--assets-dir", o.assets_dir, "Directory with dictionary, quotes, and questionnaire");
    };
    const std::vector<std::string> formats = {"text", "machine"};

    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic workday trace");
    add_common(simulate);
    simulate->add_option("--persona", o.persona, "engaged or disengaged")->required();
    simulate->add_option("--seed", o.seed, "Random seed");
    simulate->add_option("--out", o.out, "Output trace directory")->required();
    simulate->add_option("--user", o.user, "User id recorded in the trace");
    simulate->add_option("--date", o.date, "Date recorded in the trace (YYYY-MM-DD)");

    auto* analyze = app.add_subcommand("analyze", "Run the full pipeline over a trace directory");
    add_common(analyze);
    analyze->add_option("trace", o.trace_dir, "Trace directory")->required();
    analyze->add_option("--out", o.out, "Output directory (stdout when omitted)");
    analyze->add_option("--format", o.format, "text or machine")->check(CLI::IsMember(formats));
    analyze->add_option("--responses", o.responses, "State questionnaire responses.csv");
    analyze->add_option("--user", o.user, "Override the user id");
    analyze->add_option("--date", o.date, "Override the date");

    auto* report = app.add_subcommand("report", "Daily report from a service data directory");
    add_common(report);
    report->add_option("--data-dir", o.data_dir, "Service data directory");
    report->add_option("--user", o.user, "User id")->required();
    report->add_option("--date", o.date, "Date (YYYY-MM-DD)")->required();
    report->add_option("--format", o.format, "text or machine")->check(CLI::IsMember(formats));
    report->add_option("--out", o.out, "Output directory (stdout when omitted)");

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    add_common(serve);
    serve->add_option("--data-dir", o.data_dir, "Service data directory");
    serve->add_option("--host", o.host, "Listen address");
    serve->add_option("--port", o.port, "Listen port")->check(CLI::Range(1, 65535));
    serve->add_option("--seed", o.seed, "Seed for quote rotation and game sessions");

    auto* eval = app.add_subcommand("eval-summary", "Summarize evaluation questionnaire responses");
    add_common(eval);
    eval->add_option("--data-dir", o.data_dir, "Service data directory (reads eval.csv)");
    eval->add_option("--responses", o.responses, "Explicit eval.csv path");
    eval->add_option("--format", o.format, "text or machine")->check(CLI::IsMember(formats));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*simulate) return cmd_simulate(o);
        if (*analyze) return cmd_analyze(o);
        if (*report) return cmd_report(o);
        if (*serve) return cmd_serve(o);
        if (*eval) return cmd_eval_summary(o);
    } catch (const affect::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
