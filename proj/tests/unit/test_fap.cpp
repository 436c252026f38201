#include "affect/fap.hpp"
#include "affect/fusion.hpp"
#include "affect/trace.hpp"

#include "support.hpp"

#include <doctest.h>

#include <atomic>
#include <fstream>
#include <random>
#include <thread>

using namespace affect;
using namespace testsupport;

namespace {

template <typename T>
T pick(std::mt19937_64& gen, const std::vector<T>& items) {
    return items[std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(gen)];
}

std::vector<std::string> pick_some(std::mt19937_64& gen, const std::vector<std::string>& options) {
    std::vector<std::string> out;
    for (const auto& o : options) {
        if (std::bernoulli_distribution(0.4)(gen)) out.push_back(o);
    }
    if (out.empty()) out.push_back(options.front());
    return out;
}

StateResponse random_state(std::mt19937_64& gen, const std::string& user, std::int64_t ts) {
    const auto& q = default_questionnaire();
    StateResponse r;
    r.user_id = user;
    r.ts = Timestamp{ts};
    r.age_group = pick(gen, q.state_question("Q1").options);
    r.years_at_job = pick(gen, q.state_question("Q2").options);
    r.mental_health_rating = pick(gen, q.state_question("Q3").options);
    r.unhappiness_reasons = pick_some(gen, q.state_question("Q4").options);
    r.satisfaction_reasons = pick_some(gen, q.state_question("Q5").options);
    for (auto e : kAllEmotions) {
        if (std::bernoulli_distribution(0.3)(gen)) r.emotions_experienced.insert(e);
    }
    if (r.emotions_experienced.empty()) r.emotions_experienced.insert(Emotion::Neutral);
    r.physical_feeling = pick(gen, q.state_question("Q7").options);
    return r;
}

SessionSummary summary_with(std::initializer_list<std::pair<Emotion, std::size_t>> counts,
                            std::int64_t start = 0, std::int64_t end = 3'600'000) {
    SessionSummary s;
    s.start = Timestamp{start};
    s.end = Timestamp{end};
    for (const auto& [e, n] : counts) {
        s.top_counts[index_of(e)] = n;
        s.window_count += n;
    }
    return s;
}

}  // namespace

TEST_SUITE("fap") {

TEST_CASE("shipped questionnaire") {
    const auto& q = default_questionnaire();
    REQUIRE(q.state.size() == 7);
    REQUIRE(q.evaluation.size() == 5);
    for (std::size_t i = 0; i < 7; ++i) CHECK(q.state[i].id == "Q" + std::to_string(i + 1));
    CHECK(q.state_question("Q4").kind == QuestionKind::Multi);
    CHECK(q.state_question("Q6").options.size() == 7);
    for (auto e : kAllEmotions) CHECK(q.state_question("Q6").allows(to_string(e)));
    for (const char* id : {"Q3", "Q4", "Q5"}) {
        const auto& ev = q.evaluation_question(id);
        CHECK(ev.kind == QuestionKind::Scale);
        CHECK(ev.options == std::vector<std::string>{"NotEffective", "SomewhatEffective", "VeryEffective"});
    }
    CHECK(q.state_question("Q1").text.find("age") != std::string::npos);
    CHECK_THROWS(q.state_question("Q9"));
    // Loading the same file twice yields the same structure.
    const auto again = load_questionnaire(data_dir() / "questionnaire.json");
    CHECK(to_json(again) == to_json(q));
}

TEST_CASE("questionnaire structure is checked") {
    auto j = to_json(default_questionnaire());
    CHECK_NOTHROW(parse_questionnaire(j.dump()));
    auto missing = j;
    missing["state"].erase(missing["state"].begin());
    CHECK_THROWS_AS(parse_questionnaire(missing.dump()), ParseError);
    auto wrong_kind = j;
    wrong_kind["state"][5]["kind"] = "choice";
    CHECK_THROWS_AS(parse_questionnaire(wrong_kind.dump()), ParseError);
    CHECK_THROWS_AS(parse_questionnaire("{"), ParseError);
}

TEST_CASE("response validation") {
    CHECK_NOTHROW(validate(sample_state("u", 1)));
    auto r = sample_state("u", 1);
    r.age_group = "12-17";
    CHECK_THROWS_AS(validate(r), ValidationError);
    r = sample_state("u", 1);
    r.unhappiness_reasons.clear();
    CHECK_THROWS_AS(validate(r), ValidationError);
    r = sample_state("u", 1);
    r.unhappiness_reasons = {"Commute", "Commute"};
    CHECK_THROWS_AS(validate(r), ValidationError);
    r = sample_state("u", 1, {});
    CHECK_THROWS_AS(validate(r), ValidationError);
    r = sample_state("", 1);
    CHECK_THROWS_AS(validate(r), ValidationError);
    auto e = sample_eval("u", 1, Effectiveness::VeryEffective, Effectiveness::VeryEffective,
                         Effectiveness::SomewhatEffective);
    CHECK_NOTHROW(validate(e));
    e.years_at_job = "forever";
    CHECK_THROWS_AS(validate(e), ValidationError);
}

TEST_CASE("unknown emotion in a stored response") {
    const std::string content = std::string(kResponsesHeader) +
                                "5,u,Q1,25-34\n5,u,Q2,1-3\n5,u,Q3,Good\n5,u,Q4,Deadlines\n"
                                "5,u,Q5,Team\n5,u,Q6,Happy;Bored\n5,u,Q7,Fine\n";
    try {
        parse_state_responses(content, "responses.csv");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("Bored") != std::string::npos);
        CHECK(std::string(e.what()).find("responses.csv:2") != std::string::npos);
    }
}

TEST_CASE("emotions arrive through the wire form") {
    auto j = to_json(sample_state("u", 1));
    j["answers"]["Q6"] = {"Happy", "Bored"};
    CHECK_THROWS_AS(state_response_from_json(j), ValidationError);
    auto extra = to_json(sample_state("u", 1));
    extra["mood"] = "ok";
    CHECK_THROWS_AS(state_response_from_json(extra), ValidationError);
    auto missing = to_json(sample_state("u", 1));
    missing["answers"].erase("Q7");
    CHECK_THROWS_AS(state_response_from_json(missing), ValidationError);
}

TEST_CASE("wire form round-trips") {
    std::mt19937_64 gen(1);
    for (int i = 0; i < 200; ++i) {
        const auto r = random_state(gen, "user" + std::to_string(i % 3), i);
        CHECK(state_response_from_json(nlohmann::json::parse(to_json(r).dump())) == r);
    }
    const auto e = sample_eval("u", 9, Effectiveness::NotEffective, Effectiveness::SomewhatEffective,
                               Effectiveness::VeryEffective);
    CHECK(eval_response_from_json(nlohmann::json::parse(to_json(e).dump())) == e);
}

TEST_CASE("response CSV round-trips") {
    std::mt19937_64 gen(42);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<StateResponse> rs;
        std::string content(kResponsesHeader);
        const int n = trial % 6;
        for (int i = 0; i < n; ++i) {
            rs.push_back(random_state(gen, trial % 2 ? "a" : "b", 1000 * i));
            content += format_rows(rs.back());
        }
        CHECK(parse_state_responses(content, "r.csv") == rs);
        // Header is optional.
        CHECK(parse_state_responses(content.substr(kResponsesHeader.size()), "r.csv") == rs);
    }
    std::vector<EvalResponse> es;
    std::string content;
    for (int i = 0; i < 27; ++i) {
        es.push_back(sample_eval("u" + std::to_string(i), i, kAllEffectiveness[i % 3], kAllEffectiveness[(i / 3) % 3],
                                 kAllEffectiveness[(i / 9) % 3]));
        content += format_rows(es.back());
    }
    CHECK(parse_eval_responses(content, "eval.csv") == es);
}

TEST_CASE("incomplete or reordered groups are rejected") {
    const auto full = format_rows(sample_state("u", 5));
    const auto cut = full.substr(0, full.rfind("5,u,Q7"));
    CHECK_THROWS_AS(parse_state_responses(cut, "r.csv"), ParseError);
    std::string swapped = full;
    const auto q1 = swapped.find("Q1"), q2 = swapped.find("Q2");
    swapped[q1 + 1] = '2';
    swapped[q2 + 1] = '1';
    CHECK_THROWS_AS(parse_state_responses(swapped, "r.csv"), ParseError);
}

TEST_CASE("store enforces the daily cap") {
    TempDir dir;
    ResponseStore store(dir.path());
    store.record_state("2024-01-15", sample_state("ann", 1000));
    store.record_state("2024-01-15", sample_state("ann", 2000));
    CHECK_THROWS_AS(store.record_state("2024-01-15", sample_state("ann", 3000)), CapExceeded);
    CHECK(store.state_responses("ann", "2024-01-15").size() == 2);
    // The cap is per user and per day.
    CHECK_NOTHROW(store.record_state("2024-01-16", sample_state("ann", 3000)));
    CHECK_NOTHROW(store.record_state("2024-01-15", sample_state("ben", 3000)));
    CHECK(store.state_responses("nobody", "2024-01-15").empty());
}

TEST_CASE("store rejects duplicates and invalid input") {
    TempDir dir;
    ResponseStore store(dir.path());
    store.record_state("2024-01-15", sample_state("ann", 1000));
    CHECK_THROWS_AS(store.record_state("2024-01-15", sample_state("ann", 1000)), DuplicateResponse);
    CHECK_THROWS_AS(store.record_state("not-a-date", sample_state("ann", 5)), ValidationError);
    CHECK_THROWS_AS(store.record_state("2024-01-15", sample_state("../x", 5)), ValidationError);
    auto bad = sample_state("ann", 9);
    bad.physical_feeling = "Sleepy";
    CHECK_THROWS_AS(store.record_state("2024-01-15", bad), ValidationError);
    CHECK(store.state_responses("ann", "2024-01-15").size() == 1);

    const auto e = sample_eval("ann", 1, Effectiveness::VeryEffective, Effectiveness::VeryEffective,
                               Effectiveness::VeryEffective);
    store.record_eval(e);
    CHECK_THROWS_AS(store.record_eval(e), DuplicateResponse);
    CHECK(store.eval_responses() == std::vector<EvalResponse>{e});
    CHECK(read_file(store.eval_path()).rfind(kResponsesHeader, 0) == 0);
}

TEST_CASE("concurrent submissions never exceed the cap") {
    for (int round = 0; round < 5; ++round) {
        TempDir dir;
        ResponseStore store(dir.path());
        std::atomic<int> ok{0}, capped{0};
        std::vector<std::thread> threads;
        for (int t = 0; t < 8; ++t) {
            threads.emplace_back([&, t] {
                try {
                    store.record_state("2024-01-15", sample_state("cat", 1000 + t));
                    ++ok;
                } catch (const CapExceeded&) {
                    ++capped;
                }
            });
        }
        for (auto& th : threads) th.join();
        CHECK(ok == 2);
        CHECK(capped == 6);
        CHECK(store.state_responses("cat", "2024-01-15").size() == 2);
    }
}

TEST_CASE("torn response files are repaired") {
    TempDir dir;
    const auto path = dir / "responses.csv";
    const auto a = sample_state("u", 1);
    const auto b = sample_state("u", 2);
    const std::string good = std::string(kResponsesHeader) + format_rows(a);
    const auto second = format_rows(b);
    for (std::size_t cut = 0; cut < second.size(); ++cut) {
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            out << good << second.substr(0, cut);
        }
        const auto removed = repair_response_file(path, 7);
        CHECK(removed == cut);
        CHECK(parse_state_responses(read_file(path), path.string()) == std::vector<StateResponse>{a});
    }
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << good << second;
    }
    CHECK(repair_response_file(path, 7) == 0);
    CHECK(repair_response_file(dir / "absent.csv", 7) == 0);
}

TEST_CASE("validate_rap examples") {
    CHECK(validate_rap(summary_with({{Emotion::Happy, 5}, {Emotion::Neutral, 2}}),
                       sample_state("u", 0, {Emotion::Happy, Emotion::Surprise})));
    CHECK_FALSE(validate_rap(summary_with({{Emotion::Sad, 5}}), sample_state("u", 0, {Emotion::Happy})));
    CHECK(validate_rap(summary_with({{Emotion::Happy, 3}, {Emotion::Neutral, 3}}),
                       sample_state("u", 0, {Emotion::Neutral})));
    CHECK_THROWS_AS(validate_rap(SessionSummary{}, sample_state("u", 0)), EmptySession);
}

TEST_CASE("agreement pairing and rate") {
    RapFapAgreement none;
    CHECK_FALSE(none.rate().has_value());
    none.add(true);
    none.add(false);
    CHECK(none.rate() == Fraction(1, 2));

    const std::vector<SessionSummary> sessions = {
        summary_with({{Emotion::Happy, 4}}, 0, 1'000'000),
        summary_with({{Emotion::Sad, 4}}, 2'000'000, 3'000'000),
        SessionSummary{},
    };
    // Midpoints 500k and 2.5M; one response near each.
    const std::vector<StateResponse> rs = {sample_state("u", 400'000, {Emotion::Happy}),
                                           sample_state("u", 2'600'000, {Emotion::Happy})};
    const auto a = compute_agreement(sessions, rs);
    CHECK(a.sessions_compared == 2);
    CHECK(a.agreed == 1);
    CHECK(compute_agreement(sessions, {}).sessions_compared == 0);

    // Equidistant responses: the earlier one is used.
    const std::vector<StateResponse> tie = {sample_state("u", 400'000, {Emotion::Sad}),
                                            sample_state("u", 600'000, {Emotion::Happy})};
    CHECK(compute_agreement(std::span(sessions).first(1), tie).agreed == 0);
}

TEST_CASE("agreement never exceeds comparisons and grows with matching reports") {
    std::mt19937_64 gen(6);
    std::uniform_int_distribution<int> label(0, 6), count(0, 5);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<SessionSummary> sessions;
        for (int s = 0; s < 4; ++s) {
            SessionSummary ss;
            ss.start = Timestamp{s * 1'000'000};
            ss.end = Timestamp{s * 1'000'000 + 500'000};
            for (auto e : kAllEmotions) {
                ss.top_counts[index_of(e)] = static_cast<std::size_t>(count(gen));
                ss.window_count += ss.top_counts[index_of(e)];
            }
            sessions.push_back(ss);
        }
        std::vector<StateResponse> rs = {sample_state("u", 100'000, {static_cast<Emotion>(label(gen))}),
                                         sample_state("u", 2'700'000, {static_cast<Emotion>(label(gen))})};
        const auto base = compute_agreement(sessions, rs);
        CHECK(base.agreed <= base.sessions_compared);
        // Reporting more emotions can only keep or raise agreement.
        for (auto& r : rs) r.emotions_experienced.insert(static_cast<Emotion>(label(gen)));
        const auto more = compute_agreement(sessions, rs);
        CHECK(more.sessions_compared == base.sessions_compared);
        CHECK(more.agreed >= base.agreed);
        for (auto& r : rs) r.emotions_experienced = {kAllEmotions.begin(), kAllEmotions.end()};
        const auto all = compute_agreement(sessions, rs);
        CHECK(all.agreed == all.sessions_compared);
    }
}

TEST_CASE("evaluation summary") {
    const auto empty = summarize_eval({});
    CHECK(empty.responses == 0);
    CHECK(empty.none_not_effective);
    for (const auto& q : empty.counts)
        for (auto c : q) CHECK(c == 0);

    using E = Effectiveness;
    const std::vector<EvalResponse> five = {
        sample_eval("a", 1, E::VeryEffective, E::VeryEffective, E::VeryEffective),
        sample_eval("b", 2, E::SomewhatEffective, E::VeryEffective, E::VeryEffective),
        sample_eval("c", 3, E::VeryEffective, E::VeryEffective, E::SomewhatEffective),
        sample_eval("d", 4, E::VeryEffective, E::SomewhatEffective, E::VeryEffective),
        sample_eval("e", 5, E::SomewhatEffective, E::SomewhatEffective, E::VeryEffective),
    };
    const auto s = summarize_eval(five);
    CHECK(s.responses == 5);
    CHECK(s.none_not_effective);
    CHECK(s.counts[1] == std::array<std::size_t, 3>{0, 2, 3});
    const auto j = to_json(s);
    CHECK(j["questions"]["Q4"]["VeryEffective"] == 3);
    CHECK(j["none_not_effective"] == true);

    auto with_no = five;
    with_no.push_back(sample_eval("f", 6, E::VeryEffective, E::NotEffective, E::VeryEffective));
    CHECK_FALSE(summarize_eval(with_no).none_not_effective);
}

TEST_CASE("effectiveness names") {
    for (auto e : kAllEffectiveness) CHECK(parse_effectiveness(to_string(e)) == e);
    CHECK_FALSE(parse_effectiveness("Meh").has_value());
}

}
