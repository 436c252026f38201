#include "affect/activity.hpp"

#include <doctest.h>

#include <random>

using namespace affect;

namespace {

std::vector<KeystrokeEvent> keys(std::size_t n, std::int64_t step_ms = 100) {
    std::vector<KeystrokeEvent> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back({Timestamp{static_cast<std::int64_t>(i) * step_ms}, KeyClass::Character, std::nullopt});
    }
    return out;
}

std::vector<SessionEvent> breaks(int pairs, std::int64_t start_ms = 60'000, std::int64_t every_ms = 600'000) {
    std::vector<SessionEvent> out;
    for (int i = 0; i < pairs; ++i) {
        const std::int64_t t = start_ms + i * every_ms;
        out.push_back({Timestamp{t}, SessionKind::Locked});
        out.push_back({Timestamp{t + 120'000}, SessionKind::Unlocked});
    }
    return out;
}

}  // namespace

TEST_SUITE("activity") {

TEST_CASE("keystroke threshold is strict") {
    const RuleConfig cfg;
    CHECK(keystroke_stats(keys(5999), cfg).low_productivity_flag);
    CHECK_FALSE(keystroke_stats(keys(6000), cfg).low_productivity_flag);
    CHECK_FALSE(keystroke_stats(keys(6001), cfg).low_productivity_flag);
    CHECK(low_productivity(0, cfg));
    CHECK_FALSE(low_productivity(6000, cfg));
}

TEST_CASE("every key class counts toward the total") {
    const RuleConfig cfg;
    auto k = keys(6000);
    for (std::size_t i = 0; i < k.size(); i += 3) k[i].key_class = KeyClass::Navigation;
    for (std::size_t i = 1; i < k.size(); i += 3) k[i].key_class = KeyClass::FunctionControl;
    const auto r = keystroke_stats(k, cfg);
    CHECK(r.total_keystrokes == 6000);
    CHECK(r.character_keystrokes == 2000);
    CHECK_FALSE(r.low_productivity_flag);
}

TEST_CASE("empty keystroke stream") {
    const auto r = keystroke_stats({}, RuleConfig{});
    CHECK(r.total_keystrokes == 0);
    CHECK(r.words_per_minute == 0.0);
    CHECK(r.typing_sessions == 0);
    CHECK(r.low_productivity_flag);
}

TEST_CASE("typing sessions, gaps, and words per minute") {
    const RuleConfig cfg;
    std::vector<KeystrokeEvent> k;
    // Session 1: 0..60s, 300 chars. Session 2 starts 120s later: 120s long, 600 chars.
    for (int i = 0; i < 300; ++i) k.push_back({Timestamp{i * 200}, KeyClass::Character, std::nullopt});
    const std::int64_t s2 = 59'800 + 120'000;
    for (int i = 0; i < 601; ++i) k.push_back({Timestamp{s2 + i * 200}, KeyClass::Character, std::nullopt});
    k[10].word_completed = "hello";
    const auto r = keystroke_stats(k, cfg);
    CHECK(r.typing_sessions == 2);
    CHECK(r.words_completed == 1);
    CHECK(r.mean_session_duration == doctest::Approx((59.8 + 120.0) / 2));
    CHECK(r.mean_gap_between_sessions == doctest::Approx(120.0));
    CHECK(r.words_per_minute == doctest::Approx(901.0 / 5.0 / (179.8 / 60.0)));
}

TEST_CASE("a gap of exactly typing_gap_seconds keeps the session") {
    const RuleConfig cfg;
    const std::vector<KeystrokeEvent> k = {{Timestamp{0}, KeyClass::Character, std::nullopt},
                                           {Timestamp{60'000}, KeyClass::Character, std::nullopt},
                                           {Timestamp{120'001}, KeyClass::Character, std::nullopt}};
    CHECK(keystroke_stats(k, cfg).typing_sessions == 2);
}

TEST_CASE("break threshold is inclusive") {
    const RuleConfig cfg;
    CHECK_FALSE(interruption_stats(breaks(9), cfg).disengagement_flag);
    const auto ten = interruption_stats(breaks(10), cfg);
    CHECK(ten.breaks == 10);
    CHECK(ten.disengagement_flag);
    CHECK(ten.total_locked_time == doctest::Approx(1200.0));
    CHECK(ten.mean_break_duration == doctest::Approx(120.0));
    CHECK(interruption_stats({}, cfg) == InterruptionReport{});
}

TEST_CASE("trailing lock runs to the workday end") {
    RuleConfig cfg;
    cfg.workday_hours = 9;
    const std::vector<SessionEvent> e = {{Timestamp{0}, SessionKind::Locked}};
    const auto r = interruption_stats(e, cfg);
    CHECK(r.breaks == 1);
    CHECK(r.total_locked_time == 9 * 3600.0);

    // A lock after the nominal end ends at itself.
    const std::vector<SessionEvent> late = {{Timestamp{cfg.workday_ms() + 5000}, SessionKind::Locked}};
    CHECK(interruption_stats(late, cfg).total_locked_time == 0.0);
}

TEST_CASE("repeated lock events count once") {
    const RuleConfig cfg;
    const std::vector<SessionEvent> e = {{Timestamp{0}, SessionKind::Locked},
                                         {Timestamp{10}, SessionKind::Locked},
                                         {Timestamp{1000}, SessionKind::Unlocked},
                                         {Timestamp{2000}, SessionKind::Unlocked}};
    const auto r = interruption_stats(e, cfg);
    CHECK(r.breaks == 1);
    CHECK(r.total_locked_time == 1.0);
}

TEST_CASE("leading unlock is not a break") {
    const std::vector<SessionEvent> e = {{Timestamp{5}, SessionKind::Unlocked}};
    CHECK(interruption_stats(e, RuleConfig{}).breaks == 0);
}

TEST_CASE("counts are additive over a split") {
    const RuleConfig cfg;
    std::mt19937_64 gen(12);
    std::uniform_int_distribution<int> step(1, 90'000), cls(0, 2), word(0, 6);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<KeystrokeEvent> k;
        std::int64_t t = 0;
        const int n = trial * 7;
        for (int i = 0; i < n; ++i) {
            t += step(gen);
            KeystrokeEvent e{Timestamp{t}, static_cast<KeyClass>(cls(gen)), std::nullopt};
            if (word(gen) == 0) e.word_completed = "w";
            k.push_back(e);
        }
        const std::size_t cut = n ? static_cast<std::size_t>(trial) % k.size() : 0;
        const auto whole = keystroke_stats(k, cfg);
        const auto a = keystroke_stats(std::span(k).first(cut), cfg);
        const auto b = keystroke_stats(std::span(k).subspan(cut), cfg);
        CHECK(whole.total_keystrokes == a.total_keystrokes + b.total_keystrokes);
        CHECK(whole.character_keystrokes == a.character_keystrokes + b.character_keystrokes);
        CHECK(whole.words_completed == a.words_completed + b.words_completed);
        CHECK(whole.typing_sessions <= a.typing_sessions + b.typing_sessions);
        CHECK(whole.typing_sessions + 1 >= a.typing_sessions + b.typing_sessions);

        const auto s = breaks(trial % 15, 1000, 300'000);
        const std::size_t scut = 2 * (static_cast<std::size_t>(trial) % (s.size() / 2 + 1));
        const auto sw = interruption_stats(s, cfg);
        const auto sa = interruption_stats(std::span(s).first(scut), cfg);
        const auto sb = interruption_stats(std::span(s).subspan(scut), cfg);
        CHECK(sw.breaks == sa.breaks + sb.breaks);
        CHECK(sw.total_locked_time == doctest::Approx(sa.total_locked_time + sb.total_locked_time));
    }
}

TEST_CASE("thresholds come from the config") {
    RuleConfig cfg;
    cfg.keystroke_threshold = 10;
    cfg.break_threshold = 2;
    CHECK_FALSE(keystroke_stats(keys(10), cfg).low_productivity_flag);
    CHECK(interruption_stats(breaks(2), cfg).disengagement_flag);
    CHECK_FALSE(interruption_stats(breaks(1), cfg).disengagement_flag);
}

}
