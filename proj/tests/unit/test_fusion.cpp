#include "affect/fusion.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

using namespace affect;

namespace {

ModalityPrediction vote(Modality m, Emotion e, std::int64_t start = 0, std::int64_t end = 4500) {
    ModalityPrediction p;
    p.modality = m;
    p.emotion = e;
    p.window_start = Timestamp{start};
    p.window_end = Timestamp{end};
    if (e != Emotion::Neutral) p.fired_rule = m == Modality::Speech ? Rule::DictionaryHit : Rule::Smile;
    return p;
}

struct Expected {
    Emotion top;
    std::vector<std::tuple<Emotion, std::int64_t, std::int64_t>> ranked;  // emotion, reduced num, reduced den
};

// Oracle over plain integers: count each label, order by count then by the
// earliest modality in the priority list that voted for it.
Expected oracle(const std::vector<std::pair<Modality, Emotion>>& votes, const TiePriority& order) {
    std::map<Emotion, int> count;
    std::map<Emotion, int> first_pos;
    for (const auto& [m, e] : votes) {
        ++count[e];
        const int pos = static_cast<int>(std::find(order.begin(), order.end(), m) - order.begin());
        if (!first_pos.count(e) || pos < first_pos[e]) first_pos[e] = pos;
    }
    std::vector<Emotion> labels;
    for (const auto& [e, n] : count) labels.push_back(e);
    // Insertion sort by hand so the oracle shares no comparator with the implementation.
    for (std::size_t i = 1; i < labels.size(); ++i) {
        for (std::size_t j = i; j > 0; --j) {
            const auto a = labels[j - 1], b = labels[j];
            const bool swap = count[b] > count[a] || (count[b] == count[a] && first_pos[b] < first_pos[a]);
            if (!swap) break;
            std::swap(labels[j - 1], labels[j]);
        }
    }
    Expected ex;
    ex.top = labels.front();
    const auto n = static_cast<std::int64_t>(votes.size());
    for (auto e : labels) {
        const auto g = std::gcd(static_cast<std::int64_t>(count[e]), n);
        ex.ranked.emplace_back(e, count[e] / g, n / g);
    }
    return ex;
}

void check_against_oracle(const std::vector<std::pair<Modality, Emotion>>& raw, const TiePriority& order) {
    std::vector<ModalityPrediction> votes;
    for (const auto& [m, e] : raw) votes.push_back(vote(m, e));
    const auto got = fuse(votes, order);
    const auto want = oracle(raw, order);
    CHECK(got.top == want.top);
    REQUIRE(got.ranked.size() == want.ranked.size());
    Fraction total(0);
    for (std::size_t i = 0; i < want.ranked.size(); ++i) {
        CHECK(got.ranked[i].emotion == std::get<0>(want.ranked[i]));
        CHECK(got.ranked[i].probability.numerator() == std::get<1>(want.ranked[i]));
        CHECK(got.ranked[i].probability.denominator() == std::get<2>(want.ranked[i]));
        total += got.ranked[i].probability;
    }
    CHECK(total == Fraction(1));
}

}  // namespace

TEST_SUITE("fusion") {

TEST_CASE("fraction formatting") {
    CHECK(format_fraction(Fraction(2, 3)) == "2/3");
    CHECK(format_fraction(Fraction(4, 6)) == "2/3");
    CHECK(format_fraction(Fraction(1)) == "1");
    CHECK(format_fraction(Fraction(0)) == "0");
    CHECK(parse_fraction("2/3") == Fraction(2, 3));
    CHECK(parse_fraction("1") == Fraction(1));
    CHECK_THROWS_AS(parse_fraction("1/0"), ParseError);
    CHECK_THROWS_AS(parse_fraction("0.5"), ParseError);
}

TEST_CASE("two of three votes") {
    const std::vector<ModalityPrediction> v = {vote(Modality::Face, Emotion::Happy),
                                               vote(Modality::Speech, Emotion::Happy),
                                               vote(Modality::Posture, Emotion::Neutral)};
    const auto f = fuse(v);
    CHECK(f.top == Emotion::Happy);
    REQUIRE(f.ranked.size() == 2);
    CHECK(f.ranked[0] == RankedEmotion{Emotion::Happy, Fraction(2, 3)});
    CHECK(f.ranked[1] == RankedEmotion{Emotion::Neutral, Fraction(1, 3)});
    CHECK(format_fraction(f.ranked[0].probability) == "2/3");
    CHECK(format_fraction(f.ranked[1].probability) == "1/3");
    CHECK(f.votes.size() == 3);
    CHECK(f.votes[0].modality == Modality::Face);
}

TEST_CASE("unanimous vote") {
    const std::vector<ModalityPrediction> v = {vote(Modality::Face, Emotion::Sad), vote(Modality::Speech, Emotion::Sad),
                                               vote(Modality::Posture, Emotion::Sad)};
    const auto f = fuse(v);
    CHECK(f.top == Emotion::Sad);
    REQUIRE(f.ranked.size() == 1);
    CHECK(f.ranked[0].probability == Fraction(1));
}

TEST_CASE("three-way tie goes to face") {
    const std::vector<ModalityPrediction> v = {vote(Modality::Posture, Emotion::Sad),
                                               vote(Modality::Speech, Emotion::Happy),
                                               vote(Modality::Face, Emotion::Anger)};
    const auto f = fuse(v);
    CHECK(f.top == Emotion::Anger);
    REQUIRE(f.ranked.size() == 3);
    CHECK(f.ranked[0].emotion == Emotion::Anger);
    CHECK(f.ranked[1].emotion == Emotion::Happy);
    CHECK(f.ranked[2].emotion == Emotion::Sad);
    for (const auto& r : f.ranked) CHECK(r.probability == Fraction(1, 3));

    const TiePriority posture_first = {Modality::Posture, Modality::Speech, Modality::Face};
    CHECK(fuse(v, posture_first).top == Emotion::Sad);
}

TEST_CASE("vote validation") {
    CHECK_THROWS_AS(fuse(std::vector<ModalityPrediction>{}), EmptyVotes);
    const std::vector<ModalityPrediction> dup = {vote(Modality::Face, Emotion::Happy), vote(Modality::Face, Emotion::Sad)};
    CHECK_THROWS_AS(fuse(dup), DuplicateModality);
    const std::vector<ModalityPrediction> skew = {vote(Modality::Face, Emotion::Happy),
                                                  vote(Modality::Posture, Emotion::Sad, 0, 9999)};
    CHECK_THROWS_AS(fuse(skew), ValidationError);
}

TEST_CASE("exhaustive three-modality oracle (343 cases)") {
    int cases = 0;
    for (auto f : kAllEmotions)
        for (auto s : kAllEmotions)
            for (auto p : kAllEmotions) {
                check_against_oracle({{Modality::Face, f}, {Modality::Speech, s}, {Modality::Posture, p}},
                                     kDefaultTiePriority);
                ++cases;
            }
    CHECK(cases == 343);
}

TEST_CASE("exhaustive two-modality oracle (49 cases per pair)") {
    const std::pair<Modality, Modality> pairs[] = {{Modality::Face, Modality::Speech},
                                                   {Modality::Face, Modality::Posture},
                                                   {Modality::Speech, Modality::Posture}};
    for (const auto& [m1, m2] : pairs) {
        int cases = 0;
        for (auto a : kAllEmotions)
            for (auto b : kAllEmotions) {
                check_against_oracle({{m1, a}, {m2, b}}, kDefaultTiePriority);
                ++cases;
            }
        CHECK(cases == 49);
    }
}

TEST_CASE("single vote has probability one") {
    for (auto e : kAllEmotions) check_against_oracle({{Modality::Speech, e}}, kDefaultTiePriority);
}

TEST_CASE("fusion is invariant to vote order") {
    std::mt19937_64 gen(3);
    std::uniform_int_distribution<int> label(0, 6);
    const TiePriority orders[] = {kDefaultTiePriority,
                                  {Modality::Speech, Modality::Posture, Modality::Face},
                                  {Modality::Posture, Modality::Face, Modality::Speech}};
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<ModalityPrediction> v = {vote(Modality::Face, static_cast<Emotion>(label(gen))),
                                             vote(Modality::Speech, static_cast<Emotion>(label(gen))),
                                             vote(Modality::Posture, static_cast<Emotion>(label(gen)))};
        const auto& order = orders[trial % 3];
        const auto base = fuse(v, order);
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.modality < b.modality; });
        do {
            CHECK(fuse(v, order) == base);
        } while (std::next_permutation(v.begin(), v.end(),
                                       [](const auto& a, const auto& b) { return a.modality < b.modality; }));
    }
}

TEST_CASE("fuse_windows aligns posture, face, and speech") {
    const RuleConfig cfg;
    const std::vector<ModalityPrediction> posture = {vote(Modality::Posture, Emotion::Neutral, 0, 4500),
                                                     vote(Modality::Posture, Emotion::Sad, 5000, 9500)};
    const std::vector<ModalityPrediction> face = {vote(Modality::Face, Emotion::Happy, 0, 4500),
                                                  vote(Modality::Face, Emotion::Sad, 5000, 9500)};
    // 4700 falls between windows and belongs to the first; 12000 is past the last window.
    const std::vector<ModalityPrediction> speech = {vote(Modality::Speech, Emotion::Happy, 100, 100),
                                                    vote(Modality::Speech, Emotion::Neutral, 4700, 4700),
                                                    vote(Modality::Speech, Emotion::Happy, 12000, 12000)};
    const auto fused = fuse_windows(posture, face, speech, cfg);
    REQUIRE(fused.size() == 2);
    CHECK(fused[0].top == Emotion::Happy);
    CHECK(fused[0].ranked[0].probability == Fraction(2, 3));
    CHECK(fused[0].votes.size() == 3);
    CHECK(fused[1].top == Emotion::Sad);
    CHECK(fused[1].votes.size() == 2);
    CHECK(fused[1].ranked[0].probability == Fraction(1));
}

TEST_CASE("several speech tokens in a window collapse to one vote") {
    const RuleConfig cfg;
    const std::vector<ModalityPrediction> face = {vote(Modality::Face, Emotion::Neutral, 0, 4500)};
    const std::vector<ModalityPrediction> speech = {vote(Modality::Speech, Emotion::Anger, 100, 100),
                                                    vote(Modality::Speech, Emotion::Happy, 200, 200),
                                                    vote(Modality::Speech, Emotion::Happy, 300, 300),
                                                    vote(Modality::Speech, Emotion::Neutral, 400, 400)};
    const auto fused = fuse_windows({}, face, speech, cfg);
    REQUIRE(fused.size() == 1);
    REQUIRE(fused[0].votes.size() == 2);
    CHECK(fused[0].votes[1].emotion == Emotion::Happy);
    CHECK(fused[0].top == Emotion::Neutral);  // face wins the 1-1 tie

    const std::vector<ModalityPrediction> misses = {vote(Modality::Speech, Emotion::Neutral, 100, 100)};
    const auto quiet = fuse_windows({}, face, misses, cfg);
    CHECK(quiet[0].votes[1].emotion == Emotion::Neutral);
}

TEST_CASE("speech outside any monitored window is ignored") {
    RuleConfig cfg;
    const std::vector<ModalityPrediction> face = {vote(Modality::Face, Emotion::Neutral, 0, 4500),
                                                  vote(Modality::Face, Emotion::Neutral, 500'000, 504'500)};
    const std::vector<ModalityPrediction> speech = {vote(Modality::Speech, Emotion::Happy, 100'000, 100'000)};
    const auto fused = fuse_windows({}, face, speech, cfg);
    REQUIRE(fused.size() == 2);
    CHECK(fused[0].votes.size() == 1);
    CHECK(fused[1].votes.size() == 1);
}

TEST_CASE("session summary") {
    std::vector<FusedPrediction> fused;
    for (int i = 0; i < 10; ++i) {
        FusedPrediction f;
        f.window_start = Timestamp{i * 5000};
        f.window_end = Timestamp{i * 5000 + 4500};
        f.top = i < 8 ? Emotion::Happy : Emotion::Neutral;
        fused.push_back(f);
    }
    const auto s = summarize_session(fused);
    CHECK(s.window_count == 10);
    CHECK(s.rate(Emotion::Happy) == Fraction(4, 5));
    CHECK(s.rate(Emotion::Neutral) == Fraction(1, 5));
    CHECK(s.rate(Emotion::Sad) == Fraction(0));
    CHECK(s.argmax() == std::vector<Emotion>{Emotion::Happy});
    CHECK(s.start.ms == 0);
    CHECK(s.end.ms == 49'500);

    const auto empty = summarize_session({});
    CHECK(empty.window_count == 0);
    for (auto e : kAllEmotions) CHECK(empty.rate(e) == Fraction(0));
    CHECK(empty.argmax().empty());

    fused[0].top = Emotion::Neutral;
    fused[1].top = Emotion::Neutral;
    fused[2].top = Emotion::Neutral;
    CHECK(summarize_session(fused).argmax() == std::vector<Emotion>{Emotion::Happy, Emotion::Neutral});
}

TEST_CASE("split_sessions cuts at sensor gaps") {
    const RuleConfig cfg;
    std::vector<FusedPrediction> fused;
    for (std::int64_t start : {0, 5000, 10000, 200000, 205000}) {
        FusedPrediction f;
        f.window_start = Timestamp{start};
        f.window_end = Timestamp{start + 4500};
        fused.push_back(f);
    }
    const auto parts = split_sessions(fused, cfg);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].size() == 3);
    CHECK(parts[1].size() == 2);
    CHECK(split_sessions({}, cfg).empty());
}

}
