#include "affect/fusion.hpp"

#include "affect/text.hpp"

#include <algorithm>
#include <map>

namespace affect {

std::string format_fraction(const Fraction& f) {
    if (f.denominator() == 1) return std::to_string(f.numerator());
    return std::to_string(f.numerator()) + "/" + std::to_string(f.denominator());
}

Fraction parse_fraction(std::string_view s) {
    const auto slash = s.find('/');
    const auto num = text::parse_int(s.substr(0, slash));
    if (!num) throw ParseError("", 0, "bad fraction '" + std::string(s) + "'");
    if (slash == std::string_view::npos) return Fraction(*num);
    const auto den = text::parse_int(s.substr(slash + 1));
    if (!den || *den == 0) throw ParseError("", 0, "bad fraction '" + std::string(s) + "'");
    return Fraction(*num, *den);
}

namespace {

std::size_t priority_rank(const TiePriority& order, Modality m) {
    return static_cast<std::size_t>(std::find(order.begin(), order.end(), m) - order.begin());
}

}  // namespace

FusedPrediction fuse(std::span<const ModalityPrediction> votes, const TiePriority& tie_order) {
    if (votes.empty()) throw EmptyVotes("fusion needs at least one modality vote");

    std::array<bool, kVotingModalityCount> seen{};
    for (const auto& v : votes) {
        auto& slot = seen[static_cast<std::size_t>(v.modality)];
        if (slot) throw DuplicateModality("two votes from " + std::string(to_string(v.modality)));
        slot = true;
        if (v.window_start != votes.front().window_start || v.window_end != votes.front().window_end) {
            throw ValidationError("fused votes must share one window");
        }
    }

    struct Tally {
        std::int64_t votes = 0;
        std::size_t best_rank = kVotingModalityCount;
    };
    std::array<Tally, kEmotionCount> tally{};
    for (const auto& v : votes) {
        auto& t = tally[index_of(v.emotion)];
        ++t.votes;
        t.best_rank = std::min(t.best_rank, priority_rank(tie_order, v.modality));
    }

    std::vector<Emotion> order;
    for (Emotion e : kAllEmotions) {
        if (tally[index_of(e)].votes > 0) order.push_back(e);
    }
    std::sort(order.begin(), order.end(), [&](Emotion a, Emotion b) {
        const auto& ta = tally[index_of(a)];
        const auto& tb = tally[index_of(b)];
        if (ta.votes != tb.votes) return ta.votes > tb.votes;
        return ta.best_rank < tb.best_rank;
    });

    FusedPrediction out;
    out.window_start = votes.front().window_start;
    out.window_end = votes.front().window_end;
    const auto n = static_cast<std::int64_t>(votes.size());
    for (Emotion e : order) out.ranked.push_back({e, Fraction(tally[index_of(e)].votes, n)});
    out.top = out.ranked.front().emotion;
    out.votes.assign(votes.begin(), votes.end());
    std::sort(out.votes.begin(), out.votes.end(), [&](const auto& a, const auto& b) {
        return priority_rank(tie_order, a.modality) < priority_rank(tie_order, b.modality);
    });
    return out;
}

namespace {

// One speech vote out of every token that landed in a window.
ModalityPrediction collapse_speech(const std::vector<const ModalityPrediction*>& tokens,
                                   Timestamp start, Timestamp end) {
    ModalityPrediction vote;
    vote.modality = Modality::Speech;
    vote.window_start = start;
    vote.window_end = end;

    std::array<int, kEmotionCount> hits{};
    for (const auto* t : tokens) {
        if (t->emotion != Emotion::Neutral) ++hits[index_of(t->emotion)];
    }
    const int best = *std::max_element(hits.begin(), hits.end());
    if (best == 0) return vote;
    for (const auto* t : tokens) {  // earliest token among the most frequent
        if (t->emotion != Emotion::Neutral && hits[index_of(t->emotion)] == best) {
            vote.emotion = t->emotion;
            vote.fired_rule = Rule::DictionaryHit;
            break;
        }
    }
    return vote;
}

}  // namespace

std::vector<FusedPrediction> fuse_windows(std::span<const ModalityPrediction> posture,
                                          std::span<const ModalityPrediction> face,
                                          std::span<const ModalityPrediction> speech,
                                          const RuleConfig& cfg) {
    struct Slot {
        std::optional<ModalityPrediction> posture;
        std::optional<ModalityPrediction> face;
        std::vector<const ModalityPrediction*> speech;
    };
    std::map<std::pair<std::int64_t, std::int64_t>, Slot> slots;
    for (const auto& p : posture) slots[{p.window_start.ms, p.window_end.ms}].posture = p;
    for (const auto& f : face) slots[{f.window_start.ms, f.window_end.ms}].face = f;

    std::vector<std::pair<std::pair<std::int64_t, std::int64_t>, Slot*>> windows;
    windows.reserve(slots.size());
    for (auto& [key, slot] : slots) windows.emplace_back(key, &slot);

    const auto gap_ms = static_cast<std::int64_t>(cfg.sensor_gap_seconds * 1000.0);
    auto coverage_end = [&](std::size_t k) {  // exclusive
        const auto end = windows[k].first.second;
        if (k + 1 < windows.size() && windows[k + 1].first.first - end <= gap_ms) {
            return std::max(end + 1, windows[k + 1].first.first);
        }
        return end + 1;
    };

    for (const auto& token : speech) {
        const auto ts = token.window_start.ms;
        auto it = std::upper_bound(windows.begin(), windows.end(), ts,
                                   [](std::int64_t t, const auto& w) { return t < w.first.first; });
        if (it == windows.begin()) continue;
        const auto k = static_cast<std::size_t>(it - windows.begin()) - 1;
        if (ts < coverage_end(k)) windows[k].second->speech.push_back(&token);
    }

    std::vector<FusedPrediction> out;
    out.reserve(windows.size());
    std::vector<ModalityPrediction> votes;
    for (const auto& [key, slot] : windows) {
        votes.clear();
        if (slot->posture) votes.push_back(*slot->posture);
        if (slot->face) votes.push_back(*slot->face);
        if (!slot->speech.empty()) {
            votes.push_back(collapse_speech(slot->speech, Timestamp{key.first}, Timestamp{key.second}));
        }
        out.push_back(fuse(votes, cfg.tie_order));
    }
    return out;
}

Fraction SessionSummary::rate(Emotion e) const {
    if (window_count == 0) return Fraction(0);
    return Fraction(static_cast<std::int64_t>(top_counts[index_of(e)]),
                    static_cast<std::int64_t>(window_count));
}

std::vector<Emotion> SessionSummary::argmax() const {
    std::vector<Emotion> out;
    if (window_count == 0) return out;
    const auto best = *std::max_element(top_counts.begin(), top_counts.end());
    for (Emotion e : kAllEmotions) {
        if (top_counts[index_of(e)] == best) out.push_back(e);
    }
    return out;
}

SessionSummary summarize_session(std::span<const FusedPrediction> fused) {
    SessionSummary s;
    s.window_count = fused.size();
    if (fused.empty()) return s;
    s.start = fused.front().window_start;
    s.end = fused.front().window_end;
    for (const auto& w : fused) {
        ++s.top_counts[index_of(w.top)];
        s.start = std::min(s.start, w.window_start);
        s.end = std::max(s.end, w.window_end);
    }
    return s;
}

std::vector<std::span<const FusedPrediction>> split_sessions(std::span<const FusedPrediction> fused,
                                                             const RuleConfig& cfg) {
    const auto gap_ms = static_cast<std::int64_t>(cfg.sensor_gap_seconds * 1000.0);
    std::vector<std::span<const FusedPrediction>> out;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= fused.size(); ++i) {
        if (i == fused.size() || fused[i].window_start - fused[i - 1].window_end > gap_ms) {
            out.push_back(fused.subspan(begin, i - begin));
            begin = i;
        }
    }
    return out;
}

}  // namespace affect
