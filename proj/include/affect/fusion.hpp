#pragma once

#include "affect/config.hpp"
#include "affect/rap.hpp"

#include <boost/rational.hpp>

#include <array>
#include <span>
#include <string>
#include <vector>

namespace affect {

using Fraction = boost::rational<std::int64_t>;

/// "2/3", "1", "0"; never a decimal.
std::string format_fraction(const Fraction& f);
Fraction parse_fraction(std::string_view text);

struct RankedEmotion {
    Emotion emotion = Emotion::Neutral;
    Fraction probability;  // votes / voting modalities

    bool operator==(const RankedEmotion&) const = default;
};

struct FusedPrediction {
    Timestamp window_start;
    Timestamp window_end;
    std::vector<RankedEmotion> ranked;  // descending probability
    Emotion top = Emotion::Neutral;
    std::vector<ModalityPrediction> votes;

    bool operator==(const FusedPrediction&) const = default;
};

class EmptyVotes : public Error {
public:
    using Error::Error;
};

class DuplicateModality : public Error {
public:
    using Error::Error;
};

/// Plurality vote over one window. Ties in vote count (for `top` and for the
/// order of `ranked`) go to the emotion backed by the highest-priority
/// modality in `tie_order`. Votes must share one window.
FusedPrediction fuse(std::span<const ModalityPrediction> votes,
                     const TiePriority& tie_order = kDefaultTiePriority);

/// Combines per-window posture and face predictions with speech predictions.
/// Posture and face windows with identical bounds vote together. A speech
/// token votes in the window whose span (extended to the next window's start
/// within a monitored session) contains it; several tokens in one window
/// collapse to their most frequent dictionary hit, or Neutral if none hit.
std::vector<FusedPrediction> fuse_windows(std::span<const ModalityPrediction> posture,
                                          std::span<const ModalityPrediction> face,
                                          std::span<const ModalityPrediction> speech,
                                          const RuleConfig& cfg);

struct SessionSummary {
    Timestamp start;
    Timestamp end;
    std::size_t window_count = 0;
    std::array<std::size_t, kEmotionCount> top_counts{};

    /// Fraction of windows whose top emotion is `e`; 0 when empty.
    Fraction rate(Emotion e) const;
    /// Emotions sharing the highest rate; empty when window_count is 0.
    std::vector<Emotion> argmax() const;

    bool operator==(const SessionSummary&) const = default;
};

SessionSummary summarize_session(std::span<const FusedPrediction> fused);

/// Splits fused windows into monitored sessions wherever consecutive windows
/// are more than cfg.sensor_gap_seconds apart.
std::vector<std::span<const FusedPrediction>> split_sessions(std::span<const FusedPrediction> fused,
                                                             const RuleConfig& cfg);

}  // namespace affect
