/**
 * rap.hpp: rule-based affect prediction.
 *
 * Per-frame geometric rules for posture and face, aggregation of frames into
 * fixed windows, dictionary lookup for recognised speech, and gaze telemetry
 * (dwells and absences). Gaze never yields an emotion.
 *
 * Posture rules (skeleton, y up):
 *   1  both wrists within r_head of the head, both elbows above their shoulders   -> Sad
 *   2  on each side elbow.y < wrist.y < shoulder.y, wrists within w_front of spine -> Happy
 *   3  both wrists below their elbows, head offset from shoulder center > tilt    -> Sad
 *   priority 1 > 3 > 2
 *
 * Face rules (thresholds scale with cheek-to-cheek width W):
 *   4  on either eye: lid gap < t_eye*W and cheek-to-lower-lid < d_cheek*W         -> Anger
 *   5  widest lip-corner span (upper or lower lip) > t_lip*W                       -> Happy
 *   priority 4 > 5
 */

#pragma once

#include "affect/config.hpp"
#include "affect/core.hpp"
#include "affect/trace.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace affect {

enum class Rule : std::uint8_t {
    HandsBehindHead = 1,
    ActiveTyping = 2,
    HeadTilt = 3,
    Squint = 4,
    Smile = 5,
    DictionaryHit = 6,
};

/// "1".."5" for geometric rules, "dictionary" for speech hits.
std::string to_string(Rule r);
std::optional<Rule> parse_rule(std::string_view text);

struct RuleOutcome {
    Emotion emotion = Emotion::Neutral;
    std::optional<Rule> rule;

    bool operator==(const RuleOutcome&) const = default;
};

struct FrameResult {
    Timestamp ts;
    RuleOutcome outcome;
};

struct ModalityPrediction {
    Modality modality = Modality::Posture;
    Timestamp window_start;  // first frame
    Timestamp window_end;    // last frame (inclusive)
    Emotion emotion = Emotion::Neutral;
    std::optional<Rule> fired_rule;  // empty iff emotion is Neutral

    bool operator==(const ModalityPrediction&) const = default;
};

class ShortWindow : public Error {
public:
    using Error::Error;
};

class DuplicateWord : public Error {
public:
    using Error::Error;
};

RuleOutcome posture_rule_frame(const SkeletonFrame& frame, const RuleConfig& cfg);

/// Throws DegenerateFrame when the face has zero width.
RuleOutcome face_rule_frame(const FaceFrame& frame, const RuleConfig& cfg);

/// Aggregates exactly cfg.window_len frame results. The most frequent emotion
/// wins when it reaches cfg.frame_majority and is not tied; otherwise Neutral.
/// Throws ShortWindow when fewer frames are supplied.
ModalityPrediction classify_window(std::span<const FrameResult> frames, Modality modality,
                                   const RuleConfig& cfg);

/// Splits a time-ordered stream into monitored sessions (gaps larger than
/// cfg.sensor_gap_seconds) and tiles each session with non-overlapping
/// windows. A trailing partial window in a session is dropped.
std::vector<ModalityPrediction> classify_frames(std::span<const FrameResult> frames,
                                                Modality modality, const RuleConfig& cfg);

std::vector<ModalityPrediction> classify_posture(std::span<const SkeletonFrame> frames,
                                                 const RuleConfig& cfg);
std::vector<ModalityPrediction> classify_face(std::span<const FaceFrame> frames,
                                              const RuleConfig& cfg);

// ---------------------------------------------------------------------------
// Speech
// ---------------------------------------------------------------------------

/// Emotion lexicon. Entries are lowercase words or space-separated phrases;
/// no entry belongs to two emotions; Neutral has no entries.
class EmotionDictionary {
public:
    /// Normalizes `phrase` (case, whitespace). Throws DuplicateWord if it is
    /// already listed under another emotion, ValidationError for Neutral or an
    /// empty phrase.
    void add(Emotion emotion, std::string_view phrase);

    std::optional<Emotion> lookup(std::string_view normalized_phrase) const;
    const std::set<std::string>& words(Emotion emotion) const;
    std::size_t size() const { return index_.size(); }
    /// Longest entry, in words.
    std::size_t max_phrase_words() const { return max_words_; }

private:
    std::map<std::string, Emotion, std::less<>> index_;
    std::array<std::set<std::string>, kEmotionCount> by_emotion_;
    std::size_t max_words_ = 0;
};

/// `<dictionary><emotion name="Happy"><word>great</word>...</emotion>...</dictionary>`
EmotionDictionary parse_dictionary(std::string_view xml, const std::string& origin = "<dictionary>");
EmotionDictionary load_dictionary(const std::filesystem::path& path);

/// Longest dictionary phrase found as a run of words inside the token
/// (leftmost on equal length), case-insensitive. Miss -> Neutral.
ModalityPrediction classify_speech(const SpeechToken& token, const EmotionDictionary& dict);

// ---------------------------------------------------------------------------
// Gaze telemetry
// ---------------------------------------------------------------------------

struct DwellEvent {
    Timestamp start;
    Timestamp end;
    Point2 centroid;
    std::size_t samples = 0;

    bool operator==(const DwellEvent&) const = default;
};

struct AbsenceInterval {
    Timestamp start;
    Timestamp end;

    double duration_seconds() const { return static_cast<double>(end - start) / 1000.0; }
    bool operator==(const AbsenceInterval&) const = default;
};

/// Greedy left-to-right segmentation of available samples into runs whose
/// every sample lies within dwell_radius of the running mean of the samples
/// before it. Runs lasting more than dwell_seconds are dwells.
std::vector<DwellEvent> detect_dwells(std::span<const GazeSample> samples, const RuleConfig& cfg);

/// Maximal runs of unavailable samples. A run ends at the timestamp of the
/// next available sample, or at its own last sample at the end of the stream.
std::vector<AbsenceInterval> detect_absences(std::span<const GazeSample> samples);

}  // namespace affect
