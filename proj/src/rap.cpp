#include "affect/rap.hpp"

#include <algorithm>
#include <cmath>

namespace affect {

std::string to_string(Rule r) {
    if (r == Rule::DictionaryHit) return "dictionary";
    return std::to_string(static_cast<int>(r));
}

std::optional<Rule> parse_rule(std::string_view text) {
    if (text == "dictionary") return Rule::DictionaryHit;
    if (text.size() == 1 && text[0] >= '1' && text[0] <= '5') {
        return static_cast<Rule>(text[0] - '0');
    }
    return std::nullopt;
}

namespace {

bool hands_behind_head(const JointMap& j, const RuleConfig& cfg) {
    const Point2 head = j[Joint::Head];
    return distance(j[Joint::WristLeft], head) <= cfg.r_head &&
           distance(j[Joint::WristRight], head) <= cfg.r_head &&
           j[Joint::ElbowLeft].y > j[Joint::ShoulderLeft].y &&
           j[Joint::ElbowRight].y > j[Joint::ShoulderRight].y;
}

bool head_tilted_arms_down(const JointMap& j, const RuleConfig& cfg) {
    return j[Joint::WristLeft].y < j[Joint::ElbowLeft].y &&
           j[Joint::WristRight].y < j[Joint::ElbowRight].y &&
           std::abs(j[Joint::Head].x - j[Joint::ShoulderCenter].x) > cfg.tilt_thresh;
}

bool typing_side(const JointMap& j, Joint elbow, Joint wrist, Joint shoulder, const RuleConfig& cfg) {
    const double wy = j[wrist].y;
    return j[elbow].y < wy && wy < j[shoulder].y &&
           std::abs(j[wrist].x - j[Joint::Spine].x) <= cfg.w_front;
}

bool squinting_eye(const FacePointMap& f, FacePoint upper, FacePoint lower, FacePoint cheek,
                   double width, const RuleConfig& cfg) {
    return std::abs(f[upper].y - f[lower].y) < cfg.t_eye * width &&
           distance(f[cheek], f[lower]) < cfg.d_cheek * width;
}

}  // namespace

RuleOutcome posture_rule_frame(const SkeletonFrame& frame, const RuleConfig& cfg) {
    const auto& j = frame.joints;
    if (hands_behind_head(j, cfg)) return {Emotion::Sad, Rule::HandsBehindHead};
    if (head_tilted_arms_down(j, cfg)) return {Emotion::Sad, Rule::HeadTilt};
    if (typing_side(j, Joint::ElbowLeft, Joint::WristLeft, Joint::ShoulderLeft, cfg) &&
        typing_side(j, Joint::ElbowRight, Joint::WristRight, Joint::ShoulderRight, cfg)) {
        return {Emotion::Happy, Rule::ActiveTyping};
    }
    return {};
}

RuleOutcome face_rule_frame(const FaceFrame& frame, const RuleConfig& cfg) {
    const double w = face_width(frame);
    const auto& f = frame.points;
    if (squinting_eye(f, FacePoint::EyelidUpperLeft, FacePoint::EyelidLowerLeft, FacePoint::CheekLeft, w, cfg) ||
        squinting_eye(f, FacePoint::EyelidUpperRight, FacePoint::EyelidLowerRight, FacePoint::CheekRight, w, cfg)) {
        return {Emotion::Anger, Rule::Squint};
    }
    const double span = std::max(std::abs(f[FacePoint::UpperLipLeft].x - f[FacePoint::UpperLipRight].x),
                                 std::abs(f[FacePoint::LowerLipLeft].x - f[FacePoint::LowerLipRight].x));
    if (span > cfg.t_lip * w) return {Emotion::Happy, Rule::Smile};
    return {};
}

ModalityPrediction classify_window(std::span<const FrameResult> frames, Modality modality,
                                   const RuleConfig& cfg) {
    const auto len = static_cast<std::size_t>(cfg.window_len);
    if (frames.size() < len) {
        throw ShortWindow("window needs " + std::to_string(len) + " frames, got " +
                          std::to_string(frames.size()));
    }
    if (frames.size() > len) {
        throw ValidationError("window has " + std::to_string(frames.size()) + " frames, expected " +
                              std::to_string(len));
    }

    std::array<int, kEmotionCount> counts{};
    for (const auto& f : frames) ++counts[index_of(f.outcome.emotion)];
    const auto best = std::max_element(counts.begin(), counts.end());
    const auto tied = std::count(counts.begin(), counts.end(), *best);

    ModalityPrediction p;
    p.modality = modality;
    p.window_start = frames.front().ts;
    p.window_end = frames.back().ts;
    if (*best < cfg.frame_majority || tied > 1) return p;

    p.emotion = static_cast<Emotion>(best - counts.begin());
    if (p.emotion == Emotion::Neutral) return p;

    // Report the rule behind most of the winning frames; lower id on ties.
    std::array<int, 7> rule_counts{};
    for (const auto& f : frames) {
        if (f.outcome.emotion == p.emotion && f.outcome.rule) {
            ++rule_counts[static_cast<std::size_t>(*f.outcome.rule)];
        }
    }
    const auto top_rule = std::max_element(rule_counts.begin(), rule_counts.end());
    p.fired_rule = static_cast<Rule>(top_rule - rule_counts.begin());
    return p;
}

std::vector<ModalityPrediction> classify_frames(std::span<const FrameResult> frames,
                                                Modality modality, const RuleConfig& cfg) {
    const auto gap_ms = static_cast<std::int64_t>(cfg.sensor_gap_seconds * 1000.0);
    const auto len = static_cast<std::size_t>(cfg.window_len);
    std::vector<ModalityPrediction> out;
    std::size_t session_start = 0;
    for (std::size_t i = 1; i <= frames.size(); ++i) {
        const bool boundary = i == frames.size() || frames[i].ts - frames[i - 1].ts > gap_ms;
        if (!boundary) continue;
        for (std::size_t w = session_start; w + len <= i; w += len) {
            out.push_back(classify_window(frames.subspan(w, len), modality, cfg));
        }
        session_start = i;
    }
    return out;
}

std::vector<ModalityPrediction> classify_posture(std::span<const SkeletonFrame> frames,
                                                 const RuleConfig& cfg) {
    std::vector<FrameResult> results;
    results.reserve(frames.size());
    for (const auto& f : frames) results.push_back({f.ts, posture_rule_frame(f, cfg)});
    return classify_frames(results, Modality::Posture, cfg);
}

std::vector<ModalityPrediction> classify_face(std::span<const FaceFrame> frames,
                                              const RuleConfig& cfg) {
    std::vector<FrameResult> results;
    results.reserve(frames.size());
    for (const auto& f : frames) results.push_back({f.ts, face_rule_frame(f, cfg)});
    return classify_frames(results, Modality::Face, cfg);
}

}  // namespace affect
