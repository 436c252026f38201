#include "affect/core.hpp"

#include <cmath>
#include <utility>

namespace affect {

namespace {

constexpr std::array<std::string_view, kEmotionCount> kEmotionNames = {
    "Happy", "Sad", "Surprise", "Anger", "Fear", "Disgust", "Neutral",
};

constexpr std::array<std::string_view, kVotingModalityCount> kModalityNames = {
    "Posture", "Face", "Speech",
};

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "Head",    "ShoulderCenter", "ShoulderLeft", "ShoulderRight", "Spine",     "HipCenter",
    "HipLeft", "HipRight",       "ElbowLeft",    "ElbowRight",    "WristLeft", "WristRight",
};

constexpr std::array<std::string_view, kFacePointCount> kFacePointNames = {
    "BrowLeft",         "BrowRight",       "UpperLipLeft",     "UpperLipTop",
    "UpperLipRight",    "LowerLipLeft",    "LowerLipBottom",   "LowerLipRight",
    "EyelidUpperLeft",  "EyelidLowerLeft", "EyelidUpperRight", "EyelidLowerRight",
    "CheekLeft",        "CheekRight",      "ChinBottom",       "ForeheadLeft",
    "ForeheadTop",      "ForeheadRight",
};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view text) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == text) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

std::string locate(const std::string& file, std::size_t line) {
    if (file.empty()) return {};
    if (line == 0) return file + ": ";
    return file + ":" + std::to_string(line) + ": ";
}

}  // namespace

ParseError::ParseError(std::string file, std::size_t line, const std::string& reason)
    : Error(locate(file, line) + reason), file_(std::move(file)), line_(line) {}

OrderError::OrderError(std::string file, std::size_t line, const std::string& reason)
    : Error(locate(file, line) + reason), file_(std::move(file)), line_(line) {}

std::string_view to_string(Emotion e) { return kEmotionNames[index_of(e)]; }

std::optional<Emotion> parse_emotion(std::string_view text) {
    return lookup<Emotion>(kEmotionNames, text);
}

std::string_view to_string(Modality m) { return kModalityNames[static_cast<std::size_t>(m)]; }

std::optional<Modality> parse_modality(std::string_view text) {
    return lookup<Modality>(kModalityNames, text);
}

std::string_view to_string(Joint j) { return kJointNames[static_cast<std::size_t>(j)]; }

std::string_view to_string(FacePoint p) { return kFacePointNames[static_cast<std::size_t>(p)]; }

std::optional<Joint> parse_joint(std::string_view name) { return lookup<Joint>(kJointNames, name); }

std::optional<FacePoint> parse_face_point(std::string_view name) {
    return lookup<FacePoint>(kFacePointNames, name);
}

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

double face_width(const FaceFrame& frame) {
    const double w = distance(frame.points[FacePoint::CheekLeft], frame.points[FacePoint::CheekRight]);
    if (!(w > 0.0)) {
        throw DegenerateFrame("face frame at ts " + std::to_string(frame.ts.ms) +
                              " has zero cheek-to-cheek width");
    }
    return w;
}

}  // namespace affect
