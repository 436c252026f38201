/**
 * core.hpp: shared vocabulary for every affect-monitoring module.
 *
 * Emotions, timestamps, 2D sensor geometry, the tracked skeleton joints and
 * face points, and the error types raised across the library.
 */

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace affect {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `file` and `line` are empty/zero when not applicable.
class ParseError : public Error {
public:
    ParseError(std::string file, std::size_t line, const std::string& reason);
    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// A timestamp went backwards inside one stream.
class OrderError : public Error {
public:
    OrderError(std::string file, std::size_t line, const std::string& reason);
    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

/// Face frame whose cheek-to-cheek width is zero.
class DegenerateFrame : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Emotion
// ---------------------------------------------------------------------------

enum class Emotion : std::uint8_t { Happy, Sad, Surprise, Anger, Fear, Disgust, Neutral };

inline constexpr std::size_t kEmotionCount = 7;

inline constexpr std::array<Emotion, kEmotionCount> kAllEmotions = {
    Emotion::Happy, Emotion::Sad,     Emotion::Surprise, Emotion::Anger,
    Emotion::Fear,  Emotion::Disgust, Emotion::Neutral,
};

std::string_view to_string(Emotion e);
std::optional<Emotion> parse_emotion(std::string_view text);

constexpr std::size_t index_of(Emotion e) { return static_cast<std::size_t>(e); }

/// Channels that cast emotion votes. Gaze is telemetry only and never votes.
enum class Modality : std::uint8_t { Posture, Face, Speech };

inline constexpr std::size_t kVotingModalityCount = 3;

std::string_view to_string(Modality m);
std::optional<Modality> parse_modality(std::string_view text);

// ---------------------------------------------------------------------------
// Time
// ---------------------------------------------------------------------------

/// Milliseconds since the start of the stream (the workday epoch).
struct Timestamp {
    std::int64_t ms = 0;

    constexpr auto operator<=>(const Timestamp&) const = default;
    constexpr double seconds() const { return static_cast<double>(ms) / 1000.0; }
};

constexpr std::int64_t operator-(Timestamp a, Timestamp b) { return a.ms - b.ms; }

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

/// Sensor-plane coordinates in meters; x grows to the right, y grows upward.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    constexpr bool operator==(const Point2&) const = default;
};

double distance(Point2 a, Point2 b);
bool is_finite(Point2 p);

enum class Joint : std::uint8_t {
    Head,
    ShoulderCenter,
    ShoulderLeft,
    ShoulderRight,
    Spine,
    HipCenter,
    HipLeft,
    HipRight,
    ElbowLeft,
    ElbowRight,
    WristLeft,
    WristRight,
};

inline constexpr std::size_t kJointCount = 12;

enum class FacePoint : std::uint8_t {
    BrowLeft,
    BrowRight,
    UpperLipLeft,
    UpperLipTop,
    UpperLipRight,
    LowerLipLeft,
    LowerLipBottom,
    LowerLipRight,
    EyelidUpperLeft,
    EyelidLowerLeft,
    EyelidUpperRight,
    EyelidLowerRight,
    CheekLeft,
    CheekRight,
    ChinBottom,
    ForeheadLeft,
    ForeheadTop,
    ForeheadRight,
};

inline constexpr std::size_t kFacePointCount = 18;

std::string_view to_string(Joint j);
std::string_view to_string(FacePoint p);
std::optional<Joint> parse_joint(std::string_view name);
std::optional<FacePoint> parse_face_point(std::string_view name);

/// Fixed-size map from an enumeration to a point; completeness is structural.
template <typename Key, std::size_t N>
class PointMap {
public:
    static constexpr std::size_t size() { return N; }

    Point2& operator[](Key k) { return points_[static_cast<std::size_t>(k)]; }
    const Point2& operator[](Key k) const { return points_[static_cast<std::size_t>(k)]; }

    auto begin() const { return points_.begin(); }
    auto end() const { return points_.end(); }
    auto begin() { return points_.begin(); }
    auto end() { return points_.end(); }

    bool operator==(const PointMap&) const = default;

private:
    std::array<Point2, N> points_{};
};

using JointMap = PointMap<Joint, kJointCount>;
using FacePointMap = PointMap<FacePoint, kFacePointCount>;

// ---------------------------------------------------------------------------
// Frames
// ---------------------------------------------------------------------------

struct SkeletonFrame {
    Timestamp ts;
    JointMap joints;

    bool operator==(const SkeletonFrame&) const = default;
};

struct FaceFrame {
    Timestamp ts;
    FacePointMap points;

    bool operator==(const FaceFrame&) const = default;
};

/// Cheek-to-cheek distance; the scale every face threshold is relative to.
/// Throws DegenerateFrame when the cheeks coincide.
double face_width(const FaceFrame& frame);

}  // namespace affect
