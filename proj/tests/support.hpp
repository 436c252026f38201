// Shared fixtures for the unit and acceptance tests.

#pragma once

#include "affect/core.hpp"
#include "affect/fap.hpp"
#include "affect/rap.hpp"
#include "affect/trace.hpp"

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

namespace testsupport {

using namespace affect;

inline std::filesystem::path data_dir() { return AFFECT_DATA_DIR; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("affect-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Seated pose that fires no posture rule: arms resting wide, head centered.
inline SkeletonFrame rest_skeleton(std::int64_t ts = 0) {
    SkeletonFrame f;
    f.ts = Timestamp{ts};
    auto& j = f.joints;
    j[Joint::Head] = {0.0, 0.65};
    j[Joint::ShoulderCenter] = {0.0, 0.42};
    j[Joint::ShoulderLeft] = {-0.18, 0.42};
    j[Joint::ShoulderRight] = {0.18, 0.42};
    j[Joint::Spine] = {0.0, 0.2};
    j[Joint::HipCenter] = {0.0, 0.0};
    j[Joint::HipLeft] = {-0.1, 0.0};
    j[Joint::HipRight] = {0.1, 0.0};
    j[Joint::ElbowLeft] = {-0.3, 0.15};
    j[Joint::ElbowRight] = {0.3, 0.15};
    j[Joint::WristLeft] = {-0.36, 0.2};
    j[Joint::WristRight] = {0.36, 0.2};
    return f;
}

inline SkeletonFrame hands_behind_head_skeleton(std::int64_t ts = 0) {
    auto f = rest_skeleton(ts);
    auto& j = f.joints;
    j[Joint::ElbowLeft] = {-0.3, 0.55};
    j[Joint::ElbowRight] = {0.3, 0.55};
    j[Joint::WristLeft] = {-0.05, 0.70};
    j[Joint::WristRight] = {0.05, 0.70};
    return f;
}

inline SkeletonFrame typing_skeleton(std::int64_t ts = 0) {
    auto f = rest_skeleton(ts);
    auto& j = f.joints;
    j[Joint::ElbowLeft] = {-0.2, 0.15};
    j[Joint::ElbowRight] = {0.2, 0.15};
    j[Joint::WristLeft] = {-0.1, 0.22};
    j[Joint::WristRight] = {0.1, 0.22};
    return f;
}

inline SkeletonFrame head_tilt_skeleton(std::int64_t ts = 0) {
    auto f = rest_skeleton(ts);
    auto& j = f.joints;
    j[Joint::Head] = {0.12, 0.65};
    j[Joint::ElbowLeft] = {-0.25, 0.15};
    j[Joint::ElbowRight] = {0.25, 0.15};
    j[Joint::WristLeft] = {-0.28, 0.0};
    j[Joint::WristRight] = {0.28, 0.0};
    return f;
}

/// Neutral face of cheek-to-cheek width `w` centered at (cx, cy).
inline FaceFrame neutral_face(std::int64_t ts = 0, double w = 0.14, double cx = 0.0, double cy = 0.0) {
    FaceFrame f;
    f.ts = Timestamp{ts};
    auto& p = f.points;
    auto at = [&](double x, double y) { return Point2{cx + x * w, cy + y * w}; };
    p[FacePoint::BrowLeft] = at(-0.3, 0.3);
    p[FacePoint::BrowRight] = at(0.3, 0.3);
    p[FacePoint::UpperLipLeft] = at(-0.15, -0.30);
    p[FacePoint::UpperLipTop] = at(0.0, -0.27);
    p[FacePoint::UpperLipRight] = at(0.15, -0.30);
    p[FacePoint::LowerLipLeft] = at(-0.15, -0.32);
    p[FacePoint::LowerLipBottom] = at(0.0, -0.36);
    p[FacePoint::LowerLipRight] = at(0.15, -0.32);
    p[FacePoint::EyelidUpperLeft] = at(-0.3, 0.18);
    p[FacePoint::EyelidLowerLeft] = at(-0.3, 0.10);
    p[FacePoint::EyelidUpperRight] = at(0.3, 0.18);
    p[FacePoint::EyelidLowerRight] = at(0.3, 0.10);
    p[FacePoint::CheekLeft] = at(-0.5, -0.1);
    p[FacePoint::CheekRight] = at(0.5, -0.1);
    p[FacePoint::ChinBottom] = at(0.0, -0.6);
    p[FacePoint::ForeheadLeft] = at(-0.3, 0.6);
    p[FacePoint::ForeheadTop] = at(0.0, 0.7);
    p[FacePoint::ForeheadRight] = at(0.3, 0.6);
    return f;
}

inline FaceFrame smile_face(std::int64_t ts = 0, double w = 0.14) {
    auto f = neutral_face(ts, w);
    auto& p = f.points;
    p[FacePoint::UpperLipLeft].x = -0.28 * w;
    p[FacePoint::UpperLipRight].x = 0.28 * w;
    return f;
}

inline FaceFrame squint_face(std::int64_t ts = 0, double w = 0.14) {
    auto f = neutral_face(ts, w);
    auto& p = f.points;
    p[FacePoint::EyelidUpperLeft] = {-0.4 * w, 0.02 * w};
    p[FacePoint::EyelidLowerLeft] = {-0.4 * w, 0.0};
    return f;
}

inline StateResponse sample_state(const std::string& user, std::int64_t ts,
                                  std::set<Emotion> emotions = {Emotion::Happy}) {
    StateResponse r;
    r.user_id = user;
    r.ts = Timestamp{ts};
    r.age_group = "25-34";
    r.years_at_job = "1-3";
    r.mental_health_rating = "Good";
    r.unhappiness_reasons = {"Deadlines", "Commute"};
    r.satisfaction_reasons = {"Interesting work"};
    r.emotions_experienced = std::move(emotions);
    r.physical_feeling = "Fine";
    return r;
}

inline EvalResponse sample_eval(const std::string& user, std::int64_t ts, Effectiveness q3, Effectiveness q4,
                                Effectiveness q5) {
    EvalResponse r;
    r.user_id = user;
    r.ts = Timestamp{ts};
    r.age_group = "35-44";
    r.years_at_job = "5-10";
    r.ratings = {q3, q4, q5};
    return r;
}

}  // namespace testsupport
