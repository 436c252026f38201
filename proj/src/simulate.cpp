#include "affect/simulate.hpp"

#include "affect/rng.hpp"
#include "affect/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

namespace affect {

namespace {

struct Interval {
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::int64_t length() const { return end - start; }
};

// Independent generator per stream so changes to one stream leave the others
// byte-identical.
Rng stream_rng(std::uint64_t seed, std::uint64_t stream) {
    Rng mix(seed ^ (0xA0761D6478BD642FULL * (stream + 1)));
    return Rng(mix.next());
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
    return items[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(items.size()) - 1))];
}

// Returns the index of the category drawn from `weights` (need not sum to 1).
std::size_t draw(Rng& rng, std::initializer_list<double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double u = rng.uniform() * total;
    std::size_t i = 0;
    for (double w : weights) {
        if (u < w) return i;
        u -= w;
        ++i;
    }
    return weights.size() - 1;
}

// ---------------------------------------------------------------------------
// Day layout
// ---------------------------------------------------------------------------

struct DayLayout {
    std::int64_t day_ms = 0;
    std::vector<Interval> sensor;  // two monitored sessions in front of the sensor
    std::vector<Interval> breaks;  // locked periods
};

std::vector<Interval> sensor_sessions(std::int64_t day_ms) {
    const std::int64_t length = std::min<std::int64_t>(45 * 60 * 1000, day_ms / 4);
    const std::int64_t first = day_ms / 8;
    const std::int64_t second = day_ms * 5 / 8;
    return {{first, first + length}, {second, second + length}};
}

std::vector<Interval> place_breaks(Rng& rng, Persona persona, const RuleConfig& cfg,
                                   std::int64_t day_ms, const std::vector<Interval>& sensor) {
    const int thr = cfg.break_threshold;
    const std::int64_t count = persona == Persona::Engaged
                                   ? rng.uniform_int(thr / 2, thr - 1)
                                   : rng.uniform_int(thr, thr + thr / 2);
    if (count <= 0) return {};

    // Free time outside the sensor sessions, with a one-minute margin at each edge.
    constexpr std::int64_t kMargin = 60 * 1000;
    std::vector<Interval> free;
    std::int64_t cursor = 0;
    for (const auto& s : sensor) {
        free.push_back({cursor + kMargin, s.start - kMargin});
        cursor = s.end;
    }
    free.push_back({cursor + kMargin, day_ms - kMargin});
    std::erase_if(free, [](const Interval& i) { return i.length() <= 0; });
    const std::int64_t free_total =
        std::accumulate(free.begin(), free.end(), std::int64_t{0},
                        [](std::int64_t acc, const Interval& i) { return acc + i.length(); });

    // Largest-remainder split of the break count across free segments.
    std::vector<std::int64_t> per_segment(free.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::int64_t assigned = 0;
    for (std::size_t k = 0; k < free.size(); ++k) {
        const double share = static_cast<double>(count) * static_cast<double>(free[k].length()) /
                             static_cast<double>(free_total);
        per_segment[k] = static_cast<std::int64_t>(std::floor(share));
        assigned += per_segment[k];
        remainders.emplace_back(share - std::floor(share), k);
    }
    std::sort(remainders.begin(), remainders.end(),
              [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    for (std::size_t r = 0; assigned < count; ++r, ++assigned) ++per_segment[remainders[r % remainders.size()].second];

    const double min_minutes = persona == Persona::Engaged ? 5.0 : 8.0;
    const double max_minutes = persona == Persona::Engaged ? 15.0 : 20.0;

    std::vector<Interval> breaks;
    for (std::size_t k = 0; k < free.size(); ++k) {
        const auto n = per_segment[k];
        if (n == 0) continue;
        // Breaks may use at most half of the segment.
        const double cap_ms = static_cast<double>(free[k].length()) / (2.0 * static_cast<double>(n));
        std::vector<std::int64_t> durations;
        std::int64_t busy = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            double d = rng.uniform(min_minutes, max_minutes) * 60'000.0;
            d = std::max(1000.0, std::min(d, cap_ms));
            durations.push_back(static_cast<std::int64_t>(d));
            busy += durations.back();
        }
        const std::int64_t slack = free[k].length() - busy;
        std::vector<std::int64_t> cuts;
        for (std::int64_t i = 0; i < n; ++i) cuts.push_back(rng.uniform_int(0, slack));
        std::sort(cuts.begin(), cuts.end());
        std::int64_t consumed = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            const std::int64_t start = free[k].start + cuts[i] + consumed;
            breaks.push_back({start, start + durations[i]});
            consumed += durations[i];
        }
    }
    return breaks;
}

// Complement of the breaks within the day.
std::vector<Interval> unlocked_spans(const DayLayout& day) {
    std::vector<Interval> out;
    std::int64_t cursor = 0;
    for (const auto& b : day.breaks) {
        if (b.start > cursor) out.push_back({cursor, b.start});
        cursor = b.end;
    }
    if (day.day_ms > cursor) out.push_back({cursor, day.day_ms});
    return out;
}

// ---------------------------------------------------------------------------
// Keystrokes
// ---------------------------------------------------------------------------

const std::vector<std::string>& code_words() {
    static const std::vector<std::string> words = {
        "int",    "return", "auto",  "const", "value",  "index", "buffer", "update",
        "string", "vector", "config", "result", "parse", "error", "count", "node",
        "list",   "test",   "debug", "fix",   "struct", "while", "query",  "commit",
    };
    return words;
}

std::vector<KeystrokeEvent> simulate_keystrokes(Rng& rng, Persona persona, const RuleConfig& cfg,
                                                const DayLayout& day) {
    const int thr = cfg.keystroke_threshold;
    const std::int64_t total =
        persona == Persona::Engaged
            ? rng.uniform_int(static_cast<std::int64_t>(std::ceil(thr * 1.2)), 2LL * thr)
            : rng.uniform_int(static_cast<std::int64_t>(thr * 0.4),
                              static_cast<std::int64_t>(std::floor(thr * 0.85)));

    const bool engaged = persona == Persona::Engaged;
    const double mean_iki = engaged ? 180.0 : 320.0;
    const double sd_iki = engaged ? 40.0 : 80.0;
    const std::int64_t burst_lo = engaged ? 40 : 20;
    const std::int64_t burst_hi = engaged ? 400 : 150;

    // Key sequence with offsets inside each burst, in "unlocked time".
    struct Burst {
        std::vector<KeystrokeEvent> keys;  // ts relative to burst start
        std::int64_t duration = 0;
    };
    std::vector<Burst> bursts;
    std::int64_t emitted = 0;
    while (emitted < total) {
        Burst burst;
        const std::int64_t size = std::min(total - emitted, rng.uniform_int(burst_lo, burst_hi));
        std::int64_t offset = 0;
        auto push = [&](KeyClass kc, std::optional<std::string> word) {
            if (!burst.keys.empty()) {
                offset += static_cast<std::int64_t>(
                    std::clamp(rng.normal(mean_iki, sd_iki), mean_iki * 0.35, mean_iki * 2.5));
            }
            burst.keys.push_back({Timestamp{offset}, kc, std::move(word)});
        };
        while (static_cast<std::int64_t>(burst.keys.size()) < size) {
            const auto left = size - static_cast<std::int64_t>(burst.keys.size());
            if (rng.bernoulli(0.05)) {
                push(KeyClass::FunctionControl, std::nullopt);
                continue;
            }
            if (rng.bernoulli(0.03)) {
                push(KeyClass::Navigation, std::nullopt);
                continue;
            }
            const auto& word = pick(rng, code_words());
            const auto chars = std::min<std::int64_t>(static_cast<std::int64_t>(word.size()), left);
            for (std::int64_t c = 0; c < chars; ++c) push(KeyClass::Character, std::nullopt);
            if (chars == static_cast<std::int64_t>(word.size()) &&
                static_cast<std::int64_t>(burst.keys.size()) < size) {
                push(KeyClass::Navigation, word);
            }
        }
        burst.duration = offset;
        emitted += size;
        bursts.push_back(std::move(burst));
    }

    const auto spans = unlocked_spans(day);
    std::int64_t unlocked_total = 0;
    for (const auto& s : spans) unlocked_total += s.length();
    std::int64_t typing_total = 0;
    for (const auto& b : bursts) typing_total += b.duration;
    const std::int64_t slack = std::max<std::int64_t>(0, unlocked_total - typing_total - 1);

    std::vector<std::int64_t> cuts;
    for (std::size_t i = 0; i < bursts.size(); ++i) cuts.push_back(rng.uniform_int(0, slack));
    std::sort(cuts.begin(), cuts.end());

    // Maps unlocked time onto wall time, skipping the breaks.
    auto to_wall = [&spans](std::int64_t u) {
        for (const auto& s : spans) {
            if (u < s.length()) return s.start + u;
            u -= s.length();
        }
        return spans.empty() ? u : spans.back().end - 1;
    };

    std::vector<KeystrokeEvent> out;
    out.reserve(static_cast<std::size_t>(total));
    std::int64_t consumed = 0;
    for (std::size_t i = 0; i < bursts.size(); ++i) {
        const std::int64_t base = cuts[i] + consumed;
        for (auto& k : bursts[i].keys) {
            k.ts = Timestamp{to_wall(std::min(base + k.ts.ms, unlocked_total - 1))};
            out.push_back(std::move(k));
        }
        consumed += bursts[i].duration;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Posture
// ---------------------------------------------------------------------------

enum class PoseState { Rest, ActiveTyping, HandsBehindHead, HeadTilt };

JointMap pose_template(PoseState state, double tilt_sign) {
    JointMap j;
    j[Joint::Head] = {0.0, 0.65};
    j[Joint::ShoulderCenter] = {0.0, 0.45};
    j[Joint::ShoulderLeft] = {-0.18, 0.42};
    j[Joint::ShoulderRight] = {0.18, 0.42};
    j[Joint::Spine] = {0.0, 0.25};
    j[Joint::HipCenter] = {0.0, 0.0};
    j[Joint::HipLeft] = {-0.1, 0.0};
    j[Joint::HipRight] = {0.1, 0.0};
    switch (state) {
        case PoseState::Rest:  // forearms on armrests, hands wide of the body
            j[Joint::ElbowLeft] = {-0.30, 0.15};
            j[Joint::ElbowRight] = {0.30, 0.15};
            j[Joint::WristLeft] = {-0.36, 0.20};
            j[Joint::WristRight] = {0.36, 0.20};
            break;
        case PoseState::ActiveTyping:
            j[Joint::ElbowLeft] = {-0.20, 0.15};
            j[Joint::ElbowRight] = {0.20, 0.15};
            j[Joint::WristLeft] = {-0.10, 0.22};
            j[Joint::WristRight] = {0.10, 0.22};
            break;
        case PoseState::HandsBehindHead:
            j[Joint::ElbowLeft] = {-0.30, 0.55};
            j[Joint::ElbowRight] = {0.30, 0.55};
            j[Joint::WristLeft] = {-0.05, 0.70};
            j[Joint::WristRight] = {0.05, 0.70};
            break;
        case PoseState::HeadTilt:
            j[Joint::Head] = {0.12 * tilt_sign, 0.63};
            j[Joint::ElbowLeft] = {-0.25, 0.15};
            j[Joint::ElbowRight] = {0.25, 0.15};
            j[Joint::WristLeft] = {-0.28, 0.00};
            j[Joint::WristRight] = {0.28, 0.00};
            break;
    }
    return j;
}

// ---------------------------------------------------------------------------
// Face
// ---------------------------------------------------------------------------

enum class FaceState { Neutral, Smile, Annoyed };

// Points in face-width units around the face center.
FacePointMap face_template(FaceState state) {
    FacePointMap f;
    f[FacePoint::BrowLeft] = {-0.30, 0.45};
    f[FacePoint::BrowRight] = {0.30, 0.45};
    f[FacePoint::ForeheadLeft] = {-0.35, 0.75};
    f[FacePoint::ForeheadTop] = {0.0, 0.85};
    f[FacePoint::ForeheadRight] = {0.35, 0.75};
    f[FacePoint::EyelidUpperLeft] = {-0.25, 0.26};
    f[FacePoint::EyelidLowerLeft] = {-0.25, 0.18};
    f[FacePoint::EyelidUpperRight] = {0.25, 0.26};
    f[FacePoint::EyelidLowerRight] = {0.25, 0.18};
    f[FacePoint::CheekLeft] = {-0.5, -0.10};
    f[FacePoint::CheekRight] = {0.5, -0.10};
    f[FacePoint::ChinBottom] = {0.0, -0.75};
    f[FacePoint::UpperLipLeft] = {-0.15, -0.35};
    f[FacePoint::UpperLipTop] = {0.0, -0.30};
    f[FacePoint::UpperLipRight] = {0.15, -0.35};
    f[FacePoint::LowerLipLeft] = {-0.14, -0.38};
    f[FacePoint::LowerLipBottom] = {0.0, -0.45};
    f[FacePoint::LowerLipRight] = {0.14, -0.38};
    switch (state) {
        case FaceState::Neutral:
            break;
        case FaceState::Smile:
            f[FacePoint::UpperLipLeft] = {-0.28, -0.30};
            f[FacePoint::UpperLipRight] = {0.28, -0.30};
            f[FacePoint::LowerLipLeft] = {-0.27, -0.33};
            f[FacePoint::LowerLipRight] = {0.27, -0.33};
            break;
        case FaceState::Annoyed:  // squint with raised cheeks
            f[FacePoint::EyelidUpperLeft] = {-0.30, 0.19};
            f[FacePoint::EyelidLowerLeft] = {-0.30, 0.17};
            f[FacePoint::EyelidUpperRight] = {0.30, 0.19};
            f[FacePoint::EyelidLowerRight] = {0.30, 0.17};
            f[FacePoint::CheekLeft] = {-0.46, 0.06};
            f[FacePoint::CheekRight] = {0.46, 0.06};
            break;
    }
    return f;
}

struct SensorStreams {
    std::vector<SkeletonFrame> skeleton;
    std::vector<FaceFrame> face;
};

SensorStreams simulate_frames(Rng& rng, Persona persona, const RuleConfig& cfg,
                              const DayLayout& day) {
    const bool engaged = persona == Persona::Engaged;
    SensorStreams out;
    for (const auto& session : day.sensor) {
        // Where the user sits this session.
        const Point2 body{rng.uniform(-0.2, 0.2), rng.uniform(-0.05, 0.05)};
        const double width = rng.uniform(0.12, 0.16);
        const Point2 face_center{body.x + rng.uniform(-0.02, 0.02), 0.70 + rng.uniform(-0.03, 0.03)};

        const std::int64_t frames = session.length() / kSimFrameIntervalMs;
        PoseState pose = PoseState::Rest;
        FaceState expr = FaceState::Neutral;
        double tilt_sign = 1.0;
        for (std::int64_t i = 0; i < frames; ++i) {
            if (i % cfg.window_len == 0) {
                pose = static_cast<PoseState>(
                    engaged ? draw(rng, {0.28, 0.65, 0.04, 0.03}) : draw(rng, {0.50, 0.12, 0.13, 0.25}));
                expr = static_cast<FaceState>(engaged ? draw(rng, {0.32, 0.60, 0.08})
                                                      : draw(rng, {0.77, 0.08, 0.15}));
                tilt_sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
            }
            const Timestamp ts{session.start + i * kSimFrameIntervalMs};

            // Occasional off-template frames inside a window.
            const PoseState frame_pose = rng.bernoulli(0.1) ? PoseState::Rest : pose;
            const FaceState frame_expr = rng.bernoulli(0.1) ? FaceState::Neutral : expr;

            SkeletonFrame sk{ts, pose_template(frame_pose, tilt_sign)};
            for (auto& p : sk.joints) {
                p.x += body.x + rng.normal(0.0, 0.008);
                p.y += body.y + rng.normal(0.0, 0.008);
            }
            out.skeleton.push_back(sk);

            FaceFrame fc{ts, face_template(frame_expr)};
            for (auto& p : fc.points) {
                p.x = face_center.x + width * (p.x + rng.normal(0.0, 0.004));
                p.y = face_center.y + width * (p.y + rng.normal(0.0, 0.004));
            }
            out.face.push_back(fc);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Speech
// ---------------------------------------------------------------------------

const std::vector<std::string>& happy_utterances() {
    static const std::vector<std::string> words = {
        "great", "awesome", "yes",          "yeah",            "perfect", "nice",
        "cool",  "wow",     "tickled pink", "in high spirits", "good",    "amazing",
    };
    return words;
}

const std::vector<std::string>& surprise_utterances() {
    static const std::vector<std::string> words = {"whoa", "no way", "unbelievable", "oh my god"};
    return words;
}

const std::vector<std::string>& sad_utterances() {
    static const std::vector<std::string> words = {"tired", "bored", "sigh",  "meh",
                                                   "boring", "fed up", "not again"};
    return words;
}

const std::vector<std::string>& anger_utterances() {
    static const std::vector<std::string> words = {"annoying", "argh", "ugh", "ridiculous"};
    return words;
}

const std::vector<std::string>& filler_utterances() {
    static const std::vector<std::string> words = {"okay",  "hmm",     "let me see", "compile",
                                                   "lunch", "meeting", "where is it"};
    return words;
}

std::vector<SpeechToken> simulate_speech(Rng& rng, Persona persona, const DayLayout& day) {
    const bool engaged = persona == Persona::Engaged;
    std::vector<SpeechToken> out;
    for (const auto& session : day.sensor) {
        std::int64_t t = session.start;
        while (true) {
            t += engaged ? rng.uniform_int(10'000, 40'000) : rng.uniform_int(40'000, 150'000);
            if (t >= session.end) break;
            const std::vector<std::string>* source = nullptr;
            if (engaged) {
                const std::size_t k = draw(rng, {0.65, 0.15, 0.20});
                source = k == 0 ? &happy_utterances() : k == 1 ? &surprise_utterances() : &filler_utterances();
            } else {
                const std::size_t k = draw(rng, {0.35, 0.10, 0.05, 0.50});
                source = k == 0   ? &sad_utterances()
                         : k == 1 ? &anger_utterances()
                         : k == 2 ? &happy_utterances()
                                  : &filler_utterances();
            }
            out.push_back({Timestamp{t}, pick(rng, *source)});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gaze
// ---------------------------------------------------------------------------

std::vector<GazeSample> simulate_gaze(Rng& rng, Persona persona, const DayLayout& day) {
    const bool engaged = persona == Persona::Engaged;
    std::vector<GazeSample> out;
    for (const auto& session : day.sensor) {
        std::int64_t t = session.start;
        while (t < session.end) {
            std::int64_t span_ms = 0;
            bool away = rng.bernoulli(engaged ? 0.02 : 0.08);
            Point2 focus{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
            if (away) {
                span_ms = engaged ? rng.uniform_int(2'000, 10'000) : rng.uniform_int(5'000, 60'000);
            } else if (rng.bernoulli(0.08)) {
                span_ms = rng.uniform_int(5'500, 9'000);  // long read
            } else {
                span_ms = rng.uniform_int(300, 3'000);
            }
            const std::int64_t stop = std::min(session.end, t + span_ms);
            for (; t < stop; t += kSimGazeIntervalMs) {
                GazeSample s{Timestamp{t}, std::nullopt};
                if (!away) {
                    s.position = Point2{std::clamp(focus.x + rng.normal(0.0, 0.004), 0.0, 1.0),
                                        std::clamp(focus.y + rng.normal(0.0, 0.004), 0.0, 1.0)};
                }
                out.push_back(s);
            }
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(Persona p) { return p == Persona::Engaged ? "engaged" : "disengaged"; }

std::optional<Persona> parse_persona(std::string_view text) {
    const auto lower = text::to_lower(text::trim(text));
    if (lower == "engaged") return Persona::Engaged;
    if (lower == "disengaged") return Persona::Disengaged;
    return std::nullopt;
}

WorkdayTrace simulate_workday(Persona persona, std::uint64_t seed, const RuleConfig& cfg,
                              std::string user_id, std::string date) {
    cfg.validate();
    WorkdayTrace trace;
    trace.user_id = std::move(user_id);
    trace.date = std::move(date);

    DayLayout day;
    day.day_ms = cfg.workday_ms();
    day.sensor = sensor_sessions(day.day_ms);

    Rng layout_rng = stream_rng(seed, 0);
    day.breaks = place_breaks(layout_rng, persona, cfg, day.day_ms, day.sensor);
    for (const auto& b : day.breaks) {
        trace.sessions.push_back({Timestamp{b.start}, SessionKind::Locked});
        trace.sessions.push_back({Timestamp{b.end}, SessionKind::Unlocked});
    }

    Rng key_rng = stream_rng(seed, 1);
    trace.keystrokes = simulate_keystrokes(key_rng, persona, cfg, day);

    Rng frame_rng = stream_rng(seed, 2);
    auto sensors = simulate_frames(frame_rng, persona, cfg, day);
    trace.skeleton = std::move(sensors.skeleton);
    trace.face = std::move(sensors.face);

    Rng speech_rng = stream_rng(seed, 3);
    trace.speech = simulate_speech(speech_rng, persona, day);

    Rng gaze_rng = stream_rng(seed, 4);
    trace.gaze = simulate_gaze(gaze_rng, persona, day);
    return trace;
}

}  // namespace affect
