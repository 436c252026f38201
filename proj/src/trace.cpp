#include "affect/trace.hpp"

#include "affect/csv.hpp"
#include "affect/text.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

namespace affect {

namespace {

constexpr std::array<std::string_view, 3> kKeyClassNames = {"character", "navigation",
                                                            "function_control"};

constexpr std::array<std::string_view, 6> kStreamNames = {"keystroke", "session",  "speech",
                                                          "gaze",      "skeleton", "face"};

constexpr std::array<std::string_view, 6> kStreamFiles = {
    "keystrokes.csv", "session.csv", "speech.csv", "gaze.csv", "skeleton.jsonl", "face.jsonl"};

constexpr std::array<std::string_view, 6> kStreamHeaders = {
    "ts_ms,key_class,word_completed\n", "ts_ms,kind\n", "ts_ms,text\n", "ts_ms,available,x,y\n",
    "", ""};

std::size_t idx(StreamKind k) { return static_cast<std::size_t>(k); }

Timestamp parse_ts(std::string_view field, const std::string& origin, std::size_t line) {
    auto v = text::parse_int(field);
    if (!v) throw ParseError(origin, line, "bad timestamp '" + std::string(field) + "'");
    if (*v < 0) throw ValidationError(origin + ":" + std::to_string(line) + ": negative timestamp");
    return Timestamp{*v};
}

template <typename T>
void check_order(const std::vector<T>& items, const std::vector<std::size_t>& lines,
                 const std::string& origin) {
    for (std::size_t i = 1; i < items.size(); ++i) {
        if (items[i].ts < items[i - 1].ts) {
            throw OrderError(origin, lines[i],
                             "timestamp " + std::to_string(items[i].ts.ms) + " precedes " +
                                 std::to_string(items[i - 1].ts.ms));
        }
    }
}

// Returns data records, skipping the header row when present.
std::vector<csv::Record> csv_body(std::string_view content, const std::string& origin,
                                  StreamKind kind) {
    if (content.empty()) return {};
    auto records = csv::parse(content, origin);
    if (records.empty()) return {};
    const auto expected = text::split(text::trim(kStreamHeaders[idx(kind)]), ',');
    if (records.front().fields == expected) records.erase(records.begin());
    for (const auto& r : records) {
        if (r.fields.size() != expected.size()) {
            throw ParseError(origin, r.line,
                             "expected " + std::to_string(expected.size()) + " fields, got " +
                                 std::to_string(r.fields.size()));
        }
    }
    return records;
}

template <typename Key, std::size_t N>
std::string format_points(Timestamp ts, const PointMap<Key, N>& points) {
    std::string out = "{\"ts\":" + std::to_string(ts.ms) + ",\"points\":{";
    for (std::size_t i = 0; i < N; ++i) {
        const auto key = static_cast<Key>(i);
        if (i) out += ',';
        out += '"';
        out += to_string(key);
        out += "\":[";
        out += text::format_double(points[key].x);
        out += ',';
        out += text::format_double(points[key].y);
        out += ']';
    }
    out += "}}\n";
    return out;
}

template <typename Frame, typename Key, std::size_t N, typename ParseKey>
std::vector<typename Frame::Value> parse_point_frames(std::string_view content, const std::string& origin,
                                      std::string_view point_kind, ParseKey parse_key) {
    std::vector<Frame> frames;
    std::vector<std::size_t> lines;
    std::size_t line_no = 0;
    for (const auto& raw : text::split(content, '\n')) {
        ++line_no;
        const auto line = text::trim(raw);
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(origin, line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!j.is_object() || !j.contains("ts") || !j["ts"].is_number_integer() ||
            !j.contains("points") || !j["points"].is_object()) {
            throw ParseError(origin, line_no, "expected {\"ts\":<int>,\"points\":{...}}");
        }
        Frame frame;
        const auto ts = j["ts"].get<std::int64_t>();
        if (ts < 0) {
            throw ValidationError(origin + ":" + std::to_string(line_no) + ": negative timestamp");
        }
        frame.frame.ts = Timestamp{ts};
        std::array<bool, N> seen{};
        for (const auto& [name, value] : j["points"].items()) {
            const auto key = parse_key(name);
            if (!key) {
                throw ValidationError(origin + ":" + std::to_string(line_no) + ": unknown " +
                                      std::string(point_kind) + " '" + name + "'");
            }
            if (!value.is_array() || value.size() != 2 || !value[0].is_number() ||
                !value[1].is_number()) {
                throw ParseError(origin, line_no, "point '" + name + "' must be [x,y]");
            }
            const Point2 p{value[0].template get<double>(), value[1].template get<double>()};
            if (!is_finite(p)) {
                throw ValidationError(origin + ":" + std::to_string(line_no) + ": point '" + name +
                                      "' is not finite");
            }
            frame.points_ref()[*key] = p;
            seen[static_cast<std::size_t>(*key)] = true;
        }
        for (std::size_t i = 0; i < N; ++i) {
            if (!seen[i]) {
                throw ValidationError(origin + ":" + std::to_string(line_no) + ": missing " +
                                      std::string(point_kind) + " " +
                                      std::string(to_string(static_cast<Key>(i))));
            }
        }
        try {
            validate(frame.frame);
        } catch (const Error& e) {
            throw ValidationError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
        frames.push_back(std::move(frame));
        lines.push_back(line_no);
    }
    std::vector<typename Frame::Value> out;
    out.reserve(frames.size());
    for (auto& f : frames) out.push_back(std::move(f.frame));
    check_order(out, lines, origin);
    return out;
}

// Adapters giving the generic frame parser a uniform handle on both frame types.
struct SkeletonSlot {
    using Value = SkeletonFrame;
    SkeletonFrame frame;
    JointMap& points_ref() { return frame.joints; }
};

struct FaceSlot {
    using Value = FaceFrame;
    FaceFrame frame;
    FacePointMap& points_ref() { return frame.points; }
};

}  // namespace

std::string_view to_string(KeyClass k) { return kKeyClassNames[static_cast<std::size_t>(k)]; }

std::optional<KeyClass> parse_key_class(std::string_view text) {
    for (std::size_t i = 0; i < kKeyClassNames.size(); ++i) {
        if (kKeyClassNames[i] == text) return static_cast<KeyClass>(i);
    }
    return std::nullopt;
}

std::string_view to_string(SessionKind k) {
    return k == SessionKind::Locked ? "Locked" : "Unlocked";
}

std::optional<SessionKind> parse_session_kind(std::string_view text) {
    if (text == "Locked") return SessionKind::Locked;
    if (text == "Unlocked") return SessionKind::Unlocked;
    return std::nullopt;
}

std::string_view to_string(StreamKind k) { return kStreamNames[idx(k)]; }

std::optional<StreamKind> parse_stream_kind(std::string_view text) {
    for (std::size_t i = 0; i < kStreamNames.size(); ++i) {
        if (kStreamNames[i] == text) return static_cast<StreamKind>(i);
    }
    return std::nullopt;
}

std::string_view file_name(StreamKind k) { return kStreamFiles[idx(k)]; }

std::string_view file_header(StreamKind k) { return kStreamHeaders[idx(k)]; }

std::string format_record(const KeystrokeEvent& e) {
    return csv::format_row({std::to_string(e.ts.ms), std::string(to_string(e.key_class)),
                            e.word_completed.value_or("")});
}

std::string format_record(const SessionEvent& e) {
    return csv::format_row({std::to_string(e.ts.ms), std::string(to_string(e.kind))});
}

std::string format_record(const SpeechToken& e) {
    return csv::format_row({std::to_string(e.ts.ms), e.text});
}

std::string format_record(const GazeSample& e) {
    if (!e.position) return csv::format_row({std::to_string(e.ts.ms), "false", "", ""});
    return csv::format_row({std::to_string(e.ts.ms), "true", text::format_double(e.position->x),
                            text::format_double(e.position->y)});
}

std::string format_record(const SkeletonFrame& f) { return format_points(f.ts, f.joints); }

std::string format_record(const FaceFrame& f) { return format_points(f.ts, f.points); }

std::vector<KeystrokeEvent> parse_keystrokes(std::string_view content, const std::string& origin) {
    std::vector<KeystrokeEvent> out;
    std::vector<std::size_t> lines;
    for (const auto& r : csv_body(content, origin, StreamKind::Keystroke)) {
        KeystrokeEvent e;
        e.ts = parse_ts(r.fields[0], origin, r.line);
        auto kc = parse_key_class(r.fields[1]);
        if (!kc) {
            throw ValidationError(origin + ":" + std::to_string(r.line) + ": unknown key_class '" +
                                  r.fields[1] + "'");
        }
        e.key_class = *kc;
        if (!r.fields[2].empty()) e.word_completed = r.fields[2];
        out.push_back(std::move(e));
        lines.push_back(r.line);
    }
    check_order(out, lines, origin);
    return out;
}

std::vector<SessionEvent> parse_sessions(std::string_view content, const std::string& origin,
                                         std::vector<std::string>* warnings) {
    std::vector<SessionEvent> out;
    std::vector<std::size_t> lines;
    for (const auto& r : csv_body(content, origin, StreamKind::Session)) {
        SessionEvent e;
        e.ts = parse_ts(r.fields[0], origin, r.line);
        auto kind = parse_session_kind(r.fields[1]);
        if (!kind) {
            throw ValidationError(origin + ":" + std::to_string(r.line) + ": unknown session kind '" +
                                  r.fields[1] + "'");
        }
        e.kind = *kind;
        out.push_back(e);
        lines.push_back(r.line);
    }
    check_order(out, lines, origin);
    return normalize_sessions(out, warnings);
}

std::vector<SpeechToken> parse_speech(std::string_view content, const std::string& origin) {
    std::vector<SpeechToken> out;
    std::vector<std::size_t> lines;
    for (const auto& r : csv_body(content, origin, StreamKind::Speech)) {
        SpeechToken t{parse_ts(r.fields[0], origin, r.line), text::normalize_phrase(r.fields[1])};
        if (t.text.empty()) {
            throw ValidationError(origin + ":" + std::to_string(r.line) + ": empty speech token");
        }
        out.push_back(std::move(t));
        lines.push_back(r.line);
    }
    check_order(out, lines, origin);
    return out;
}

std::vector<GazeSample> parse_gaze(std::string_view content, const std::string& origin) {
    std::vector<GazeSample> out;
    std::vector<std::size_t> lines;
    for (const auto& r : csv_body(content, origin, StreamKind::Gaze)) {
        GazeSample s;
        s.ts = parse_ts(r.fields[0], origin, r.line);
        const auto where = origin + ":" + std::to_string(r.line) + ": ";
        if (r.fields[1] == "true") {
            auto x = text::parse_double(r.fields[2]);
            auto y = text::parse_double(r.fields[3]);
            if (!x || !y) throw ParseError(origin, r.line, "available gaze sample needs x and y");
            s.position = Point2{*x, *y};
        } else if (r.fields[1] == "false") {
            if (!r.fields[2].empty() || !r.fields[3].empty()) {
                throw ValidationError(where + "unavailable gaze sample must leave x,y empty");
            }
        } else {
            throw ParseError(origin, r.line, "available must be true or false");
        }
        try {
            validate(s);
        } catch (const ValidationError& e) {
            throw ValidationError(where + e.what());
        }
        out.push_back(s);
        lines.push_back(r.line);
    }
    check_order(out, lines, origin);
    return out;
}

std::vector<SkeletonFrame> parse_skeleton(std::string_view content, const std::string& origin) {
    return parse_point_frames<SkeletonSlot, Joint, kJointCount>(content, origin, "joint",
                                                                parse_joint);
}

std::vector<FaceFrame> parse_face(std::string_view content, const std::string& origin) {
    return parse_point_frames<FaceSlot, FacePoint, kFacePointCount>(content, origin, "face point",
                                                                    parse_face_point);
}

std::vector<SessionEvent> normalize_sessions(const std::vector<SessionEvent>& events,
                                             std::vector<std::string>* warnings) {
    std::vector<SessionEvent> out;
    out.reserve(events.size());
    for (const auto& e : events) {
        if (!out.empty() && out.back().kind == e.kind) {
            if (warnings) {
                warnings->push_back("dropped duplicate " + std::string(to_string(e.kind)) +
                                    " session event at ts " + std::to_string(e.ts.ms));
            }
            continue;
        }
        out.push_back(e);
    }
    return out;
}

void validate(const GazeSample& s) {
    if (!s.position) return;
    const auto p = *s.position;
    if (!is_finite(p) || p.x < 0.0 || p.x > 1.0 || p.y < 0.0 || p.y > 1.0) {
        throw ValidationError("gaze coordinates must lie in [0,1]");
    }
}

void validate(const SpeechToken& t) {
    if (text::trim(t.text).empty()) throw ValidationError("empty speech token");
}

void validate(const SkeletonFrame& f) {
    for (const auto& p : f.joints) {
        if (!is_finite(p)) throw ValidationError("skeleton joint is not finite");
    }
}

void validate(const FaceFrame& f) {
    for (const auto& p : f.points) {
        if (!is_finite(p)) throw ValidationError("face point is not finite");
    }
    try {
        face_width(f);
    } catch (const DegenerateFrame& e) {
        throw ValidationError(e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

WorkdayTrace load_trace(const std::filesystem::path& dir, std::vector<std::string>* warnings) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError("trace directory not found: " + dir.string());

    WorkdayTrace trace;
    const auto normalized = dir.lexically_normal();
    auto leaf = normalized.filename();
    auto parent = normalized.parent_path();
    if (leaf.empty()) {  // trailing separator
        leaf = parent.filename();
        parent = parent.parent_path();
    }
    static const std::regex kDate(R"(\d{4}-\d{2}-\d{2})");
    if (std::regex_match(leaf.string(), kDate)) {
        trace.date = leaf.string();
        trace.user_id = parent.filename().string();
    }

    auto content = [&](StreamKind k) -> std::pair<std::string, std::string> {
        const auto path = dir / file_name(k);
        if (!fs::exists(path)) return {std::string(), path.string()};
        return {read_file(path), path.string()};
    };

    {
        auto [c, o] = content(StreamKind::Keystroke);
        trace.keystrokes = parse_keystrokes(c, o);
    }
    {
        auto [c, o] = content(StreamKind::Session);
        trace.sessions = parse_sessions(c, o, warnings);
    }
    {
        auto [c, o] = content(StreamKind::Speech);
        trace.speech = parse_speech(c, o);
    }
    {
        auto [c, o] = content(StreamKind::Gaze);
        trace.gaze = parse_gaze(c, o);
    }
    {
        auto [c, o] = content(StreamKind::Skeleton);
        trace.skeleton = parse_skeleton(c, o);
    }
    {
        auto [c, o] = content(StreamKind::Face);
        trace.face = parse_face(c, o);
    }
    return trace;
}

namespace {

template <typename T>
void write_stream(const std::filesystem::path& dir, StreamKind kind, const std::vector<T>& items) {
    std::string body(file_header(kind));
    for (const auto& item : items) body += format_record(item);
    const auto path = dir / file_name(kind);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << body;
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void write_trace(const WorkdayTrace& trace, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    write_stream(dir, StreamKind::Keystroke, trace.keystrokes);
    write_stream(dir, StreamKind::Session, trace.sessions);
    write_stream(dir, StreamKind::Speech, trace.speech);
    write_stream(dir, StreamKind::Gaze, trace.gaze);
    write_stream(dir, StreamKind::Skeleton, trace.skeleton);
    write_stream(dir, StreamKind::Face, trace.face);
}

}  // namespace affect
