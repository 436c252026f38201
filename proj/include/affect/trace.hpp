/**
 * trace.hpp: multimodal workday streams and their on-disk formats.
 *
 * A trace directory holds one file per modality:
 *
 *   keystrokes.csv   ts_ms,key_class,word_completed
 *   session.csv      ts_ms,kind
 *   speech.csv       ts_ms,text
 *   gaze.csv         ts_ms,available,x,y
 *   skeleton.jsonl   {"ts":<int>,"points":{"<Joint>":[x,y],...}}
 *   face.jsonl       {"ts":<int>,"points":{"<FacePoint>":[x,y],...}}
 *
 * CSV header rows are optional on input and always written. Every stream is
 * time-ordered (non-decreasing). Missing files load as empty streams.
 */

#pragma once

#include "affect/core.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace affect {

enum class KeyClass : std::uint8_t { Character, Navigation, FunctionControl };

std::string_view to_string(KeyClass k);
std::optional<KeyClass> parse_key_class(std::string_view text);

struct KeystrokeEvent {
    Timestamp ts;
    KeyClass key_class = KeyClass::Character;
    // Set on the whitespace/enter/tab key that ends a typed word.
    std::optional<std::string> word_completed;

    bool operator==(const KeystrokeEvent&) const = default;
};

enum class SessionKind : std::uint8_t { Locked, Unlocked };

std::string_view to_string(SessionKind k);
std::optional<SessionKind> parse_session_kind(std::string_view text);

struct SessionEvent {
    Timestamp ts;
    SessionKind kind = SessionKind::Locked;

    bool operator==(const SessionEvent&) const = default;
};

struct SpeechToken {
    Timestamp ts;
    std::string text;  // lowercase word or phrase

    bool operator==(const SpeechToken&) const = default;
};

/// Screen-normalized gaze point; `position` is empty while the eyes are not
/// tracked (user away or drowsy).
struct GazeSample {
    Timestamp ts;
    std::optional<Point2> position;

    bool available() const { return position.has_value(); }
    bool operator==(const GazeSample&) const = default;
};

enum class StreamKind : std::uint8_t { Keystroke, Session, Speech, Gaze, Skeleton, Face };

inline constexpr std::array<StreamKind, 6> kAllStreams = {
    StreamKind::Keystroke, StreamKind::Session,  StreamKind::Speech,
    StreamKind::Gaze,      StreamKind::Skeleton, StreamKind::Face,
};

/// Wire name used by the service endpoints ("keystroke", "session", ...).
std::string_view to_string(StreamKind k);
std::optional<StreamKind> parse_stream_kind(std::string_view text);
std::string_view file_name(StreamKind k);
/// Header line including the trailing newline; empty for JSONL streams.
std::string_view file_header(StreamKind k);

struct WorkdayTrace {
    std::string user_id;
    std::string date;  // YYYY-MM-DD
    std::vector<KeystrokeEvent> keystrokes;
    std::vector<SessionEvent> sessions;
    std::vector<SpeechToken> speech;
    std::vector<GazeSample> gaze;
    std::vector<SkeletonFrame> skeleton;
    std::vector<FaceFrame> face;

    bool operator==(const WorkdayTrace&) const = default;
};

// Single-record formatting; each returns one line with its newline.
std::string format_record(const KeystrokeEvent& e);
std::string format_record(const SessionEvent& e);
std::string format_record(const SpeechToken& e);
std::string format_record(const GazeSample& e);
std::string format_record(const SkeletonFrame& f);
std::string format_record(const FaceFrame& f);

// Whole-file parsers. `origin` names the file in diagnostics. All throw
// ParseError, OrderError, or ValidationError carrying the line number.
std::vector<KeystrokeEvent> parse_keystrokes(std::string_view content, const std::string& origin);
std::vector<SessionEvent> parse_sessions(std::string_view content, const std::string& origin,
                                         std::vector<std::string>* warnings = nullptr);
std::vector<SpeechToken> parse_speech(std::string_view content, const std::string& origin);
std::vector<GazeSample> parse_gaze(std::string_view content, const std::string& origin);
std::vector<SkeletonFrame> parse_skeleton(std::string_view content, const std::string& origin);
std::vector<FaceFrame> parse_face(std::string_view content, const std::string& origin);

/// Drops the second of two consecutive events of the same kind, appending a
/// warning per drop. Idempotent.
std::vector<SessionEvent> normalize_sessions(const std::vector<SessionEvent>& events,
                                             std::vector<std::string>* warnings = nullptr);

// Record validation shared by the file parsers and the service.
void validate(const GazeSample& s);
void validate(const SpeechToken& t);
void validate(const SkeletonFrame& f);
void validate(const FaceFrame& f);

/// Loads a trace directory. user_id and date are taken from a
/// `<user>/<YYYY-MM-DD>` layout when the path has one.
WorkdayTrace load_trace(const std::filesystem::path& dir,
                        std::vector<std::string>* warnings = nullptr);

/// Writes all six stream files (header-only when a stream is empty).
void write_trace(const WorkdayTrace& trace, const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);

}  // namespace affect
