#pragma once

#include "affect/config.hpp"
#include "affect/trace.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace affect {

/// Behaviour profile for synthetic workdays.
///
/// Engaged: keystrokes above the productivity threshold, few breaks, mostly
/// active-typing posture, smiles and positive speech. Disengaged: keystrokes
/// below threshold, at least `break_threshold` breaks, resting or slumped
/// posture, neutral faces, and sparse negative speech.
enum class Persona : std::uint8_t { Engaged, Disengaged };

std::string_view to_string(Persona p);
/// Case-insensitive ("engaged", "Disengaged", ...).
std::optional<Persona> parse_persona(std::string_view text);

// Sensor rates used by the simulator only; the predictors treat frames as an
// ordered sequence.
inline constexpr std::int64_t kSimFrameIntervalMs = 500;
inline constexpr std::int64_t kSimGazeIntervalMs = 200;

/// Generates a full workday (cfg.workday_hours long, epoch = workday start).
/// Pure function of (persona, seed, cfg, user_id, date).
WorkdayTrace simulate_workday(Persona persona, std::uint64_t seed, const RuleConfig& cfg,
                              std::string user_id = "sim-user",
                              std::string date = "2024-01-15");

}  // namespace affect
