/**
 * booster.hpp: quote rotation and the dodge-ball game.
 *
 * Game play field: x in [0,1] left to right, y in [0,1] from the floor up.
 * Balls spawn at the top and fall straight down; the avatar stands on the
 * floor and moves sideways. The game advances in fixed ticks and all timing
 * is counted in whole ticks, so recharge happens on an exact tick.
 */

#pragma once

#include "affect/core.hpp"
#include "affect/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace affect {

class EmptySet : public Error {
public:
    using Error::Error;
};

class GameOver : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Quotes
// ---------------------------------------------------------------------------

enum class QuoteKind : std::uint8_t { Inspirational, Funny };

std::string_view to_string(QuoteKind k);
std::optional<QuoteKind> parse_quote_kind(std::string_view text);

struct Quote {
    std::string text;
    std::string author;

    bool operator==(const Quote&) const = default;
};

struct QuoteSet {
    QuoteKind kind = QuoteKind::Inspirational;
    std::vector<Quote> quotes;
};

/// `<quotes kind="..."><quote author="...">text</quote>...</quotes>`. The
/// kind attribute must match `kind`. Throws ParseError, or EmptySet when the
/// file holds no quotes.
QuoteSet parse_quotes(std::string_view xml, QuoteKind kind, const std::string& origin = "<quotes>");
QuoteSet load_quotes(const std::filesystem::path& path, QuoteKind kind);
std::filesystem::path default_quotes_path(const std::filesystem::path& data_dir, QuoteKind kind);

inline constexpr std::int64_t kDefaultQuoteIntervalMs = 30'000;

/// Shows one quote at a time and switches to a uniformly drawn quote (repeats
/// allowed) once the interval has elapsed.
class QuoteRotator {
public:
    /// Throws EmptySet.
    QuoteRotator(QuoteSet set, std::uint64_t seed, std::int64_t interval_ms = kDefaultQuoteIntervalMs);

    /// Current quote if `now` is before the next change, else a fresh draw
    /// with the next change at now + interval. The first call always draws.
    const Quote& next_quote(Timestamp now);

    std::size_t current_index() const { return current_; }
    std::optional<Timestamp> next_change() const { return next_change_; }
    const QuoteSet& set() const { return set_; }
    std::int64_t interval_ms() const { return interval_ms_; }

private:
    QuoteSet set_;
    Rng rng_;
    std::int64_t interval_ms_;
    std::size_t current_ = 0;
    std::optional<Timestamp> next_change_;
};

// ---------------------------------------------------------------------------
// Dodge-ball game
// ---------------------------------------------------------------------------

enum class GameInput : std::uint8_t { MoveLeft, MoveRight, Stay };

std::string_view to_string(GameInput in);
std::optional<GameInput> parse_game_input(std::string_view text);

struct GameConfig {
    int initial_lives = 3;
    int max_lives = 3;
    double recharge_seconds = 15.0;
    double ball_spawn_rate = 0.8;  // balls per second
    double fall_speed_min = 0.25;  // field heights per second
    double fall_speed_max = 0.6;
    double avatar_half_width = 0.06;
    double avatar_height = 0.12;
    double avatar_speed = 0.9;  // field widths per second
    double ball_radius = 0.03;
    double tick = 1.0 / 30.0;  // seconds

    /// Throws ValidationError: non-positive fields, initial_lives above
    /// max_lives, inverted speed range, or a recharge time that is not a
    /// whole number of ticks.
    void validate() const;
    std::int64_t recharge_ticks() const;

    bool operator==(const GameConfig&) const = default;
};

struct Ball {
    double x = 0.5;
    double y = 1.0;
    double fall_speed = 0.3;

    bool operator==(const Ball&) const = default;
};

struct GameState {
    double avatar_x = 0.5;
    std::vector<Ball> balls;
    int lives = 3;
    std::int64_t unhit_ticks = 0;
    std::int64_t elapsed_ticks = 0;
    bool over = false;
    std::uint64_t rng_seed = 0;
    std::uint64_t rng_state = 0;

    double unhit_elapsed(const GameConfig& cfg) const { return static_cast<double>(unhit_ticks) * cfg.tick; }
    double elapsed(const GameConfig& cfg) const { return static_cast<double>(elapsed_ticks) * cfg.tick; }
    /// Survival time in seconds.
    double score(const GameConfig& cfg) const { return elapsed(cfg); }

    bool operator==(const GameState&) const = default;
};

GameState new_game(const GameConfig& cfg, std::uint64_t seed);

/// Advances one tick: move, fall, collide, despawn, spawn, then update lives.
/// Each colliding ball costs one life (floored at 0) and resets the unhit
/// counter; a tick without hits that brings the counter to recharge_ticks
/// awards a life up to max_lives and resets the counter. Throws GameOver.
GameState game_step(const GameState& state, GameInput input, const GameConfig& cfg);

nlohmann::ordered_json to_json(const GameState& state, const GameConfig& cfg);
nlohmann::ordered_json to_json(const GameConfig& cfg);

}  // namespace affect
