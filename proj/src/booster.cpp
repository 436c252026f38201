#include "affect/booster.hpp"

#include "affect/text.hpp"
#include "affect/trace.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace affect {

std::string_view to_string(QuoteKind k) {
    return k == QuoteKind::Inspirational ? "inspirational" : "funny";
}

std::optional<QuoteKind> parse_quote_kind(std::string_view text) {
    if (text == "inspirational") return QuoteKind::Inspirational;
    if (text == "funny") return QuoteKind::Funny;
    return std::nullopt;
}

QuoteSet parse_quotes(std::string_view xml, QuoteKind kind, const std::string& origin) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in{std::string(xml)};
    try {
        pt::read_xml(in, tree, pt::xml_parser::no_comments);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError(origin, e.line(), e.message());
    }
    const auto root = tree.get_child_optional("quotes");
    if (!root) throw ParseError(origin, 0, "missing <quotes> root element");
    const auto declared = root->get<std::string>("<xmlattr>.kind", "");
    if (declared != to_string(kind)) {
        throw ParseError(origin, 0, fmt::format("expected kind '{}', file declares '{}'", to_string(kind), declared));
    }

    QuoteSet set;
    set.kind = kind;
    for (const auto& [tag, node] : *root) {
        if (tag == "<xmlattr>") continue;
        if (tag != "quote") throw ParseError(origin, 0, "unexpected element <" + tag + ">");
        Quote q;
        q.text = std::string(text::trim(node.data()));
        q.author = std::string(text::trim(node.get<std::string>("<xmlattr>.author", "")));
        if (q.text.empty()) throw ParseError(origin, 0, fmt::format("quote {} is empty", set.quotes.size() + 1));
        set.quotes.push_back(std::move(q));
    }
    if (set.quotes.empty()) throw EmptySet(origin + ": no quotes");
    return set;
}

QuoteSet load_quotes(const std::filesystem::path& path, QuoteKind kind) {
    return parse_quotes(read_file(path), kind, path.string());
}

std::filesystem::path default_quotes_path(const std::filesystem::path& data_dir, QuoteKind kind) {
    return data_dir / fmt::format("quotes_{}.xml", to_string(kind));
}

QuoteRotator::QuoteRotator(QuoteSet set, std::uint64_t seed, std::int64_t interval_ms)
    : set_(std::move(set)), rng_(seed), interval_ms_(interval_ms) {
    if (set_.quotes.empty()) throw EmptySet("quote set is empty");
    if (interval_ms_ <= 0) throw ValidationError("quote interval must be positive");
}

const Quote& QuoteRotator::next_quote(Timestamp now) {
    if (set_.quotes.empty()) throw EmptySet("quote set is empty");
    if (next_change_ && now < *next_change_) return set_.quotes[current_];
    current_ = static_cast<std::size_t>(rng_.uniform_int(0, static_cast<std::int64_t>(set_.quotes.size()) - 1));
    next_change_ = Timestamp{now.ms + interval_ms_};
    return set_.quotes[current_];
}

std::string_view to_string(GameInput in) {
    switch (in) {
        case GameInput::MoveLeft: return "MoveLeft";
        case GameInput::MoveRight: return "MoveRight";
        case GameInput::Stay: return "Stay";
    }
    return "Stay";
}

std::optional<GameInput> parse_game_input(std::string_view text) {
    for (auto in : {GameInput::MoveLeft, GameInput::MoveRight, GameInput::Stay}) {
        if (to_string(in) == text) return in;
    }
    return std::nullopt;
}

void GameConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(fmt::format("{} must be positive", name));
    };
    if (initial_lives <= 0) throw ValidationError("initial_lives must be positive");
    if (max_lives <= 0) throw ValidationError("max_lives must be positive");
    if (initial_lives > max_lives) throw ValidationError("initial_lives exceeds max_lives");
    positive(recharge_seconds, "recharge_seconds");
    positive(ball_spawn_rate, "ball_spawn_rate");
    positive(fall_speed_min, "fall_speed_min");
    positive(fall_speed_max, "fall_speed_max");
    positive(avatar_half_width, "avatar_half_width");
    positive(avatar_height, "avatar_height");
    positive(avatar_speed, "avatar_speed");
    positive(ball_radius, "ball_radius");
    positive(tick, "tick");
    if (fall_speed_min > fall_speed_max) throw ValidationError("fall_speed_min exceeds fall_speed_max");
    if (ball_radius >= 0.5) throw ValidationError("ball_radius must be below 0.5");
    const double ticks = recharge_seconds / tick;
    if (std::abs(ticks - std::round(ticks)) > 1e-6) {
        throw ValidationError("recharge_seconds must be a whole number of ticks");
    }
}

std::int64_t GameConfig::recharge_ticks() const {
    return static_cast<std::int64_t>(std::llround(recharge_seconds / tick));
}

GameState new_game(const GameConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    GameState s;
    s.lives = cfg.initial_lives;
    s.rng_seed = seed;
    s.rng_state = seed;
    return s;
}

GameState game_step(const GameState& state, GameInput input, const GameConfig& cfg) {
    if (state.over) throw GameOver("game is over");
    GameState s = state;
    Rng rng(0);
    rng.set_state(s.rng_state);

    const double step = cfg.avatar_speed * cfg.tick;
    if (input == GameInput::MoveLeft) s.avatar_x -= step;
    if (input == GameInput::MoveRight) s.avatar_x += step;
    s.avatar_x = std::clamp(s.avatar_x, 0.0, 1.0);

    int hits = 0;
    std::vector<Ball> kept;
    kept.reserve(s.balls.size() + 1);
    for (auto ball : s.balls) {
        ball.y -= ball.fall_speed * cfg.tick;
        const bool in_band = ball.y - cfg.ball_radius <= cfg.avatar_height && ball.y + cfg.ball_radius >= 0.0;
        const bool overlaps = std::abs(ball.x - s.avatar_x) <= cfg.avatar_half_width + cfg.ball_radius;
        if (in_band && overlaps) {
            ++hits;
            continue;
        }
        if (ball.y + cfg.ball_radius < 0.0) continue;
        kept.push_back(ball);
    }
    s.balls = std::move(kept);

    if (rng.bernoulli(cfg.ball_spawn_rate * cfg.tick)) {
        Ball b;
        b.x = rng.uniform(cfg.ball_radius, 1.0 - cfg.ball_radius);
        b.y = 1.0;
        b.fall_speed = rng.uniform(cfg.fall_speed_min, cfg.fall_speed_max);
        s.balls.push_back(b);
    }

    ++s.elapsed_ticks;
    if (hits > 0) {
        s.lives = std::max(0, s.lives - hits);
        s.unhit_ticks = 0;
        if (s.lives == 0) s.over = true;
    } else if (++s.unhit_ticks >= cfg.recharge_ticks()) {
        s.lives = std::min(cfg.max_lives, s.lives + 1);
        s.unhit_ticks = 0;
    }
    s.rng_state = rng.state();
    return s;
}

nlohmann::ordered_json to_json(const GameState& s, const GameConfig& cfg) {
    nlohmann::ordered_json balls = nlohmann::ordered_json::array();
    for (const auto& b : s.balls) balls.push_back({{"x", b.x}, {"y", b.y}, {"fall_speed", b.fall_speed}});
    return {{"avatar_x", s.avatar_x},
            {"balls", balls},
            {"lives", s.lives},
            {"max_lives", cfg.max_lives},
            {"unhit_elapsed", s.unhit_elapsed(cfg)},
            {"elapsed", s.elapsed(cfg)},
            {"elapsed_ticks", s.elapsed_ticks},
            {"over", s.over},
            {"score", s.score(cfg)},
            {"rng_seed", s.rng_seed}};
}

nlohmann::ordered_json to_json(const GameConfig& c) {
    return {{"initial_lives", c.initial_lives},   {"max_lives", c.max_lives},
            {"recharge_seconds", c.recharge_seconds}, {"ball_spawn_rate", c.ball_spawn_rate},
            {"fall_speed_min", c.fall_speed_min}, {"fall_speed_max", c.fall_speed_max},
            {"avatar_half_width", c.avatar_half_width}, {"avatar_height", c.avatar_height},
            {"avatar_speed", c.avatar_speed},     {"ball_radius", c.ball_radius},
            {"tick", c.tick}};
}

}  // namespace affect
