#include "affect/config.hpp"

#include "affect/text.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace affect {

namespace {

struct Field {
    std::function<void(RuleConfig&, std::string_view)> set;
    std::function<std::string(const RuleConfig&)> get;
};

Field int_field(int RuleConfig::*member) {
    return {[member](RuleConfig& c, std::string_view v) {
                auto parsed = text::parse_int(v);
                if (!parsed) throw std::invalid_argument("expected an integer");
                c.*member = static_cast<int>(*parsed);
            },
            [member](const RuleConfig& c) { return std::to_string(c.*member); }};
}

Field real_field(double RuleConfig::*member) {
    return {[member](RuleConfig& c, std::string_view v) {
                auto parsed = text::parse_double(v);
                if (!parsed) throw std::invalid_argument("expected a number");
                c.*member = *parsed;
            },
            [member](const RuleConfig& c) { return text::format_double(c.*member); }};
}

const std::map<std::string, Field, std::less<>>& fields() {
    static const std::map<std::string, Field, std::less<>> table = {
        {"window_len", int_field(&RuleConfig::window_len)},
        {"frame_majority", int_field(&RuleConfig::frame_majority)},
        {"t_lip", real_field(&RuleConfig::t_lip)},
        {"t_eye", real_field(&RuleConfig::t_eye)},
        {"d_cheek", real_field(&RuleConfig::d_cheek)},
        {"r_head", real_field(&RuleConfig::r_head)},
        {"w_front", real_field(&RuleConfig::w_front)},
        {"tilt_thresh", real_field(&RuleConfig::tilt_thresh)},
        {"dwell_seconds", real_field(&RuleConfig::dwell_seconds)},
        {"dwell_radius", real_field(&RuleConfig::dwell_radius)},
        {"keystroke_threshold", int_field(&RuleConfig::keystroke_threshold)},
        {"break_threshold", int_field(&RuleConfig::break_threshold)},
        {"typing_gap_seconds", real_field(&RuleConfig::typing_gap_seconds)},
        {"workday_hours", real_field(&RuleConfig::workday_hours)},
        {"sensor_gap_seconds", real_field(&RuleConfig::sensor_gap_seconds)},
        {"tie_order",
         {[](RuleConfig& c, std::string_view v) {
              auto parts = text::split(v, ',');
              if (parts.size() != kVotingModalityCount) {
                  throw std::invalid_argument("expected three comma-separated modalities");
              }
              std::set<Modality> seen;
              for (std::size_t i = 0; i < parts.size(); ++i) {
                  auto m = parse_modality(text::trim(parts[i]));
                  if (!m) throw std::invalid_argument("unknown modality '" + parts[i] + "'");
                  if (!seen.insert(*m).second) {
                      throw std::invalid_argument("modality listed twice");
                  }
                  c.tie_order[i] = *m;
              }
          },
          [](const RuleConfig& c) {
              std::string out;
              for (std::size_t i = 0; i < c.tie_order.size(); ++i) {
                  if (i) out += ',';
                  out += to_string(c.tie_order[i]);
              }
              return out;
          }}},
    };
    return table;
}

template <typename T>
void require_positive(T value, const char* name) {
    if (!(value > T{0})) {
        throw ValidationError(std::string("config field '") + name + "' must be positive");
    }
}

}  // namespace

void RuleConfig::validate() const {
    require_positive(window_len, "window_len");
    require_positive(frame_majority, "frame_majority");
    require_positive(t_lip, "t_lip");
    require_positive(t_eye, "t_eye");
    require_positive(d_cheek, "d_cheek");
    require_positive(r_head, "r_head");
    require_positive(w_front, "w_front");
    require_positive(tilt_thresh, "tilt_thresh");
    require_positive(dwell_seconds, "dwell_seconds");
    require_positive(dwell_radius, "dwell_radius");
    require_positive(keystroke_threshold, "keystroke_threshold");
    require_positive(break_threshold, "break_threshold");
    require_positive(typing_gap_seconds, "typing_gap_seconds");
    require_positive(workday_hours, "workday_hours");
    require_positive(sensor_gap_seconds, "sensor_gap_seconds");
    if (frame_majority > window_len) {
        throw ValidationError("config field 'frame_majority' must not exceed 'window_len'");
    }
    std::set<Modality> seen(tie_order.begin(), tie_order.end());
    if (seen.size() != kVotingModalityCount) {
        throw ValidationError("config field 'tie_order' must list each modality once");
    }
}

std::int64_t RuleConfig::workday_ms() const {
    return static_cast<std::int64_t>(workday_hours * 3600.0 * 1000.0 + 0.5);
}

RuleConfig parse_rule_config(std::string_view content, const std::string& origin) {
    RuleConfig cfg;
    std::size_t line_no = 0;
    for (const auto& raw : text::split(content, '\n')) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(origin, line_no, "expected key=value");
        const auto key = text::trim(line.substr(0, eq));
        const auto value = text::trim(line.substr(eq + 1));
        const auto it = fields().find(key);
        if (it == fields().end()) {
            throw ParseError(origin, line_no, "unknown key '" + std::string(key) + "'");
        }
        try {
            it->second.set(cfg, value);
        } catch (const std::invalid_argument& e) {
            throw ParseError(origin, line_no, std::string(key) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

RuleConfig load_rule_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_rule_config(ss.str(), path.string());
}

std::string serialize_rule_config(const RuleConfig& cfg) {
    std::string out;
    for (const auto& [name, field] : fields()) {
        out += name;
        out += '=';
        out += field.get(cfg);
        out += '\n';
    }
    return out;
}

}  // namespace affect
