#pragma once

// Flat key/value configuration files and sweep grid specifications.
//
//   # comment
//   vote_threshold = 4
//   weights = 2, 2, 1, 1, 1, 1
//
// Grid spec: "key=v1,v2,...;key2=..." over the scalar DetectorConfig keys.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "detector.hpp"

namespace falldet {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_real(std::string_view key, std::string_view text) {
    text = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ConfigError(std::string(key) + ": not a number: '" + std::string(text) + "'");
    if (!std::isfinite(v)) throw ConfigError(std::string(key) + " must be finite");
    return v;
}

inline int parse_int(std::string_view key, std::string_view text) {
    const double v = parse_real(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw ConfigError(std::string(key) + ": not an integer: '" + std::string(trim(text)) + "'");
    return static_cast<int>(v);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace detail

inline constexpr std::array<std::string_view, 13> kConfigKeys = {
    "height_ratio_max", "angle_low_deg",   "angle_high_deg",       "knee_ankle_max", "head_floor_max",
    "speed_min",        "visibility_min",  "buffer_len",           "persistence_fraction",
    "weights",          "vote_threshold",  "cooldown_frames",      "warmup_frames",
};

inline bool is_config_key(std::string_view key) {
    return std::find(kConfigKeys.begin(), kConfigKeys.end(), key) != kConfigKeys.end();
}

/// Assigns one field from its textual value. Does not validate the config as a whole.
inline void set_config_field(DetectorConfig& cfg, std::string_view key, std::string_view value) {
    using detail::parse_int;
    using detail::parse_real;
    if (key == "height_ratio_max") cfg.height_ratio_max = parse_real(key, value);
    else if (key == "angle_low_deg") cfg.angle_low_deg = parse_real(key, value);
    else if (key == "angle_high_deg") cfg.angle_high_deg = parse_real(key, value);
    else if (key == "knee_ankle_max") cfg.knee_ankle_max = parse_real(key, value);
    else if (key == "head_floor_max") cfg.head_floor_max = parse_real(key, value);
    else if (key == "speed_min") cfg.speed_min = parse_real(key, value);
    else if (key == "visibility_min") cfg.visibility_min = parse_real(key, value);
    else if (key == "buffer_len") cfg.buffer_len = parse_int(key, value);
    else if (key == "persistence_fraction") cfg.persistence_fraction = parse_real(key, value);
    else if (key == "vote_threshold") cfg.vote_threshold = parse_real(key, value);
    else if (key == "cooldown_frames") cfg.cooldown_frames = parse_int(key, value);
    else if (key == "warmup_frames") cfg.warmup_frames = parse_int(key, value);
    else if (key == "weights") {
        std::string normalized(value);
        std::replace(normalized.begin(), normalized.end(), ',', ' ');
        std::istringstream is(normalized);
        std::vector<std::string> tokens;
        for (std::string tok; is >> tok;) tokens.push_back(tok);
        if (tokens.size() != kIndicatorCount) throw ConfigError("weights: expected 6 values");
        for (std::size_t i = 0; i < kIndicatorCount; ++i) cfg.weights[i] = parse_real(key, tokens[i]);
    } else {
        throw ConfigError("unknown config key: " + std::string(key));
    }
}

/// Parses a config text over the defaults and validates the result.
inline DetectorConfig parse_config(std::string_view text) {
    DetectorConfig cfg;
    std::size_t line_no = 0;
    for (std::string_view raw : detail::split(text, '\n')) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const auto line = detail::trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        set_config_field(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

class ConfigUnreadable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline DetectorConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigUnreadable("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

inline std::string write_config(const DetectorConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "height_ratio_max = " << cfg.height_ratio_max << "\n"
       << "angle_low_deg = " << cfg.angle_low_deg << "\n"
       << "angle_high_deg = " << cfg.angle_high_deg << "\n"
       << "knee_ankle_max = " << cfg.knee_ankle_max << "\n"
       << "head_floor_max = " << cfg.head_floor_max << "\n"
       << "speed_min = " << cfg.speed_min << "\n"
       << "visibility_min = " << cfg.visibility_min << "\n"
       << "buffer_len = " << cfg.buffer_len << "\n"
       << "persistence_fraction = " << cfg.persistence_fraction << "\n"
       << "weights =";
    for (std::size_t i = 0; i < kIndicatorCount; ++i) os << (i ? ", " : " ") << cfg.weights[i];
    os << "\n"
       << "vote_threshold = " << cfg.vote_threshold << "\n"
       << "cooldown_frames = " << cfg.cooldown_frames << "\n"
       << "warmup_frames = " << cfg.warmup_frames << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Sweep grids

struct GridAxis {
    std::string key;
    // (numeric value, original token) sorted ascending by value.
    std::vector<std::pair<double, std::string>> values;
};

struct GridPoint {
    std::vector<std::string> tokens;  // one per axis
    DetectorConfig config;
};

inline std::vector<GridAxis> parse_grid(std::string_view spec) {
    std::vector<GridAxis> axes;
    for (std::string_view part : detail::split(spec, ';')) {
        part = detail::trim(part);
        if (part.empty()) continue;
        const auto eq = part.find('=');
        if (eq == std::string_view::npos) throw ConfigError("grid: expected key=v1,v2,...");
        GridAxis axis;
        axis.key = std::string(detail::trim(part.substr(0, eq)));
        if (!is_config_key(axis.key)) throw ConfigError("grid: unknown field " + axis.key);
        if (axis.key == "weights") throw ConfigError("grid: weights cannot be swept");
        for (auto& other : axes)
            if (other.key == axis.key) throw ConfigError("grid: repeated field " + axis.key);
        for (std::string_view tok : detail::split(part.substr(eq + 1), ',')) {
            tok = detail::trim(tok);
            if (tok.empty()) continue;
            axis.values.emplace_back(detail::parse_real(axis.key, tok), std::string(tok));
        }
        if (axis.values.empty()) throw ConfigError("grid: no values for " + axis.key);
        std::stable_sort(axis.values.begin(), axis.values.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        axes.push_back(std::move(axis));
    }
    if (axes.empty()) throw ConfigError("grid: empty specification");
    return axes;
}

/// Cartesian product in lexicographic order (first axis outermost).
/// Every point is validated; an invalid point throws ConfigError.
inline std::vector<GridPoint> expand_grid(const std::vector<GridAxis>& axes, const DetectorConfig& base) {
    std::vector<GridPoint> points;
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
        GridPoint p;
        p.config = base;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const auto& token = axes[a].values[idx[a]].second;
            set_config_field(p.config, axes[a].key, token);
            p.tokens.push_back(token);
        }
        p.config.validate();
        points.push_back(std::move(p));

        std::size_t a = axes.size();
        while (a > 0) {
            --a;
            if (++idx[a] < axes[a].values.size()) break;
            idx[a] = 0;
            if (a == 0) return points;
        }
        if (axes.empty()) return points;
    }
}

}  // namespace falldet
