#pragma once

// Indicator firing, per-indicator persistence windows, weighted voting and
// fall-event emission with a cooldown.

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geometry.hpp"
#include "json.hpp"
#include "pose_stream.hpp"

namespace falldet {

enum class Indicator : std::size_t {
    HeightRatio = 0,
    TorsoLegAngle,
    KneeAnkle,
    HeadFloor,
    UpperBodyAlignment,
    MovementSpeed,
};

inline constexpr std::size_t kIndicatorCount = 6;

inline constexpr std::array<std::string_view, kIndicatorCount> kIndicatorNames = {
    "height_ratio", "torso_leg_angle", "knee_ankle", "head_floor", "upper_body_alignment",
    "movement_speed",
};

inline std::string_view to_string(Indicator i) { return kIndicatorNames[static_cast<std::size_t>(i)]; }

using Firings = std::array<bool, kIndicatorCount>;

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct DetectorConfig {
    double height_ratio_max = 0.5;   // fires when ratio < this
    double angle_low_deg = 60.0;     // fires when angle in [low, high]
    double angle_high_deg = 120.0;
    double knee_ankle_max = 0.1;     // fires when gap < this
    double head_floor_max = 0.15;    // fires when distance < this
    double speed_min = 1.2;          // fires when downward speed > this
    double visibility_min = 0.5;
    int buffer_len = 20;
    double persistence_fraction = 0.5;
    std::array<double, kIndicatorCount> weights = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    double vote_threshold = 4.0;
    int cooldown_frames = 60;
    int warmup_frames = 10;

    double weight_sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

    /// Firings an indicator needs inside its window to count as active.
    int required_firings() const {
        const double r = std::ceil(persistence_fraction * buffer_len - 1e-9);
        return std::max(1, static_cast<int>(r));
    }

    /// Throws ConfigError naming the first violated constraint.
    void validate() const {
        auto finite = [](double v, const char* name) {
            if (!std::isfinite(v)) throw ConfigError(std::string(name) + " must be finite");
        };
        finite(height_ratio_max, "height_ratio_max");
        finite(angle_low_deg, "angle_low_deg");
        finite(angle_high_deg, "angle_high_deg");
        finite(knee_ankle_max, "knee_ankle_max");
        finite(head_floor_max, "head_floor_max");
        finite(speed_min, "speed_min");
        finite(visibility_min, "visibility_min");
        finite(persistence_fraction, "persistence_fraction");
        finite(vote_threshold, "vote_threshold");
        if (!(persistence_fraction > 0.0 && persistence_fraction <= 1.0))
            throw ConfigError("persistence_fraction must lie in (0, 1]");
        if (buffer_len < 1) throw ConfigError("buffer_len must be >= 1");
        for (double w : weights) {
            finite(w, "weights");
            if (w < 0.0) throw ConfigError("weights must be nonnegative");
        }
        if (!(vote_threshold > 0.0 && vote_threshold <= weight_sum()))
            throw ConfigError("vote_threshold must lie in (0, sum(weights)]");
        if (!(angle_low_deg < angle_high_deg)) throw ConfigError("angle_low_deg must be < angle_high_deg");
        if (visibility_min < 0.0 || visibility_min > 1.0)
            throw ConfigError("visibility_min must lie in [0, 1]");
        if (cooldown_frames < 0) throw ConfigError("cooldown_frames must be >= 0");
        if (warmup_frames < 1) throw ConfigError("warmup_frames must be >= 1");
    }
};

// ---------------------------------------------------------------------------

/// Fixed-capacity FIFO of boolean firings with a cached count of trues.
class IndicatorBuffer {
public:
    explicit IndicatorBuffer(std::size_t capacity = 20) : slots_(capacity, 0) {
        if (capacity == 0) throw std::invalid_argument("IndicatorBuffer capacity must be positive");
    }

    void push(bool fired) {
        if (size_ == slots_.size()) {
            fire_count_ -= slots_[head_];
        } else {
            ++size_;
        }
        slots_[head_] = fired ? 1 : 0;
        fire_count_ += slots_[head_];
        head_ = (head_ + 1) % slots_.size();
    }

    void clear() {
        std::fill(slots_.begin(), slots_.end(), 0);
        head_ = size_ = fire_count_ = 0;
    }

    std::size_t capacity() const { return slots_.size(); }
    std::size_t size() const { return size_; }
    std::size_t fire_count() const { return fire_count_; }

    /// i-th oldest entry in the window.
    bool at(std::size_t i) const {
        const std::size_t start = (head_ + slots_.size() - size_) % slots_.size();
        return slots_[(start + i) % slots_.size()] != 0;
    }

private:
    std::vector<std::uint8_t> slots_;
    std::size_t head_ = 0;
    std::size_t size_ = 0;
    std::size_t fire_count_ = 0;
};

using IndicatorBuffers = std::array<IndicatorBuffer, kIndicatorCount>;

inline IndicatorBuffers make_buffers(int buffer_len) {
    const auto n = static_cast<std::size_t>(buffer_len);
    return {IndicatorBuffer(n), IndicatorBuffer(n), IndicatorBuffer(n),
            IndicatorBuffer(n), IndicatorBuffer(n), IndicatorBuffer(n)};
}

struct FallEvent {
    std::int64_t frame_index = 0;
    double timestamp_s = 0.0;
    double vote_score = 0.0;
    std::vector<Indicator> active_indicators;
    FeatureVector feature_snapshot;

    friend bool operator==(const FallEvent&, const FallEvent&) = default;
};

struct DetectorOutput {
    FeatureVector features;
    Firings firings{};
    Firings active{};
    double vote_score = 0.0;
    std::optional<FallEvent> event;

    friend bool operator==(const DetectorOutput&, const DetectorOutput&) = default;
};

struct DetectorState {
    Calibration calibration;
    IndicatorBuffers buffers = make_buffers(20);
    std::optional<PoseFrame> prev_frame;
    int cooldown_remaining = 0;
    std::int64_t frames_processed = 0;
};

inline DetectorState make_state(const DetectorConfig& cfg) {
    DetectorState s;
    s.buffers = make_buffers(cfg.buffer_len);
    return s;
}

inline DetectorState reset(const DetectorState& state) {
    DetectorState s;
    s.buffers = make_buffers(static_cast<int>(state.buffers[0].capacity()));
    return s;
}

// ---------------------------------------------------------------------------

/// Per-frame threshold checks. Undefined measurements never fire.
inline Firings evaluate_indicators(const FeatureVector& fv, const DetectorConfig& cfg) {
    Firings f{};
    auto set = [&f](Indicator i, bool v) { f[static_cast<std::size_t>(i)] = v; };
    set(Indicator::HeightRatio, fv.height_ratio && *fv.height_ratio < cfg.height_ratio_max);
    set(Indicator::TorsoLegAngle, fv.torso_leg_angle_deg && *fv.torso_leg_angle_deg >= cfg.angle_low_deg &&
                                      *fv.torso_leg_angle_deg <= cfg.angle_high_deg);
    set(Indicator::KneeAnkle, fv.knee_ankle_gap && *fv.knee_ankle_gap < cfg.knee_ankle_max);
    set(Indicator::HeadFloor, fv.head_floor_distance && *fv.head_floor_distance < cfg.head_floor_max);
    set(Indicator::UpperBodyAlignment, fv.upper_body_misaligned.value_or(false));
    // Only downward motion qualifies.
    set(Indicator::MovementSpeed, fv.speed && fv.vertical_velocity && *fv.vertical_velocity > 0.0 &&
                                      *fv.speed > cfg.speed_min);
    return f;
}

inline Firings active_indicators(const IndicatorBuffers& buffers, const DetectorConfig& cfg) {
    const auto need = static_cast<std::size_t>(cfg.required_firings());
    Firings a{};
    for (std::size_t i = 0; i < kIndicatorCount; ++i) a[i] = buffers[i].fire_count() >= need;
    return a;
}

inline double vote_score(const Firings& active, const DetectorConfig& cfg) {
    double s = 0.0;
    for (std::size_t i = 0; i < kIndicatorCount; ++i)
        if (active[i]) s += cfg.weights[i];
    return s;
}

inline double vote_score(const IndicatorBuffers& buffers, const DetectorConfig& cfg) {
    return vote_score(active_indicators(buffers, cfg), cfg);
}

/// Consumes one frame: calibration, features, buffers, vote, and emission.
inline DetectorOutput update(DetectorState& state, const PoseFrame& frame, const DetectorConfig& cfg) {
    if (state.prev_frame) {
        if (frame.frame_index <= state.prev_frame->frame_index)
            throw OrderViolation("frame index " + std::to_string(frame.frame_index) + " does not follow " +
                                     std::to_string(state.prev_frame->frame_index),
                                 static_cast<std::size_t>(state.frames_processed + 1));
        if (frame.timestamp_s < state.prev_frame->timestamp_s)
            throw OrderViolation("timestamp regression", static_cast<std::size_t>(state.frames_processed + 1));
    }

    if (state.cooldown_remaining > 0) --state.cooldown_remaining;

    state.calibration =
        update_calibration(std::move(state.calibration), frame, cfg.visibility_min, cfg.warmup_frames);

    DetectorOutput out;
    out.features = extract_features(frame, state.prev_frame, state.calibration, cfg.visibility_min);
    out.firings = evaluate_indicators(out.features, cfg);
    for (std::size_t i = 0; i < kIndicatorCount; ++i) state.buffers[i].push(out.firings[i]);
    out.active = active_indicators(state.buffers, cfg);
    out.vote_score = vote_score(out.active, cfg);

    if (out.vote_score >= cfg.vote_threshold && state.calibration.calibrated && state.cooldown_remaining == 0) {
        FallEvent ev;
        ev.frame_index = frame.frame_index;
        ev.timestamp_s = frame.timestamp_s;
        ev.vote_score = out.vote_score;
        for (std::size_t i = 0; i < kIndicatorCount; ++i)
            if (out.active[i]) ev.active_indicators.push_back(static_cast<Indicator>(i));
        ev.feature_snapshot = out.features;
        out.event = std::move(ev);
        state.cooldown_remaining = cfg.cooldown_frames;
    }

    state.prev_frame = frame;
    ++state.frames_processed;
    return out;
}

/// Stateful convenience wrapper around update().
class Detector {
public:
    explicit Detector(DetectorConfig cfg = {}) : cfg_(std::move(cfg)) {
        cfg_.validate();
        state_ = make_state(cfg_);
    }

    DetectorOutput update(const PoseFrame& frame) { return falldet::update(state_, frame, cfg_); }
    void reset() { state_ = falldet::reset(state_); }

    const DetectorConfig& config() const { return cfg_; }
    const DetectorState& state() const { return state_; }

private:
    DetectorConfig cfg_;
    DetectorState state_;
};

inline std::vector<FallEvent> run_stream(std::span<const PoseFrame> frames, const DetectorConfig& cfg) {
    Detector det(cfg);
    std::vector<FallEvent> events;
    for (const PoseFrame& f : frames)
        if (auto out = det.update(f); out.event) events.push_back(std::move(*out.event));
    return events;
}

/// One-line JSON event record: {"frame":..,"t":..,"score":..,"indicators":[..]}.
inline std::string event_json_line(const FallEvent& ev) {
    nlohmann::ordered_json rec;
    rec["frame"] = ev.frame_index;
    rec["t"] = ev.timestamp_s;
    rec["score"] = ev.vote_score;
    auto& names = rec["indicators"] = nlohmann::ordered_json::array();
    for (Indicator i : ev.active_indicators) names.push_back(std::string(to_string(i)));
    return rec.dump();
}

}  // namespace falldet
