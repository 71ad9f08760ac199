#pragma once

// Per-frame posture and motion measurements computed from pose landmarks,
// plus the warm-up calibration (standing height, floor line) they rely on.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pose_stream.hpp"

namespace falldet {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
    double norm() const { return std::hypot(x, y); }
};

class DegenerateVector : public std::domain_error {
public:
    DegenerateVector() : std::domain_error("vector norm below 1e-9") {}
};

class NonPositiveTimeDelta : public std::domain_error {
public:
    NonPositiveTimeDelta() : std::domain_error("timestamps do not increase") {}
};

inline constexpr double kMinVectorNorm = 1e-9;
inline constexpr double kDefaultVisibilityMin = 0.5;
inline constexpr double kAlignmentEpsilon = 0.02;
inline constexpr int kDefaultWarmupFrames = 10;

/// Angle in degrees in [0, 180], or nullopt when either vector is degenerate.
inline std::optional<double> try_angle_between(Vec2 v1, Vec2 v2) {
    const double n1 = v1.norm();
    const double n2 = v2.norm();
    if (n1 <= kMinVectorNorm || n2 <= kMinVectorNorm) return std::nullopt;
    const double c = std::clamp((v1.x * v2.x + v1.y * v2.y) / (n1 * n2), -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

inline double angle_between(Vec2 v1, Vec2 v2) {
    auto a = try_angle_between(v1, v2);
    if (!a) throw DegenerateVector();
    return *a;
}

// ---------------------------------------------------------------------------
// Landmark selection

/// Visibility-gated point for a left/right landmark pair: the midpoint when
/// both sides pass the gate, otherwise the more visible passing side.
inline std::optional<Vec2> paired_point(const PoseFrame& f, LandmarkIndex left, LandmarkIndex right,
                                        double visibility_min) {
    if (!f.person_present) return std::nullopt;
    const Landmark& l = f[left];
    const Landmark& r = f[right];
    const bool lv = l.visibility >= visibility_min;
    const bool rv = r.visibility >= visibility_min;
    if (lv && rv) return Vec2{(l.x + r.x) / 2.0, (l.y + r.y) / 2.0};
    if (lv) return Vec2{l.x, l.y};
    if (rv) return Vec2{r.x, r.y};
    return std::nullopt;
}

inline std::optional<Vec2> single_point(const PoseFrame& f, LandmarkIndex i, double visibility_min) {
    if (!f.person_present) return std::nullopt;
    const Landmark& lm = f[i];
    if (lm.visibility < visibility_min) return std::nullopt;
    return Vec2{lm.x, lm.y};
}

inline std::optional<Vec2> shoulder_point(const PoseFrame& f, double vis) {
    return paired_point(f, LandmarkIndex::LeftShoulder, LandmarkIndex::RightShoulder, vis);
}
inline std::optional<Vec2> hip_point(const PoseFrame& f, double vis) {
    return paired_point(f, LandmarkIndex::LeftHip, LandmarkIndex::RightHip, vis);
}
inline std::optional<Vec2> knee_point(const PoseFrame& f, double vis) {
    return paired_point(f, LandmarkIndex::LeftKnee, LandmarkIndex::RightKnee, vis);
}
inline std::optional<Vec2> ankle_point(const PoseFrame& f, double vis) {
    return paired_point(f, LandmarkIndex::LeftAnkle, LandmarkIndex::RightAnkle, vis);
}

inline std::optional<double> shoulder_hip_distance(const PoseFrame& f, double vis) {
    auto s = shoulder_point(f, vis);
    auto h = hip_point(f, vis);
    if (!s || !h) return std::nullopt;
    return (*s - *h).norm();
}

// ---------------------------------------------------------------------------
// Calibration

struct Calibration {
    double initial_height = 0.0;
    double floor_y = 1.0;
    bool calibrated = false;
    int frames_seen = 0;
    // Shoulder-hip distances gathered during warm-up; cleared once calibrated.
    std::vector<double> samples;

    static constexpr double kFloorMin = 0.0;
    static constexpr double kFloorMax = 1.5;
};

/// Advances warm-up with one frame. The first `warmup_frames` frames with a
/// visible shoulder and hip fix the standing height as the median distance.
/// The floor line is the running maximum of visible ankle y.
inline Calibration update_calibration(Calibration cal, const PoseFrame& frame,
                                      double visibility_min = kDefaultVisibilityMin,
                                      int warmup_frames = kDefaultWarmupFrames) {
    if (!frame.person_present) return cal;

    if (auto ankle = ankle_point(frame, visibility_min))
        cal.floor_y = std::clamp(std::max(cal.floor_y, ankle->y), Calibration::kFloorMin,
                                 Calibration::kFloorMax);

    if (cal.calibrated) return cal;
    auto d = shoulder_hip_distance(frame, visibility_min);
    if (!d || *d <= kMinVectorNorm) return cal;

    cal.samples.push_back(*d);
    cal.frames_seen = static_cast<int>(cal.samples.size());
    if (cal.frames_seen >= warmup_frames) {
        std::vector<double> s = cal.samples;
        const std::size_t n = s.size();
        std::sort(s.begin(), s.end());
        cal.initial_height = n % 2 ? s[n / 2] : (s[n / 2 - 1] + s[n / 2]) / 2.0;
        cal.calibrated = true;
        cal.samples.clear();
        cal.samples.shrink_to_fit();
    }
    return cal;
}

// ---------------------------------------------------------------------------
// Features

struct FeatureVector {
    std::optional<double> height_ratio;
    std::optional<double> torso_leg_angle_deg;
    std::optional<double> knee_ankle_gap;
    std::optional<double> head_floor_distance;
    std::optional<bool> upper_body_misaligned;
    std::optional<double> speed;
    // Vertical hip velocity (positive = moving down the image); defined with speed.
    std::optional<double> vertical_velocity;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline std::optional<double> height_ratio(const PoseFrame& frame, const Calibration& cal,
                                          double visibility_min = kDefaultVisibilityMin) {
    if (!cal.calibrated || cal.initial_height <= 0.0) return std::nullopt;
    auto d = shoulder_hip_distance(frame, visibility_min);
    if (!d || *d <= 0.0) return std::nullopt;
    return *d / cal.initial_height;
}

/// Angle at the hip between hip->shoulder and hip->knee. Upright is ~180.
inline std::optional<double> torso_leg_angle(const PoseFrame& frame,
                                             double visibility_min = kDefaultVisibilityMin) {
    auto s = shoulder_point(frame, visibility_min);
    auto h = hip_point(frame, visibility_min);
    auto k = knee_point(frame, visibility_min);
    if (!s || !h || !k) return std::nullopt;
    return try_angle_between(*s - *h, *k - *h);
}

inline std::optional<double> knee_ankle_gap(const PoseFrame& frame,
                                            double visibility_min = kDefaultVisibilityMin) {
    auto k = knee_point(frame, visibility_min);
    auto a = ankle_point(frame, visibility_min);
    if (!k || !a) return std::nullopt;
    return std::abs(k->y - a->y);
}

inline std::optional<double> head_floor_distance(const PoseFrame& frame, const Calibration& cal,
                                                 double visibility_min = kDefaultVisibilityMin) {
    auto nose = single_point(frame, LandmarkIndex::Nose, visibility_min);
    if (!nose) return std::nullopt;
    return std::max(0.0, cal.floor_y - nose->y);
}

/// True when the head is not above the shoulder line (both shoulders required).
inline std::optional<bool> upper_body_misaligned(const PoseFrame& frame,
                                                 double visibility_min = kDefaultVisibilityMin,
                                                 double epsilon = kAlignmentEpsilon) {
    auto nose = single_point(frame, LandmarkIndex::Nose, visibility_min);
    auto ls = single_point(frame, LandmarkIndex::LeftShoulder, visibility_min);
    auto rs = single_point(frame, LandmarkIndex::RightShoulder, visibility_min);
    if (!nose || !ls || !rs) return std::nullopt;
    const double shoulder_mid_y = (ls->y + rs->y) / 2.0;
    return nose->y >= shoulder_mid_y - epsilon;
}

struct Motion {
    double speed = 0.0;
    double vertical_velocity = 0.0;
};

/// Hip-midpoint velocity between consecutive frames, normalized units/second.
/// Throws NonPositiveTimeDelta when the timestamps do not increase.
inline std::optional<Motion> movement(const PoseFrame& curr, const PoseFrame& prev,
                                      double visibility_min = kDefaultVisibilityMin) {
    auto a = hip_point(prev, visibility_min);
    auto b = hip_point(curr, visibility_min);
    if (!a || !b) return std::nullopt;
    const double dt = curr.timestamp_s - prev.timestamp_s;
    if (!(dt > 0.0)) throw NonPositiveTimeDelta();
    const Vec2 d = *b - *a;
    return Motion{d.norm() / dt, d.y / dt};
}

inline std::optional<double> movement_speed(const PoseFrame& curr, const PoseFrame& prev,
                                            double visibility_min = kDefaultVisibilityMin) {
    auto m = movement(curr, prev, visibility_min);
    if (!m) return std::nullopt;
    return m->speed;
}

/// Assembles the six indicators' measurements; pure in (curr, prev, cal).
inline FeatureVector extract_features(const PoseFrame& curr, const PoseFrame* prev,
                                      const Calibration& cal,
                                      double visibility_min = kDefaultVisibilityMin) {
    FeatureVector fv;
    if (!curr.person_present) return fv;
    fv.height_ratio = height_ratio(curr, cal, visibility_min);
    fv.torso_leg_angle_deg = torso_leg_angle(curr, visibility_min);
    fv.knee_ankle_gap = knee_ankle_gap(curr, visibility_min);
    fv.head_floor_distance = head_floor_distance(curr, cal, visibility_min);
    fv.upper_body_misaligned = upper_body_misaligned(curr, visibility_min);
    if (prev && curr.timestamp_s > prev->timestamp_s) {
        if (auto m = movement(curr, *prev, visibility_min)) {
            fv.speed = m->speed;
            fv.vertical_velocity = m->vertical_velocity;
        }
    }
    return fv;
}

inline FeatureVector extract_features(const PoseFrame& curr, const std::optional<PoseFrame>& prev,
                                      const Calibration& cal,
                                      double visibility_min = kDefaultVisibilityMin) {
    return extract_features(curr, prev ? &*prev : nullptr, cal, visibility_min);
}

}  // namespace falldet
