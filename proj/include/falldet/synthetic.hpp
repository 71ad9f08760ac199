#pragma once

// Scripted landmark trajectories: hand-posed skeletons interpolated over time.
// Used to build deterministic fixture clips (falls and daily activities)
// without a pose model.

#include <array>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "pose_stream.hpp"

namespace falldet::synth {

/// The nine landmarks the features read, plus one visibility per side.
struct Skeleton {
    Vec2 nose;
    Vec2 l_shoulder, r_shoulder;
    Vec2 l_hip, r_hip;
    Vec2 l_knee, r_knee;
    Vec2 l_ankle, r_ankle;
    double left_visibility = 0.95;
    double right_visibility = 0.95;
    double right_leg_visibility = 0.95;  // right hip, knee, ankle, foot
    double nose_visibility = 0.95;
};

inline Vec2 lerp(Vec2 a, Vec2 b, double t) { return a + t * (b - a); }

inline Skeleton lerp(const Skeleton& a, const Skeleton& b, double t) {
    Skeleton s;
    s.nose = lerp(a.nose, b.nose, t);
    s.l_shoulder = lerp(a.l_shoulder, b.l_shoulder, t);
    s.r_shoulder = lerp(a.r_shoulder, b.r_shoulder, t);
    s.l_hip = lerp(a.l_hip, b.l_hip, t);
    s.r_hip = lerp(a.r_hip, b.r_hip, t);
    s.l_knee = lerp(a.l_knee, b.l_knee, t);
    s.r_knee = lerp(a.r_knee, b.r_knee, t);
    s.l_ankle = lerp(a.l_ankle, b.l_ankle, t);
    s.r_ankle = lerp(a.r_ankle, b.r_ankle, t);
    s.left_visibility = a.left_visibility + t * (b.left_visibility - a.left_visibility);
    s.right_visibility = a.right_visibility + t * (b.right_visibility - a.right_visibility);
    s.right_leg_visibility = a.right_leg_visibility + t * (b.right_leg_visibility - a.right_leg_visibility);
    s.nose_visibility = a.nose_visibility + t * (b.nose_visibility - a.nose_visibility);
    return s;
}

inline Skeleton translated(Skeleton s, Vec2 d) {
    for (Vec2* p : {&s.nose, &s.l_shoulder, &s.r_shoulder, &s.l_hip, &s.r_hip, &s.l_knee, &s.r_knee, &s.l_ankle,
                    &s.r_ankle})
        *p = *p + d;
    return s;
}

/// Reflects about the vertical line x = cx (left and right labels kept).
inline Skeleton mirrored(Skeleton s, double cx) {
    for (Vec2* p : {&s.nose, &s.l_shoulder, &s.r_shoulder, &s.l_hip, &s.r_hip, &s.l_knee, &s.r_knee, &s.l_ankle,
                    &s.r_ankle})
        p->x = 2.0 * cx - p->x;
    return s;
}

inline Skeleton with_right_visibility(Skeleton s, double v) {
    s.right_visibility = v;
    s.right_leg_visibility = v;
    return s;
}

inline Skeleton with_right_leg_visibility(Skeleton s, double v) {
    s.right_leg_visibility = v;
    return s;
}

// ---------------------------------------------------------------------------
// Key poses. Feet rest near the image bottom; shoulder-hip distance 0.28 upright.

/// Upright, facing the camera.
inline Skeleton standing(double cx = 0.5) {
    Skeleton s;
    s.nose = {cx, 0.18};
    s.l_shoulder = {cx + 0.08, 0.32};
    s.r_shoulder = {cx - 0.08, 0.32};
    s.l_hip = {cx + 0.06, 0.60};
    s.r_hip = {cx - 0.06, 0.60};
    s.l_knee = {cx + 0.06, 0.76};
    s.r_knee = {cx - 0.06, 0.76};
    s.l_ankle = {cx + 0.06, 0.92};
    s.r_ankle = {cx - 0.06, 0.92};
    return s;
}

/// Mid-stride walking pose; `phase` in [-1, 1] swings the legs.
inline Skeleton walking(double cx, double phase) {
    Skeleton s = standing(cx);
    s.l_knee.x += 0.03 * phase;
    s.r_knee.x -= 0.03 * phase;
    s.l_ankle.x += 0.06 * phase;
    s.r_ankle.x -= 0.06 * phase;
    return s;
}

/// Collapsed toward the camera: torso foreshortened, head near the floor.
inline Skeleton collapsed_forward(double cx = 0.5) {
    Skeleton s;
    s.nose = {cx, 0.88};
    s.l_shoulder = {cx + 0.08, 0.84};
    s.r_shoulder = {cx - 0.08, 0.84};
    s.l_hip = {cx + 0.06, 0.90};
    s.r_hip = {cx - 0.06, 0.90};
    s.l_knee = {cx + 0.06, 0.94};
    s.r_knee = {cx - 0.06, 0.94};
    s.l_ankle = {cx + 0.07, 0.96};
    s.r_ankle = {cx - 0.07, 0.96};
    return s;
}

/// On the floor on one side, torso horizontal, thighs raised at a right angle.
/// Head toward the left of the image.
inline Skeleton lying_bent(double hip_x = 0.5) {
    Skeleton s;
    s.nose = {hip_x - 0.40, 0.90};
    s.l_shoulder = {hip_x - 0.30, 0.80};
    s.r_shoulder = {hip_x - 0.30, 0.80};
    s.l_hip = {hip_x, 0.80};
    s.r_hip = {hip_x, 0.80};
    s.l_knee = {hip_x, 0.50};
    s.r_knee = {hip_x, 0.50};
    s.l_ankle = {hip_x + 0.25, 0.50};
    s.r_ankle = {hip_x + 0.25, 0.50};
    return s;
}

/// On the floor, legs straight, body partly along the camera axis.
inline Skeleton lying_oblique(double cx = 0.5) {
    Skeleton s;
    s.nose = {cx - 0.25, 0.90};
    s.l_shoulder = {cx - 0.15, 0.86};
    s.r_shoulder = {cx - 0.15, 0.86};
    s.l_hip = {cx - 0.03, 0.88};
    s.r_hip = {cx - 0.03, 0.88};
    s.l_knee = {cx + 0.15, 0.90};
    s.r_knee = {cx + 0.15, 0.90};
    s.l_ankle = {cx + 0.32, 0.92};
    s.r_ankle = {cx + 0.32, 0.92};
    return s;
}

/// Seated on a chair, side view.
inline Skeleton sitting(double cx = 0.5) {
    Skeleton s;
    s.nose = {cx + 0.02, 0.33};
    s.l_shoulder = {cx, 0.46};
    s.r_shoulder = {cx, 0.46};
    s.l_hip = {cx, 0.72};
    s.r_hip = {cx, 0.72};
    s.l_knee = {cx + 0.20, 0.72};
    s.r_knee = {cx + 0.20, 0.72};
    s.l_ankle = {cx + 0.20, 0.93};
    s.r_ankle = {cx + 0.20, 0.93};
    return s;
}

/// Bent forward at the waist to reach the floor, side view.
inline Skeleton bending(double cx = 0.5) {
    Skeleton s;
    s.nose = {cx + 0.33, 0.70};
    s.l_shoulder = {cx + 0.25, 0.66};
    s.r_shoulder = {cx + 0.25, 0.66};
    s.l_hip = {cx, 0.60};
    s.r_hip = {cx, 0.60};
    s.l_knee = {cx + 0.02, 0.76};
    s.r_knee = {cx + 0.02, 0.76};
    s.l_ankle = {cx, 0.92};
    s.r_ankle = {cx, 0.92};
    return s;
}

/// Deep squat, side view.
inline Skeleton crouching(double cx = 0.5) {
    Skeleton s;
    s.nose = {cx + 0.04, 0.42};
    s.l_shoulder = {cx, 0.55};
    s.r_shoulder = {cx, 0.55};
    s.l_hip = {cx, 0.78};
    s.r_hip = {cx, 0.78};
    s.l_knee = {cx + 0.15, 0.70};
    s.r_knee = {cx + 0.15, 0.70};
    s.l_ankle = {cx + 0.10, 0.93};
    s.r_ankle = {cx + 0.10, 0.93};
    return s;
}

// ---------------------------------------------------------------------------

/// Fills all 33 landmarks: face points cluster at the nose, arms hang between
/// shoulder and hip, feet points sit at the ankles.
inline PoseFrame to_frame(const Skeleton& s, std::int64_t index, double t) {
    PoseFrame f;
    f.frame_index = index;
    f.timestamp_s = t;
    f.person_present = true;
    auto put = [&f](std::size_t i, Vec2 p, double vis) { f.landmarks[i] = Landmark{p.x, p.y, 0.0, vis}; };

    put(0, s.nose, s.nose_visibility);
    for (std::size_t i = 1; i <= 10; ++i) {
        const double dx = (i % 2 ? -1.0 : 1.0) * 0.01 * static_cast<double>((i + 1) / 2);
        put(i, {s.nose.x + dx, s.nose.y - 0.01}, i % 2 ? s.left_visibility : s.right_visibility);
    }
    put(11, s.l_shoulder, s.left_visibility);
    put(12, s.r_shoulder, s.right_visibility);
    // elbows, wrists, hand points
    put(13, lerp(s.l_shoulder, s.l_hip, 0.5), s.left_visibility);
    put(14, lerp(s.r_shoulder, s.r_hip, 0.5), s.right_visibility);
    for (std::size_t i = 15; i <= 22; ++i)
        put(i, lerp(i % 2 ? s.l_shoulder : s.r_shoulder, i % 2 ? s.l_hip : s.r_hip, 0.9),
            i % 2 ? s.left_visibility : s.right_visibility);
    put(23, s.l_hip, s.left_visibility);
    put(24, s.r_hip, s.right_leg_visibility);
    put(25, s.l_knee, s.left_visibility);
    put(26, s.r_knee, s.right_leg_visibility);
    put(27, s.l_ankle, s.left_visibility);
    put(28, s.r_ankle, s.right_leg_visibility);
    put(29, s.l_ankle + Vec2{-0.01, 0.01}, s.left_visibility);
    put(30, s.r_ankle + Vec2{-0.01, 0.01}, s.right_leg_visibility);
    put(31, s.l_ankle + Vec2{0.03, 0.01}, s.left_visibility);
    put(32, s.r_ankle + Vec2{0.03, 0.01}, s.right_leg_visibility);
    return f;
}

/// Piecewise-linear pose script. Each step appends frames; the first frame of
/// a move is one step past the starting pose.
class Script {
public:
    explicit Script(Skeleton start) : current_(start) {}

    Script& hold(int frames) {
        for (int i = 0; i < frames; ++i) steps_.push_back(current_);
        return *this;
    }

    Script& move_to(const Skeleton& target, int frames) {
        const Skeleton from = current_;
        for (int i = 1; i <= frames; ++i) steps_.push_back(lerp(from, target, double(i) / frames));
        current_ = target;
        return *this;
    }

    Script& jump_to(const Skeleton& target) {
        current_ = target;
        return *this;
    }

    /// Frames in which the pose model finds nobody.
    Script& absent(int frames) {
        for (int i = 0; i < frames; ++i) steps_.push_back(std::nullopt);
        return *this;
    }

    std::vector<PoseFrame> frames(double fps) const {
        std::vector<PoseFrame> out;
        out.reserve(steps_.size());
        for (std::size_t i = 0; i < steps_.size(); ++i) {
            const auto idx = static_cast<std::int64_t>(i);
            const double t = static_cast<double>(i) / fps;
            out.push_back(steps_[i] ? to_frame(*steps_[i], idx, t) : absent_frame(idx, t));
        }
        return out;
    }

    std::size_t size() const { return steps_.size(); }

private:
    Skeleton current_;
    std::vector<std::optional<Skeleton>> steps_;
};

struct ScriptedClip {
    std::string clip_id;
    ClipLabel label;
    double fps;
    std::vector<PoseFrame> frames;
};

/// Walks from x0 to x1 at `speed` (units/s), swinging the legs.
inline Script& walk(Script& script, double x0, double x1, double speed, double fps) {
    const int n = std::max(1, static_cast<int>(std::abs(x1 - x0) / speed * fps));
    for (int i = 1; i <= n; ++i) {
        const double x = x0 + (x1 - x0) * i / n;
        const double phase = (i % 16 < 8 ? 1.0 : -1.0) * (1.0 - std::abs((i % 8) - 4) / 4.0);
        script.jump_to(walking(x, phase)).hold(1);
    }
    return script;
}

/// Six fall scripts (fast stand-to-floor) and six daily-activity scripts.
inline std::vector<ScriptedClip> trajectory_suite() {
    std::vector<ScriptedClip> clips;
    auto add = [&clips](std::string id, ClipLabel label, double fps, const Script& s) {
        clips.push_back({std::move(id), label, fps, s.frames(fps)});
    };
    constexpr auto kFall = ClipLabel::Fall;
    constexpr auto kAdl = ClipLabel::Adl;

    {
        Script s(standing(0.5));
        s.hold(45).move_to(collapsed_forward(0.5), 6).hold(60);
        add("fall_forward_collapse", kFall, 30.0, s);
    }
    {
        Script s(standing(0.5));
        s.hold(40).move_to(lying_bent(0.55), 5).hold(50);
        add("fall_side_left", kFall, 30.0, s);
    }
    {
        Script s(standing(0.45));
        s.hold(40).move_to(mirrored(lying_bent(0.45), 0.45), 8).hold(50);
        add("fall_side_right", kFall, 30.0, s);
    }
    {
        Script s(standing(0.4));
        s.hold(35).move_to(lying_oblique(0.45), 6).hold(45);
        add("fall_oblique_25fps", kFall, 25.0, s);
    }
    {
        // Right leg hidden behind furniture; legs are read from the left side only.
        Script s(with_right_leg_visibility(standing(0.5), 0.3));
        s.hold(40).move_to(with_right_leg_visibility(lying_bent(0.55), 0.3), 5).hold(50);
        add("fall_right_leg_occluded", kFall, 30.0, s);
    }
    {
        Script s(standing(0.25));
        s.hold(30);
        walk(s, 0.25, 0.55, 0.3, 30.0);
        s.move_to(collapsed_forward(0.55), 7).hold(90);
        add("fall_after_walking", kFall, 30.0, s);
    }

    {
        Script s(standing(0.5));
        s.hold(40).move_to(sitting(0.5), 20).hold(90).move_to(standing(0.5), 20).hold(30);
        add("adl_sit", kAdl, 30.0, s);
    }
    {
        Script s(standing(0.5));
        s.hold(40).move_to(bending(0.5), 15).hold(40).move_to(standing(0.5), 15).hold(30);
        add("adl_bend", kAdl, 30.0, s);
    }
    {
        Script s(standing(0.2));
        s.hold(30);
        walk(s, 0.2, 0.8, 0.3, 30.0);
        walk(s, 0.8, 0.3, 0.3, 30.0);
        s.hold(20);
        add("adl_walk", kAdl, 30.0, s);
    }
    {
        Script s(standing(0.5));
        s.hold(40).move_to(crouching(0.5), 15).hold(60).move_to(standing(0.5), 15).hold(30);
        add("adl_crouch", kAdl, 30.0, s);
    }
    {
        Script s(standing(0.5));
        s.hold(40).move_to(collapsed_forward(0.5), 3).hold(3).move_to(standing(0.5), 4).hold(60);
        add("adl_stumble_recover", kAdl, 30.0, s);
    }
    {
        Script s(standing(0.5));
        s.hold(40);
        walk(s, 0.5, 1.05, 0.3, 30.0);
        s.jump_to(with_right_visibility(standing(1.1), 0.1)).hold(5).absent(90);
        add("adl_camera_exit", kAdl, 30.0, s);
    }
    return clips;
}

inline void write_stream(const std::filesystem::path& path, const std::vector<PoseFrame>& frames) {
    std::ofstream out(path);
    for (const auto& f : frames) out << write_frame_line(f) << '\n';
}

/// Writes every clip as <id>.jsonl plus manifest.json into `dir`; returns the manifest path.
inline std::filesystem::path write_suite(const std::filesystem::path& dir, const std::vector<ScriptedClip>& clips) {
    std::filesystem::create_directories(dir);
    std::vector<ClipManifestEntry> manifest;
    for (const auto& c : clips) {
        const std::string file = c.clip_id + ".jsonl";
        write_stream(dir / file, c.frames);
        manifest.push_back({c.clip_id, file, c.label, c.fps});
    }
    const auto manifest_path = dir / "manifest.json";
    std::ofstream(manifest_path) << write_manifest(manifest) << '\n';
    return manifest_path;
}

}  // namespace falldet::synth
