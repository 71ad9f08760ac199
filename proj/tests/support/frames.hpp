#pragma once

// Hand-built frames for unit tests.

#include <initializer_list>
#include <utility>

#include "falldet/pose_stream.hpp"

namespace falldet::test {

struct Point {
    LandmarkIndex index;
    double x;
    double y;
    double visibility = 1.0;
};

inline PoseFrame make_frame(std::int64_t index, double t, std::initializer_list<Point> points) {
    PoseFrame f;
    f.frame_index = index;
    f.timestamp_s = t;
    f.person_present = true;
    for (const Point& p : points) f[p.index] = Landmark{p.x, p.y, 0.0, p.visibility};
    return f;
}

/// Both sides of each joint placed on the same point.
inline PoseFrame body_frame(std::int64_t index, double t, std::pair<double, double> nose,
                            std::pair<double, double> shoulder, std::pair<double, double> hip,
                            std::pair<double, double> knee, std::pair<double, double> ankle) {
    using L = LandmarkIndex;
    return make_frame(index, t,
                      {{L::Nose, nose.first, nose.second},
                       {L::LeftShoulder, shoulder.first, shoulder.second},
                       {L::RightShoulder, shoulder.first, shoulder.second},
                       {L::LeftHip, hip.first, hip.second},
                       {L::RightHip, hip.first, hip.second},
                       {L::LeftKnee, knee.first, knee.second},
                       {L::RightKnee, knee.first, knee.second},
                       {L::LeftAnkle, ankle.first, ankle.second},
                       {L::RightAnkle, ankle.first, ankle.second}});
}

/// Upright: shoulder (0.5,0.2), hip (0.5,0.5), knee (0.5,0.8), ankle y 0.95, nose y 0.08.
inline PoseFrame standing_frame(std::int64_t index, double fps = 30.0) {
    return body_frame(index, index / fps, {0.5, 0.08}, {0.5, 0.2}, {0.5, 0.5}, {0.5, 0.8}, {0.5, 0.95});
}

/// On the floor: shoulder (0.2,0.8), hip (0.5,0.8), knee (0.5,0.5), ankle (0.75,0.5), nose (0.1,0.9).
inline PoseFrame lying_frame(std::int64_t index, double fps = 30.0) {
    return body_frame(index, index / fps, {0.1, 0.9}, {0.2, 0.8}, {0.5, 0.8}, {0.5, 0.5}, {0.75, 0.5});
}

/// Consecutive phases of standing (true) or lying (false) frames.
inline std::vector<PoseFrame> phases(std::initializer_list<std::pair<bool, int>> parts, double fps = 30.0) {
    std::vector<PoseFrame> frames;
    std::int64_t i = 0;
    for (auto [stand, n] : parts)
        for (int k = 0; k < n; ++k, ++i) frames.push_back(stand ? standing_frame(i, fps) : lying_frame(i, fps));
    return frames;
}

}  // namespace falldet::test
