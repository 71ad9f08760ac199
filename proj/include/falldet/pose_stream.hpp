#pragma once

// Landmark data model and the line-delimited JSON wire format for pose frames.
//
// One record per line:
//   {"frame": <int>, "t": <seconds>, "present": <bool>,
//    "landmarks": [[x, y, z, visibility], ... 33 entries ...]}
//
// Coordinates are normalized image coordinates (y grows downward).

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace falldet {

inline constexpr std::size_t kLandmarkCount = 33;

// Subset of the 33-point full-body topology used by the features.
enum class LandmarkIndex : std::size_t {
    Nose = 0,
    LeftShoulder = 11,
    RightShoulder = 12,
    LeftHip = 23,
    RightHip = 24,
    LeftKnee = 25,
    RightKnee = 26,
    LeftAnkle = 27,
    RightAnkle = 28,
};

struct Landmark {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double visibility = 0.0;

    friend bool operator==(const Landmark&, const Landmark&) = default;
};

struct PoseFrame {
    std::int64_t frame_index = 0;
    double timestamp_s = 0.0;
    bool person_present = false;
    std::array<Landmark, kLandmarkCount> landmarks{};

    const Landmark& operator[](LandmarkIndex i) const {
        return landmarks[static_cast<std::size_t>(i)];
    }
    Landmark& operator[](LandmarkIndex i) {
        return landmarks[static_cast<std::size_t>(i)];
    }

    friend bool operator==(const PoseFrame&, const PoseFrame&) = default;
};

/// Frame with no detected person: every landmark zeroed, visibility 0.
inline PoseFrame absent_frame(std::int64_t frame_index, double timestamp_s) {
    PoseFrame f;
    f.frame_index = frame_index;
    f.timestamp_s = timestamp_s;
    f.person_present = false;
    return f;
}

enum class ClipLabel { Fall, Adl };

inline std::string_view to_string(ClipLabel label) {
    return label == ClipLabel::Fall ? "FALL" : "ADL";
}

inline std::optional<ClipLabel> parse_clip_label(std::string_view s) {
    if (s == "FALL") return ClipLabel::Fall;
    if (s == "ADL") return ClipLabel::Adl;
    return std::nullopt;
}

struct ClipManifestEntry {
    std::string clip_id;
    std::filesystem::path stream_path;
    ClipLabel label = ClipLabel::Adl;
    double fps = 30.0;
};

// ---------------------------------------------------------------------------
// Errors

class MalformedRecord : public std::runtime_error {
public:
    MalformedRecord(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class OrderViolation : public std::runtime_error {
public:
    OrderViolation(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class StreamUnreadable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ManifestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Record codec

namespace detail {

inline double finite_number(const nlohmann::json& v, const char* what) {
    if (!v.is_number()) throw MalformedRecord(std::string(what) + " is not a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw MalformedRecord(std::string(what) + " is not finite");
    return d;
}

}  // namespace detail

/// Parses one JSONL record. Throws MalformedRecord on any schema violation.
inline PoseFrame parse_frame_line(std::string_view line) {
    nlohmann::json rec = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
    if (rec.is_discarded()) throw MalformedRecord("invalid JSON");
    if (!rec.is_object()) throw MalformedRecord("record is not an object");

    PoseFrame frame;

    auto it = rec.find("frame");
    if (it == rec.end() || !it->is_number_integer())
        throw MalformedRecord("missing or non-integer \"frame\"");
    if (it->is_number_unsigned()) {
        const auto u = it->get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(INT64_MAX)) throw MalformedRecord("\"frame\" out of range");
        frame.frame_index = static_cast<std::int64_t>(u);
    } else {
        frame.frame_index = it->get<std::int64_t>();
    }
    if (frame.frame_index < 0) throw MalformedRecord("negative \"frame\"");

    it = rec.find("t");
    if (it == rec.end()) throw MalformedRecord("missing \"t\"");
    frame.timestamp_s = detail::finite_number(*it, "\"t\"");
    if (frame.timestamp_s < 0.0) throw MalformedRecord("negative \"t\"");

    bool present = true;
    it = rec.find("present");
    if (it != rec.end()) {
        if (!it->is_boolean()) throw MalformedRecord("\"present\" is not a boolean");
        present = it->get<bool>();
    }

    it = rec.find("landmarks");
    if (it == rec.end() || !it->is_array()) throw MalformedRecord("missing \"landmarks\" array");
    if (it->size() != kLandmarkCount)
        throw MalformedRecord("expected 33 landmarks, got " + std::to_string(it->size()));

    bool all_zero = true;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        const auto& q = (*it)[i];
        if (!q.is_array() || q.size() != 4)
            throw MalformedRecord("landmark " + std::to_string(i) + " is not [x,y,z,visibility]");
        Landmark& lm = frame.landmarks[i];
        lm.x = detail::finite_number(q[0], "x");
        lm.y = detail::finite_number(q[1], "y");
        lm.z = detail::finite_number(q[2], "z");
        lm.visibility = detail::finite_number(q[3], "visibility");
        if (lm.visibility < 0.0 || lm.visibility > 1.0)
            throw MalformedRecord("visibility outside [0,1] at landmark " + std::to_string(i));
        all_zero = all_zero && lm.x == 0.0 && lm.y == 0.0 && lm.z == 0.0 && lm.visibility == 0.0;
    }

    frame.person_present = present && !all_zero;
    if (!frame.person_present) frame.landmarks.fill(Landmark{});
    return frame;
}

/// Serializes a frame as one JSONL record (no trailing newline).
/// Doubles are written with shortest round-trip precision.
inline std::string write_frame_line(const PoseFrame& frame) {
    nlohmann::ordered_json rec;
    rec["frame"] = frame.frame_index;
    rec["t"] = frame.timestamp_s;
    rec["present"] = frame.person_present;
    auto& lms = rec["landmarks"] = nlohmann::ordered_json::array();
    for (const Landmark& lm : frame.landmarks) {
        if (frame.person_present)
            lms.push_back({lm.x, lm.y, lm.z, lm.visibility});
        else
            lms.push_back({0, 0, 0, 0});
    }
    return rec.dump();
}

// ---------------------------------------------------------------------------
// Stream reader

/// Pulls frames one line at a time and enforces stream ordering.
/// Blank lines are skipped. Memory use is independent of stream length.
class StreamReader {
public:
    explicit StreamReader(std::istream& in) : in_(&in) {}

    std::optional<PoseFrame> next() {
        while (std::getline(*in_, line_)) {
            ++line_no_;
            if (line_.find_first_not_of(" \t\r") == std::string::npos) continue;
            PoseFrame f;
            try {
                f = parse_frame_line(line_);
            } catch (const MalformedRecord& e) {
                throw MalformedRecord(e.what(), line_no_);
            }
            if (last_) {
                if (f.frame_index <= last_->first)
                    throw OrderViolation("frame index " + std::to_string(f.frame_index) +
                                             " does not follow " + std::to_string(last_->first),
                                         line_no_);
                if (f.timestamp_s < last_->second)
                    throw OrderViolation("timestamp regression", line_no_);
            }
            last_ = {f.frame_index, f.timestamp_s};
            return f;
        }
        if (in_->bad()) throw StreamUnreadable("read error after line " + std::to_string(line_no_));
        return std::nullopt;
    }

    std::size_t line_number() const { return line_no_; }

private:
    std::istream* in_;
    std::string line_;
    std::size_t line_no_ = 0;
    std::optional<std::pair<std::int64_t, double>> last_;
};

inline std::vector<PoseFrame> read_stream(std::istream& in) {
    std::vector<PoseFrame> frames;
    StreamReader reader(in);
    while (auto f = reader.next()) frames.push_back(*f);
    return frames;
}

inline std::vector<PoseFrame> read_stream_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StreamUnreadable("cannot open stream " + path.string());
    return read_stream(in);
}

// ---------------------------------------------------------------------------
// Manifest

/// Reads a JSON manifest array. Relative stream paths resolve against the
/// manifest's directory.
inline std::vector<ClipManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StreamUnreadable("cannot open manifest " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw StreamUnreadable("manifest is not valid JSON: " + path.string());
    if (!doc.is_array()) throw ManifestError("manifest must be a JSON array");

    const auto base = path.parent_path();
    std::vector<ClipManifestEntry> entries;
    entries.reserve(doc.size());
    for (const auto& item : doc) {
        if (!item.is_object()) throw ManifestError("manifest entry is not an object");
        ClipManifestEntry e;
        if (!item.contains("clip_id") || !item["clip_id"].is_string())
            throw ManifestError("manifest entry missing string \"clip_id\"");
        e.clip_id = item["clip_id"].get<std::string>();
        if (item.contains("path")) {
            if (!item["path"].is_string()) throw ManifestError("\"path\" must be a string");
            std::filesystem::path p = item["path"].get<std::string>();
            e.stream_path = p.is_relative() ? base / p : p;
        }
        if (!item.contains("label") || !item["label"].is_string())
            throw ManifestError("clip " + e.clip_id + ": missing \"label\"");
        auto label = parse_clip_label(item["label"].get<std::string>());
        if (!label) throw ManifestError("clip " + e.clip_id + ": label must be FALL or ADL");
        e.label = *label;
        if (item.contains("fps")) {
            if (!item["fps"].is_number()) throw ManifestError("clip " + e.clip_id + ": fps must be a number");
            e.fps = item["fps"].get<double>();
        }
        if (!(e.fps > 0.0) || !std::isfinite(e.fps))
            throw ManifestError("clip " + e.clip_id + ": fps must be positive");
        entries.push_back(std::move(e));
    }
    return entries;
}

inline std::string write_manifest(const std::vector<ClipManifestEntry>& entries) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
        nlohmann::ordered_json item;
        item["clip_id"] = e.clip_id;
        item["path"] = e.stream_path.generic_string();
        item["label"] = std::string(to_string(e.label));
        item["fps"] = e.fps;
        doc.push_back(std::move(item));
    }
    return doc.dump(2);
}

}  // namespace falldet
