#pragma once

// Clip-level scoring: predictions, confusion matrix, and the derived metrics.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "detector.hpp"
#include "json.hpp"
#include "pose_stream.hpp"

namespace falldet {

class UnknownClip : public std::runtime_error {
public:
    explicit UnknownClip(const std::string& id) : std::runtime_error("unknown clip_id: " + id) {}
};

class DuplicateClip : public std::runtime_error {
public:
    explicit DuplicateClip(const std::string& id) : std::runtime_error("duplicate clip_id: " + id) {}
};

struct ClipPrediction {
    std::string clip_id;
    ClipLabel predicted = ClipLabel::Adl;
    std::vector<FallEvent> events;
};

inline ClipPrediction make_prediction(std::string clip_id, std::vector<FallEvent> events) {
    ClipPrediction p;
    p.clip_id = std::move(clip_id);
    p.predicted = events.empty() ? ClipLabel::Adl : ClipLabel::Fall;
    p.events = std::move(events);
    return p;
}

inline ClipPrediction predict_clip(const ClipManifestEntry& entry, const DetectorConfig& cfg) {
    const auto frames = read_stream_file(entry.stream_path);
    return make_prediction(entry.clip_id, run_stream(frames, cfg));
}

struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fn = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fn + fp + tn; }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        tp += o.tp;
        fn += o.fn;
        fp += o.fp;
        tn += o.tn;
        return *this;
    }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline void tally(ConfusionMatrix& m, ClipLabel truth, ClipLabel predicted) {
    const bool pos = truth == ClipLabel::Fall;
    const bool hit = predicted == ClipLabel::Fall;
    if (pos && hit) ++m.tp;
    else if (pos) ++m.fn;
    else if (hit) ++m.fp;
    else ++m.tn;
}

/// Tallies predictions against manifest labels, FALL as the positive class.
inline ConfusionMatrix confusion(const std::vector<ClipPrediction>& preds,
                                 const std::vector<ClipManifestEntry>& manifest) {
    std::unordered_map<std::string, ClipLabel> labels;
    labels.reserve(manifest.size());
    for (const auto& e : manifest)
        if (!labels.emplace(e.clip_id, e.label).second) throw DuplicateClip(e.clip_id);

    std::unordered_set<std::string> seen;
    ConfusionMatrix m;
    for (const auto& p : preds) {
        auto it = labels.find(p.clip_id);
        if (it == labels.end()) throw UnknownClip(p.clip_id);
        if (!seen.insert(p.clip_id).second) throw DuplicateClip(p.clip_id);
        tally(m, it->second, p.predicted);
    }
    return m;
}

struct MetricsReport {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> specificity;
    std::optional<double> f1;
};

inline MetricsReport compute_metrics(const ConfusionMatrix& m) {
    auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    MetricsReport r;
    r.accuracy = ratio(m.tp + m.tn, m.total());
    r.precision = ratio(m.tp, m.tp + m.fp);
    r.recall = ratio(m.tp, m.tp + m.fn);
    r.specificity = ratio(m.tn, m.tn + m.fp);
    if (r.precision && r.recall && *r.precision + *r.recall > 0.0)
        r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
    return r;
}

// ---------------------------------------------------------------------------
// Rendering

inline double round4(double v) { return std::round(v * 1e4) / 1e4; }

/// {"tp":..,"fn":..,"fp":..,"tn":..,"accuracy":..,...} with 4-decimal rounding.
inline nlohmann::ordered_json metrics_json(const MetricsReport& r, const ConfusionMatrix& m) {
    nlohmann::ordered_json j;
    j["tp"] = m.tp;
    j["fn"] = m.fn;
    j["fp"] = m.fp;
    j["tn"] = m.tn;
    auto put = [&j](const char* key, const std::optional<double>& v) {
        if (v) j[key] = round4(*v);
        else j[key] = nullptr;
    };
    put("accuracy", r.accuracy);
    put("precision", r.precision);
    put("recall", r.recall);
    put("specificity", r.specificity);
    put("f1", r.f1);
    return j;
}

inline std::string render_json(const MetricsReport& r, const ConfusionMatrix& m) {
    return metrics_json(r, m).dump();
}

inline std::string format_metric(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", round4(*v));
    return buf;
}

/// Human-readable report; the JSON form follows on the last line.
inline std::string render_report(const MetricsReport& r, const ConfusionMatrix& m) {
    std::ostringstream os;
    os << "clips: " << m.total() << "\n"
       << "confusion (positive = FALL)\n"
       << "                 pred FALL  pred ADL\n";
    char row[96];
    std::snprintf(row, sizeof row, "  actual FALL   %10llu %9llu\n", static_cast<unsigned long long>(m.tp),
                  static_cast<unsigned long long>(m.fn));
    os << row;
    std::snprintf(row, sizeof row, "  actual ADL    %10llu %9llu\n", static_cast<unsigned long long>(m.fp),
                  static_cast<unsigned long long>(m.tn));
    os << row;
    os << "accuracy     " << format_metric(r.accuracy) << "\n"
       << "precision    " << format_metric(r.precision) << "\n"
       << "recall       " << format_metric(r.recall) << "\n"
       << "specificity  " << format_metric(r.specificity) << "\n"
       << "f1           " << format_metric(r.f1) << "\n"
       << render_json(r, m) << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Replay predictions

/// Reads precomputed predictions: a JSON array of {"clip_id": .., "predicted": "FALL"|"ADL"}.
inline std::vector<ClipPrediction> read_replay(std::istream& in) {
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_array()) throw ManifestError("replay file must be a JSON array");
    std::vector<ClipPrediction> preds;
    preds.reserve(doc.size());
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("clip_id") || !item["clip_id"].is_string() ||
            !item.contains("predicted") || !item["predicted"].is_string())
            throw ManifestError("replay entry needs string clip_id and predicted");
        auto label = parse_clip_label(item["predicted"].get<std::string>());
        if (!label) throw ManifestError("replay predicted must be FALL or ADL");
        ClipPrediction p;
        p.clip_id = item["clip_id"].get<std::string>();
        p.predicted = *label;
        preds.push_back(std::move(p));
    }
    return preds;
}

inline std::string write_replay(const std::vector<ClipPrediction>& preds) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& p : preds) {
        nlohmann::ordered_json item;
        item["clip_id"] = p.clip_id;
        item["predicted"] = std::string(to_string(p.predicted));
        doc.push_back(std::move(item));
    }
    return doc.dump();
}

}  // namespace falldet
