#pragma once

// Command-line front end: detect, evaluate, sweep.
//
// Exit codes: 0 ok, 2 I/O or malformed stream, 3 config, 4 manifest.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config_file.hpp"
#include "detector.hpp"
#include "evaluation.hpp"
#include "pose_stream.hpp"

namespace falldet::cli {

enum ExitCode : int {
    kOk = 0,
    kIoError = 2,
    kConfigError = 3,
    kManifestError = 4,
};

struct ExitError {
    int code;
    std::string message;
};

inline DetectorConfig config_or_default(const std::string& path) {
    if (path.empty()) return {};
    try {
        return load_config(path);
    } catch (const ConfigUnreadable& e) {
        throw ExitError{kIoError, e.what()};
    } catch (const ConfigError& e) {
        throw ExitError{kConfigError, std::string("invalid config: ") + e.what()};
    }
}

inline std::vector<ClipManifestEntry> manifest_or_fail(const std::string& path) {
    std::vector<ClipManifestEntry> manifest;
    try {
        manifest = read_manifest(path);
    } catch (const StreamUnreadable& e) {
        throw ExitError{kIoError, e.what()};
    } catch (const ManifestError& e) {
        throw ExitError{kManifestError, e.what()};
    }
    try {
        (void)confusion({}, manifest);  // rejects duplicate clip ids
    } catch (const DuplicateClip& e) {
        throw ExitError{kManifestError, e.what()};
    }
    return manifest;
}

inline std::vector<PoseFrame> load_clip(const ClipManifestEntry& entry) {
    try {
        return read_stream_file(entry.stream_path);
    } catch (const std::runtime_error& e) {
        throw ExitError{kIoError, "clip " + entry.clip_id + ": " + e.what()};
    }
}

// ---------------------------------------------------------------------------

inline int detect_cmd(std::istream& in, const DetectorConfig& cfg, std::ostream& out, std::ostream& err) {
    Detector det(cfg);
    StreamReader reader(in);
    std::size_t events = 0;
    std::size_t frames = 0;
    try {
        while (auto f = reader.next()) {
            ++frames;
            if (auto o = det.update(*f); o.event) {
                ++events;
                out << event_json_line(*o.event) << std::endl;
            }
        }
    } catch (const std::runtime_error& e) {
        err << "detect: " << e.what() << "\n";
        return kIoError;
    }
    err << "detect: " << events << " event(s) over " << frames << " frame(s)\n";
    return kOk;
}

inline int evaluate_cmd(const std::string& manifest_path, const DetectorConfig& cfg, const std::string& report_path,
                        const std::string& replay_path, std::ostream& out) {
    const auto manifest = manifest_or_fail(manifest_path);

    std::vector<ClipPrediction> preds;
    if (!replay_path.empty()) {
        std::ifstream in(replay_path);
        if (!in) throw ExitError{kIoError, "cannot open replay file " + replay_path};
        try {
            preds = read_replay(in);
        } catch (const ManifestError& e) {
            throw ExitError{kManifestError, e.what()};
        }
    } else {
        preds.reserve(manifest.size());
        for (const auto& entry : manifest)
            preds.push_back(make_prediction(entry.clip_id, run_stream(load_clip(entry), cfg)));
    }

    ConfusionMatrix m;
    try {
        m = confusion(preds, manifest);
    } catch (const std::runtime_error& e) {
        throw ExitError{kManifestError, e.what()};
    }
    const auto report = compute_metrics(m);
    out << render_report(report, m);

    if (!report_path.empty()) {
        std::ofstream rf(report_path);
        if (!rf) throw ExitError{kIoError, "cannot write report " + report_path};
        rf << metrics_json(report, m).dump(2) << "\n";
        if (!rf) throw ExitError{kIoError, "cannot write report " + report_path};
    }
    return kOk;
}

/// CSV with one row per grid point: axis values, confusion counts, metrics.
inline int sweep_cmd(const std::string& manifest_path, const std::string& grid_spec, const DetectorConfig& base,
                     std::ostream& out) {
    std::vector<GridPoint> points;
    std::vector<GridAxis> axes;
    try {
        axes = parse_grid(grid_spec);
        points = expand_grid(axes, base);
    } catch (const ConfigError& e) {
        throw ExitError{kConfigError, e.what()};
    }

    const auto manifest = manifest_or_fail(manifest_path);
    std::vector<std::vector<PoseFrame>> clips;
    clips.reserve(manifest.size());
    for (const auto& entry : manifest) clips.push_back(load_clip(entry));

    for (const auto& axis : axes) out << axis.key << ",";
    out << "tp,fn,fp,tn,accuracy,precision,recall,specificity,f1\n";
    for (const auto& p : points) {
        ConfusionMatrix m;
        for (std::size_t i = 0; i < manifest.size(); ++i)
            tally(m, manifest[i].label, run_stream(clips[i], p.config).empty() ? ClipLabel::Adl : ClipLabel::Fall);
        const auto r = compute_metrics(m);
        for (const auto& t : p.tokens) out << t << ",";
        out << m.tp << "," << m.fn << "," << m.fp << "," << m.tn << "," << format_metric(r.accuracy) << ","
            << format_metric(r.precision) << "," << format_metric(r.recall) << ","
            << format_metric(r.specificity) << "," << format_metric(r.f1) << "\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pose-landmark fall detection: detect, evaluate, sweep"};
    app.require_subcommand(1);

    std::string input, config_path, manifest_path, report_path, replay_path, grid_spec;

    auto* detect = app.add_subcommand("detect", "Run the detector over a landmark stream (JSONL)");
    detect->add_option("--input", input, "Landmark stream path, or - for standard input")->required();
    detect->add_option("--config", config_path, "Detector config file (key = value)");

    auto* evaluate = app.add_subcommand("evaluate", "Score a labeled clip manifest");
    evaluate->add_option("--manifest", manifest_path, "Manifest JSON")->required();
    evaluate->add_option("--config", config_path, "Detector config file");
    evaluate->add_option("--report", report_path, "Write metrics JSON here");
    evaluate->add_option("--replay", replay_path, "Precomputed clip predictions (JSON) instead of running detection");

    auto* sweep = app.add_subcommand("sweep", "Evaluate a manifest over a parameter grid, CSV to stdout");
    sweep->add_option("--manifest", manifest_path, "Manifest JSON")->required();
    sweep->add_option("--grid", grid_spec, "Grid spec, e.g. vote_threshold=3,4,5;buffer_len=10,20")->required();
    sweep->add_option("--config", config_path, "Base detector config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        const DetectorConfig cfg = config_or_default(config_path);
        if (*detect) {
            if (input == "-") return detect_cmd(in, cfg, out, err);
            std::ifstream file(input);
            if (!file) {
                err << "detect: cannot open " << input << "\n";
                return kIoError;
            }
            return detect_cmd(file, cfg, out, err);
        }
        if (*evaluate) return evaluate_cmd(manifest_path, cfg, report_path, replay_path, out);
        if (*sweep) return sweep_cmd(manifest_path, grid_spec, cfg, out);
    } catch (const ExitError& e) {
        err << app.get_subcommands().front()->get_name() << ": " << e.message << "\n";
        return e.code;
    }
    return kOk;
}

}  // namespace falldet::cli
