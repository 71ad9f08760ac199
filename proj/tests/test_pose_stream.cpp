#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "falldet/pose_stream.hpp"
#include "support/frames.hpp"

using namespace falldet;

namespace {

std::string record(int frame, double t, int count, bool present = true, double vis = 0.9) {
    std::ostringstream os;
    os << R"({"frame":)" << frame << R"(,"t":)" << t << R"(,"present":)" << (present ? "true" : "false")
       << R"(,"landmarks":[)";
    for (int i = 0; i < count; ++i) os << (i ? "," : "") << "[0.5," << 0.01 * i << ",0.0," << vis << "]";
    os << "]}";
    return os.str();
}

PoseFrame random_frame(std::mt19937_64& rng, std::int64_t index, double t) {
    std::uniform_real_distribution<double> coord(-0.2, 1.2);
    std::uniform_real_distribution<double> vis(0.0, 1.0);
    PoseFrame f;
    f.frame_index = index;
    f.timestamp_s = t;
    f.person_present = true;
    for (auto& lm : f.landmarks) lm = {coord(rng), coord(rng), coord(rng) - 0.5, vis(rng)};
    return f;
}

}  // namespace

TEST(ParseFrameLine, WellFormedRecord) {
    const auto f = parse_frame_line(record(0, 0.0, 33));
    EXPECT_EQ(f.frame_index, 0);
    EXPECT_EQ(f.timestamp_s, 0.0);
    EXPECT_TRUE(f.person_present);
    EXPECT_DOUBLE_EQ(f.landmarks[32].y, 0.32);
    EXPECT_DOUBLE_EQ(f[LandmarkIndex::Nose].visibility, 0.9);
}

TEST(ParseFrameLine, WrongLandmarkCountIsMalformed) {
    EXPECT_THROW(parse_frame_line(record(0, 0.0, 32)), MalformedRecord);
    EXPECT_THROW(parse_frame_line(record(0, 0.0, 34)), MalformedRecord);
}

TEST(ParseFrameLine, PresentFalseZeroesLandmarks) {
    const auto f = parse_frame_line(record(4, 0.5, 33, false));
    EXPECT_FALSE(f.person_present);
    for (const auto& lm : f.landmarks) {
        EXPECT_EQ(lm.visibility, 0.0);
        EXPECT_EQ(lm.x, 0.0);
    }
}

TEST(ParseFrameLine, AllZeroSentinelMeansAbsent) {
    std::string line = R"({"frame":1,"t":0.1,"landmarks":[)";
    for (int i = 0; i < 33; ++i) line += std::string(i ? "," : "") + "[0,0,0,0]";
    line += "]}";
    EXPECT_FALSE(parse_frame_line(line).person_present);
}

TEST(ParseFrameLine, RejectsSchemaViolations) {
    const std::string lms = record(0, 0.0, 33).substr(record(0, 0.0, 33).find(R"("landmarks")"));
    for (const std::string& bad : {
             std::string("not json"),
             std::string("[1,2,3]"),
             std::string(R"({"t":0,)") + lms,
             std::string(R"({"frame":1.5,"t":0,)") + lms,
             std::string(R"({"frame":-1,"t":0,)") + lms,
             std::string(R"({"frame":0,"t":-0.1,)") + lms,
             std::string(R"({"frame":0,"t":"x",)") + lms,
             std::string(R"({"frame":0,"t":1e999,)") + lms,
             std::string(R"({"frame":0,"t":0,"present":1,)") + lms,
             std::string(R"({"frame":0,"t":0})"),
         }) {
        EXPECT_THROW(parse_frame_line(bad), MalformedRecord) << bad;
    }
    EXPECT_THROW(parse_frame_line(record(0, 0.0, 33, true, 1.5)), MalformedRecord);
    auto three = record(0, 0.0, 33);
    three.replace(three.find("[0.5,0,0.0,0.9]"), 15, "[0.5,0,0.9]");
    EXPECT_THROW(parse_frame_line(three), MalformedRecord);
}

TEST(ParseFrameLine, ArbitraryBytesNeverCrash) {
    std::mt19937_64 rng(7);
    const std::string valid = record(3, 0.1, 33);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int trial = 0; trial < 3000; ++trial) {
        std::string s = valid;
        const int edits = 1 + trial % 8;
        for (int e = 0; e < edits; ++e) {
            std::uniform_int_distribution<std::size_t> pos(0, s.size() - 1);
            switch (trial % 3) {
                case 0: s[pos(rng)] = static_cast<char>(byte(rng)); break;
                case 1: s.erase(pos(rng), 1); break;
                default: s.insert(pos(rng), 1, "0123456789-.e,[]{}\""[byte(rng) % 19]); break;
            }
        }
        try {
            const auto f = parse_frame_line(s);
            EXPECT_GE(f.frame_index, 0);
            EXPECT_GE(f.timestamp_s, 0.0);
        } catch (const MalformedRecord&) {
        }
    }
    for (int trial = 0; trial < 500; ++trial) {
        std::string s(trial % 64, '\0');
        for (char& c : s) c = static_cast<char>(byte(rng));
        try {
            (void)parse_frame_line(s);
        } catch (const MalformedRecord&) {
        }
    }
}

TEST(WriteFrameLine, AbsentFrameCarriesPresentFalse) {
    const auto line = write_frame_line(absent_frame(9, 0.3));
    EXPECT_NE(line.find(R"("present":false)"), std::string::npos);
    const auto back = parse_frame_line(line);
    EXPECT_FALSE(back.person_present);
    EXPECT_EQ(back.frame_index, 9);
}

TEST(WriteFrameLine, PreservesNineSignificantDigits) {
    auto f = test::standing_frame(0);
    f.landmarks[5].x = 0.123456789;
    const auto line = write_frame_line(f);
    EXPECT_NE(line.find("0.123456789"), std::string::npos);
    EXPECT_EQ(parse_frame_line(line).landmarks[5].x, 0.123456789);
}

TEST(WriteFrameLine, RoundTripProperty) {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 200; ++i) {
        const auto f = random_frame(rng, i, i / 30.0);
        const auto g = parse_frame_line(write_frame_line(f));
        ASSERT_EQ(g.frame_index, f.frame_index);
        ASSERT_NEAR(g.timestamp_s, f.timestamp_s, 1e-9);
        ASSERT_EQ(g.person_present, f.person_present);
        for (std::size_t k = 0; k < kLandmarkCount; ++k) {
            ASSERT_NEAR(g.landmarks[k].x, f.landmarks[k].x, 1e-9);
            ASSERT_NEAR(g.landmarks[k].y, f.landmarks[k].y, 1e-9);
            ASSERT_NEAR(g.landmarks[k].z, f.landmarks[k].z, 1e-9);
            ASSERT_NEAR(g.landmarks[k].visibility, f.landmarks[k].visibility, 1e-9);
        }
    }
}

TEST(ReadStream, EmptySource) {
    std::istringstream in("");
    EXPECT_TRUE(read_stream(in).empty());
}

TEST(ReadStream, InOrderRecordsWithBlankLines) {
    std::istringstream in(record(0, 0.0, 33) + "\n\n" + record(1, 0.033, 33) + "\r\n" + record(2, 0.066, 33));
    const auto frames = read_stream(in);
    ASSERT_EQ(frames.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(frames[i].frame_index, static_cast<std::int64_t>(i));
}

TEST(ReadStream, FrameIndexRegressionAtThirdRecord) {
    std::istringstream in(record(0, 0.0, 33) + "\n" + record(2, 0.1, 33) + "\n" + record(1, 0.2, 33) + "\n");
    try {
        (void)read_stream(in);
        FAIL() << "expected OrderViolation";
    } catch (const OrderViolation& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(ReadStream, RepeatedIndexAndTimestampRegression) {
    std::istringstream dup(record(0, 0.0, 33) + "\n" + record(0, 0.1, 33) + "\n");
    EXPECT_THROW((void)read_stream(dup), OrderViolation);
    std::istringstream back(record(0, 0.5, 33) + "\n" + record(1, 0.4, 33) + "\n");
    EXPECT_THROW((void)read_stream(back), OrderViolation);
    std::istringstream equal_t(record(0, 0.5, 33) + "\n" + record(1, 0.5, 33) + "\n");
    EXPECT_EQ(read_stream(equal_t).size(), 2u);
}

TEST(ReadStream, MalformedRecordReportsLine) {
    std::istringstream in(record(0, 0.0, 33) + "\n" + record(1, 0.1, 31) + "\n");
    try {
        (void)read_stream(in);
        FAIL() << "expected MalformedRecord";
    } catch (const MalformedRecord& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(ReadStream, OutputSatisfiesFrameInvariants) {
    std::mt19937_64 rng(11);
    std::ostringstream os;
    double t = 0.0;
    for (int i = 0; i < 50; ++i) {
        t += (i % 5 == 0) ? 0.0 : 1.0 / 30.0;
        os << write_frame_line(i % 7 == 0 ? absent_frame(i * 2, t) : random_frame(rng, i * 2, t)) << "\n";
    }
    std::istringstream in(os.str());
    const auto frames = read_stream(in);
    ASSERT_EQ(frames.size(), 50u);
    for (std::size_t i = 1; i < frames.size(); ++i) {
        EXPECT_GT(frames[i].frame_index, frames[i - 1].frame_index);
        EXPECT_GE(frames[i].timestamp_s, frames[i - 1].timestamp_s);
    }
}

TEST(Manifest, ReadsEntriesAndResolvesRelativePaths) {
    const auto dir = std::filesystem::temp_directory_path() / "falldet_manifest_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "m.json") << R"([{"clip_id":"a","path":"a.jsonl","label":"FALL","fps":30},
                                        {"clip_id":"b","path":"/abs/b.jsonl","label":"ADL","fps":25.0}])";
    const auto m = read_manifest(dir / "m.json");
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m[0].stream_path, dir / "a.jsonl");
    EXPECT_EQ(m[0].label, ClipLabel::Fall);
    EXPECT_EQ(m[1].stream_path, std::filesystem::path("/abs/b.jsonl"));
    EXPECT_EQ(m[1].fps, 25.0);

    std::ofstream(dir / "bad_label.json") << R"([{"clip_id":"a","path":"a","label":"fall","fps":30}])";
    EXPECT_THROW(read_manifest(dir / "bad_label.json"), ManifestError);
    std::ofstream(dir / "bad_fps.json") << R"([{"clip_id":"a","path":"a","label":"ADL","fps":0}])";
    EXPECT_THROW(read_manifest(dir / "bad_fps.json"), ManifestError);
    EXPECT_THROW(read_manifest(dir / "missing.json"), StreamUnreadable);
    std::filesystem::remove_all(dir);
}
