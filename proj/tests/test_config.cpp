#include <gtest/gtest.h>

#include "falldet/config_file.hpp"

using namespace falldet;

TEST(ParseConfig, EmptyTextGivesDefaults) {
    const auto cfg = parse_config("# nothing here\n\n");
    EXPECT_EQ(cfg.buffer_len, 20);
    EXPECT_EQ(cfg.vote_threshold, 4.0);
    EXPECT_EQ(cfg.height_ratio_max, 0.5);
}

TEST(ParseConfig, EveryKey) {
    const auto cfg = parse_config(R"(
height_ratio_max = 0.45
angle_low_deg = 55
angle_high_deg = 125   # widened
knee_ankle_max = 0.12
head_floor_max = 0.2
speed_min = 1.5
visibility_min = 0.6
buffer_len = 30
persistence_fraction = 0.4
weights = 2, 2, 1, 1.5, 1, 0.5
vote_threshold = 5
cooldown_frames = 90
warmup_frames = 12
)");
    EXPECT_EQ(cfg.height_ratio_max, 0.45);
    EXPECT_EQ(cfg.angle_low_deg, 55.0);
    EXPECT_EQ(cfg.angle_high_deg, 125.0);
    EXPECT_EQ(cfg.knee_ankle_max, 0.12);
    EXPECT_EQ(cfg.head_floor_max, 0.2);
    EXPECT_EQ(cfg.speed_min, 1.5);
    EXPECT_EQ(cfg.visibility_min, 0.6);
    EXPECT_EQ(cfg.buffer_len, 30);
    EXPECT_EQ(cfg.persistence_fraction, 0.4);
    EXPECT_EQ(cfg.weights, (std::array<double, 6>{2, 2, 1, 1.5, 1, 0.5}));
    EXPECT_EQ(cfg.vote_threshold, 5.0);
    EXPECT_EQ(cfg.cooldown_frames, 90);
    EXPECT_EQ(cfg.warmup_frames, 12);
    EXPECT_EQ(cfg.required_firings(), 12);
}

TEST(ParseConfig, RoundTripsThroughWriter) {
    DetectorConfig cfg;
    cfg.weights = {2, 2, 1, 1, 1, 1};
    cfg.persistence_fraction = 0.35;
    cfg.speed_min = 0.1 + 0.2;
    const auto back = parse_config(write_config(cfg));
    EXPECT_EQ(back.weights, cfg.weights);
    EXPECT_EQ(back.persistence_fraction, cfg.persistence_fraction);
    EXPECT_EQ(back.speed_min, cfg.speed_min);
}

TEST(ParseConfig, Rejections) {
    EXPECT_THROW(parse_config("persistence_fraction = 0"), ConfigError);
    EXPECT_THROW(parse_config("bogus_key = 1"), ConfigError);
    EXPECT_THROW(parse_config("buffer_len = 2.5"), ConfigError);
    EXPECT_THROW(parse_config("buffer_len"), ConfigError);
    EXPECT_THROW(parse_config("speed_min = fast"), ConfigError);
    EXPECT_THROW(parse_config("weights = 1 1 1"), ConfigError);
    EXPECT_THROW(parse_config("vote_threshold = 7"), ConfigError);
    EXPECT_THROW(parse_config("weights = 0,0,0,0,0,0"), ConfigError);
}

TEST(Grid, LexicographicExpansion) {
    const auto axes = parse_grid("vote_threshold=5,3,4; buffer_len=20,10");
    ASSERT_EQ(axes.size(), 2u);
    EXPECT_EQ(axes[0].values.front().second, "3");
    const auto points = expand_grid(axes, DetectorConfig{});
    ASSERT_EQ(points.size(), 6u);
    const std::vector<std::vector<std::string>> expected = {
        {"3", "10"}, {"3", "20"}, {"4", "10"}, {"4", "20"}, {"5", "10"}, {"5", "20"}};
    for (std::size_t i = 0; i < points.size(); ++i) EXPECT_EQ(points[i].tokens, expected[i]);
    EXPECT_EQ(points[3].config.vote_threshold, 4.0);
    EXPECT_EQ(points[3].config.buffer_len, 20);
}

TEST(Grid, Rejections) {
    EXPECT_THROW(parse_grid(""), ConfigError);
    EXPECT_THROW(parse_grid(" ; "), ConfigError);
    EXPECT_THROW(parse_grid("threshold=1,2"), ConfigError);
    EXPECT_THROW(parse_grid("vote_threshold="), ConfigError);
    EXPECT_THROW(parse_grid("vote_threshold"), ConfigError);
    EXPECT_THROW(parse_grid("weights=1"), ConfigError);
    EXPECT_THROW(parse_grid("buffer_len=1;buffer_len=2"), ConfigError);
    EXPECT_THROW(expand_grid(parse_grid("vote_threshold=4,9"), DetectorConfig{}), ConfigError);
}
