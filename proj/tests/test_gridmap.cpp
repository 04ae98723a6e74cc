#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "mcslam/grid/map_io.hpp"
#include "mcslam/grid/occupancy_grid.hpp"
#include "mcslam/grid/ternary.hpp"
#include "mcslam/util/rng.hpp"

using namespace mcslam;
using namespace mcslam::grid;

namespace {

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "mcslam_gridmap_test";
    std::filesystem::create_directories(dir);
    return dir;
}

TernaryMap random_ternary(Rng& rng, int w, int h) {
    TernaryMap map(w, h, 0.05 + rng.uniform(), {rng.uniform(-5, 5), rng.uniform(-5, 5), 0.0});
    static const double levels[3] = {0.0, 0.5, 1.0};
    for (auto& v : map.values) {
        v = levels[rng.uniform_int(0, 2)];
    }
    return map;
}

}  // namespace

TEST_CASE("prob is the logistic of log-odds") {
    OccupancyGrid g(4, 3, 0.1);
    CHECK(prob(g, 0, 0) == 0.5);  // fresh cell, log-odds exactly 0

    g.add_log_odds(1, 1, kLogOddsMax);
    CHECK(prob(g, 1, 1) == doctest::Approx(0.9999546021312976).epsilon(1e-12));

    g.add_log_odds(2, 2, -kLogOddsMax);
    CHECK(prob(g, 2, 2) == doctest::Approx(4.5397868702434395e-05).epsilon(1e-12));

    CHECK_THROWS_AS(prob(g, 4, 0), std::out_of_range);
    CHECK_THROWS_AS(prob(g, 0, 3), std::out_of_range);
    CHECK_THROWS_AS(prob(g, -1, 0), std::out_of_range);
}

TEST_CASE("prob is strictly monotone in log-odds") {
    OccupancyGrid g(32, 1, 0.1);
    double prev = -1.0;
    for (int i = 0; i < 32; ++i) {
        g.add_log_odds(i, 0, -kLogOddsMax + i * (2.0 * kLogOddsMax / 31.0));
        const double p = prob(g, i, 0);
        CHECK(p > prev);
        prev = p;
    }
}

TEST_CASE("log-odds updates clamp at +/- L_MAX") {
    OccupancyGrid g(1, 1, 0.1);
    for (int i = 0; i < 100; ++i) g.add_log_odds(0, 0, 3.0);
    CHECK(g.log_odds(0, 0) == kLogOddsMax);
    for (int i = 0; i < 100; ++i) g.add_log_odds(0, 0, -3.0);
    CHECK(g.log_odds(0, 0) == -kLogOddsMax);
}

TEST_CASE("to_ternary maps probability branches to {1.0, 0.5, 0.0}") {
    OccupancyGrid g(3, 1, 0.1);
    g.add_log_odds(0, 0, 2.1972245773362196);   // p = 0.9
    g.add_log_odds(2, 0, -1.3862943611198906);  // p = 0.2
    const TernaryMap t = to_ternary(g);
    CHECK(t.at(0, 0) == 1.0);
    CHECK(t.at(1, 0) == 0.5);  // untouched, p = 0.5 exactly
    CHECK(t.at(2, 0) == 0.0);
}

TEST_CASE("to_mask marks exactly the unsearched cells") {
    OccupancyGrid g(3, 1, 0.1);
    g.add_log_odds(0, 0, 2.1972245773362196);  // p = 0.9 -> searched
    const MaskImage m = to_mask(g);
    CHECK(m.values[0] == 0.0);
    CHECK(m.values[1] == 1.0);
    CHECK(m.values[2] == 1.0);

    OccupancyGrid fresh(8, 8, 0.1);
    for (double v : to_mask(fresh).values) CHECK(v == 1.0);
}

TEST_CASE("mask=1 iff ternary=0.5, over random grids") {
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        OccupancyGrid g(16, 16, 0.1);
        for (auto& c : g.cells()) {
            const int k = static_cast<int>(rng.uniform_int(0, 2));
            c = (k == 0) ? 0.0 : rng.uniform(-kLogOddsMax, kLogOddsMax);
        }
        const TernaryMap t = to_ternary(g);
        const MaskImage m = to_mask(g);
        for (std::size_t i = 0; i < t.values.size(); ++i) {
            CHECK((m.values[i] == 1.0) == (t.values[i] == 0.5));
        }
    }
}

TEST_CASE("discretize_output branch table") {
    auto one = [](double img, double msk) {
        return discretize_output({img}, {msk}, 1, 1).values[0];
    };
    CHECK(one(0.8, 0.3) == 1.0);
    CHECK(one(0.1, 0.7) == 0.5);
    CHECK(one(0.2, 0.3) == 0.0);
    // >= convention on both channels
    CHECK(one(0.5, 0.0) == 1.0);
    CHECK(one(0.0, 0.5) == 0.5);

    CHECK_THROWS_AS(discretize_output({0.1, 0.2}, {0.1}, 2, 1), std::invalid_argument);
}

TEST_CASE("discretize_output inverts the exact channel encoding of ternary maps") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const TernaryMap t = random_ternary(rng, 9, 5);
        std::vector<double> image = t.values;
        std::vector<double> mask(t.values.size());
        for (std::size_t i = 0; i < mask.size(); ++i) {
            mask[i] = (t.values[i] == 0.5) ? 1.0 : 0.0;
        }
        const TernaryMap back = discretize_output(image, mask, t.width, t.height);
        CHECK(back.values == t.values);
    }
}

TEST_CASE("save encodes the fixed codebook") {
    const auto dir = temp_dir();
    TernaryMap t(2, 2);
    t.at(0, 0) = 1.0;
    t.at(1, 0) = 0.5;
    t.at(0, 1) = 0.0;
    t.at(1, 1) = 1.0;
    const std::string path = (dir / "codebook.pgm").string();
    save_ternary(t, path);

    std::ifstream in(path, std::ios::binary);
    std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    REQUIRE(contents.size() >= 4);
    const std::string raster = contents.substr(contents.size() - 4);
    CHECK(static_cast<unsigned char>(raster[0]) == 255);
    CHECK(static_cast<unsigned char>(raster[1]) == 128);
    CHECK(static_cast<unsigned char>(raster[2]) == 0);
    CHECK(static_cast<unsigned char>(raster[3]) == 255);
}

TEST_CASE("load rejects illegal pixels, naming the byte offset") {
    const auto dir = temp_dir();
    const std::string path = (dir / "bad.pgm").string();
    {
        std::ofstream out(path, std::ios::binary);
        out << "P5\n2 1\n255\n";
        const unsigned char raster[2] = {255, 7};
        out.write(reinterpret_cast<const char*>(raster), 2);
    }
    try {
        load_ternary(path);
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("illegal ternary pixel") != std::string::npos);
        CHECK(msg.find("byte offset") != std::string::npos);
    }
}

TEST_CASE("load rejects malformed headers and truncated rasters") {
    const auto dir = temp_dir();
    {
        const std::string path = (dir / "notpgm.pgm").string();
        std::ofstream(path) << "P2\n2 1\n255\n1 2";
        CHECK_THROWS_AS(load_ternary(path), std::runtime_error);
    }
    {
        const std::string path = (dir / "trunc.pgm").string();
        std::ofstream out(path, std::ios::binary);
        out << "P5\n4 4\n255\n";
        const unsigned char raster[3] = {0, 0, 0};
        out.write(reinterpret_cast<const char*>(raster), 3);
        out.close();
        CHECK_THROWS_AS(load_ternary(path), std::runtime_error);
    }
}

TEST_CASE("save/load round-trip is the identity on 1000 random maps") {
    const auto dir = temp_dir();
    const std::string path = (dir / "roundtrip.pgm").string();
    Rng rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        const int w = static_cast<int>(rng.uniform_int(1, 24));
        const int h = static_cast<int>(rng.uniform_int(1, 24));
        const TernaryMap t = random_ternary(rng, w, h);
        save_ternary(t, path);
        const TernaryMap back = load_ternary(path);
        REQUIRE(back.width == t.width);
        REQUIRE(back.height == t.height);
        CHECK(back.values == t.values);
        CHECK(back.resolution == t.resolution);
        CHECK(back.origin == t.origin);
    }
}
