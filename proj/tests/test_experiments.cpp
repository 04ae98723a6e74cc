#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "mcslam/eval/experiments.hpp"
#include "mcslam/eval/metrics.hpp"
#include "mcslam/sim/dataset.hpp"
#include "mcslam/util/image.hpp"

using namespace mcslam;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

std::filesystem::path fresh_dir(const char* name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

sim::DatasetBundle small_bundle() {
    sim::DatasetParams params;
    params.n_envs = 12;
    params.plan.min_width = 24;
    params.plan.max_width = 32;
    params.plan.min_height = 24;
    params.plan.max_height = 32;
    params.plan.min_rooms = 2;
    params.plan.max_rooms = 3;
    params.canvas_size = 64;
    return sim::make_dataset(params, 99);
}

const eval::ExperimentRow& find_row(const eval::ExperimentReport& rep, const std::string& env,
                                    const std::string& stage, const std::string& method) {
    for (const auto& r : rep.rows)
        if (r.env_id == env && r.stage == stage && r.method == method) return r;
    REQUIRE(false);
    return rep.rows.front();
}

}  // namespace

TEST_CASE("gray image codebook and stacking") {
    grid::TernaryMap m(3, 1);
    m.values = {0.0, 0.5, 1.0};
    const util::GrayImage img = util::ternary_to_gray(m);
    CHECK(img.width == 3);
    CHECK(img.height == 1);
    CHECK(img.pixels == std::vector<std::uint8_t>{0, 128, 255});

    util::GrayImage a(2, 2);
    a.pixels = {1, 2, 3, 4};
    util::GrayImage b(1, 2);
    b.pixels = {9, 8};
    const util::GrayImage s = util::hstack({a, b}, 1, 7);
    CHECK(s.width == 4);
    CHECK(s.height == 2);
    CHECK(s.pixels == std::vector<std::uint8_t>{1, 2, 7, 9, 3, 4, 7, 8});

    CHECK_THROWS_AS(util::hstack({}), std::invalid_argument);
    CHECK_THROWS_AS(util::hstack({a, util::GrayImage(1, 3)}), std::invalid_argument);
}

TEST_CASE("image files carry the right signatures") {
    const auto dir = fresh_dir("mcslam_test_img");
    util::GrayImage img(5, 3);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = std::uint8_t(i * 17);

    util::write_pgm_gray((dir / "x.pgm").string(), img);
    const std::string pgm = slurp(dir / "x.pgm");
    CHECK(pgm.substr(0, 2) == "P5");
    CHECK(pgm.find("5 3") != std::string::npos);
    CHECK(pgm.size() >= 15);
    /* raster is the last width*height bytes */
    CHECK(std::memcmp(pgm.data() + pgm.size() - 15, img.pixels.data(), 15) == 0);

    util::write_png_gray((dir / "x.png").string(), img);
    const std::string png = slurp(dir / "x.png");
    const std::string sig = "\x89PNG\r\n\x1a\n";
    CHECK(png.substr(0, 8) == sig);
    CHECK(png.find("IHDR") == 12);
    CHECK(png.find("IEND") == png.size() - 8);
    /* big-endian dimensions inside IHDR */
    CHECK(std::uint8_t(png[19]) == 5);
    CHECK(std::uint8_t(png[23]) == 3);
}

TEST_CASE("central free pose picks the innermost free cell") {
    sim::FloorPlan plan;
    plan.width = 5;
    plan.height = 5;
    plan.resolution = 0.1;
    plan.occupied.assign(25, 1);
    plan.occupied[1 * 5 + 1] = 0;   /* (1,1) */
    plan.occupied[2 * 5 + 3] = 0;   /* (3,2) nearer center */
    const grid::Pose2D p = eval::central_free_pose(plan);
    CHECK(int(p.x / plan.resolution) == 3);
    CHECK(int(p.y / plan.resolution) == 2);
    CHECK(p.theta == 0.0);

    plan.occupied.assign(25, 1);
    CHECK_THROWS_AS(eval::central_free_pose(plan), std::runtime_error);
}

TEST_CASE("experiment 1 bookkeeping and raw-row identity") {
    const sim::DatasetBundle data = small_bundle();
    REQUIRE(data.test.entries.size() == 1);
    REQUIRE(data.train.entries.size() == 10);

    eval::Experiment1Options opt;
    const eval::ExperimentReport rep = run_experiment1(data, opt);

    /* no models: raw + baseline per test env */
    CHECK(rep.rows.size() == 2 * data.test.entries.size());
    CHECK(rep.means.size() == 2);
    CHECK(rep.notices.empty());

    const auto& e = data.test.entries.front();
    const auto& raw = find_row(rep, e.env_id, "", "raw");
    const eval::Metrics direct = eval::metrics(eval::confusion(e.partial, e.full));
    CHECK(raw.metrics.accuracy == direct.accuracy);
    CHECK(raw.metrics.f_measure == direct.f_measure);

    /* baseline row = best precision match among train fulls, queried with the partial */
    std::vector<grid::TernaryMap> fulls;
    for (const auto& t : data.train.entries) fulls.push_back(t.full);
    const grid::TernaryMap& match = eval::baseline_best_match(e.partial, fulls);
    const auto& base = find_row(rep, e.env_id, "", "baseline");
    const eval::Metrics expect = eval::metrics(eval::confusion(match, e.full));
    CHECK(base.metrics.f_measure == expect.f_measure);

    /* single test env: mean equals the row */
    for (const auto& m : rep.means) {
        CHECK(m.rows == 1);
        const auto& row = find_row(rep, e.env_id, "", m.method);
        CHECK(m.metrics.f_measure == row.metrics.f_measure);
    }

    eval::Experiment1Options no_base = opt;
    no_base.include_baseline = false;
    CHECK(run_experiment1(data, no_base).rows.size() == data.test.entries.size());

    eval::Experiment1Options bad = opt;
    bad.models.push_back({"ghost", "/nonexistent/g.ckpt"});
    CHECK_THROWS_WITH_AS(run_experiment1(data, bad),
                         doctest::Contains("cannot load model 'ghost'"), std::runtime_error);
}

TEST_CASE("experiment 1 report files and determinism") {
    const sim::DatasetBundle data = small_bundle();
    const auto dir = fresh_dir("mcslam_test_exp1");

    eval::Experiment1Options opt;
    opt.out_dir = dir.string();
    const eval::ExperimentReport rep = run_experiment1(data, opt);
    const std::string j1 = report_json(rep);
    const std::string j2 = report_json(run_experiment1(data, opt));
    CHECK(j1 == j2);

    CHECK(slurp(dir / "report.json") == j1);
    const auto parsed = nlohmann::json::parse(j1);
    CHECK(parsed["rows"].size() == rep.rows.size());
    CHECK(parsed["means"].size() == rep.means.size());
    CHECK(parsed["rows"][0].contains("f_measure"));

    const std::string table = slurp(dir / "report.txt");
    CHECK(table.find("f-measure") != std::string::npos);
    CHECK(table.find("*") != std::string::npos);
    CHECK(table.find("best mean per metric column") != std::string::npos);

    /* panel images for the lone test env */
    const auto panel = dir / "panels" / (data.test.entries.front().env_id + ".pgm");
    CHECK(std::filesystem::exists(panel));
    CHECK(std::filesystem::exists(dir / "panels" / (data.test.entries.front().env_id + ".png")));
}

TEST_CASE("experiment 2 smoke: stages, bounds, determinism") {
    eval::Experiment2Options opt;
    opt.n_envs = 2;
    opt.max_steps = 250;
    opt.coverage_target = 0.90;
    opt.particle_count = 12;
    opt.plan.min_width = 24;
    opt.plan.max_width = 30;
    opt.plan.min_height = 24;
    opt.plan.max_height = 30;
    opt.plan.min_rooms = 2;
    opt.plan.max_rooms = 3;
    opt.canvas_size = 48;
    opt.seed = 5;

    const eval::ExperimentReport rep = run_experiment2(opt);
    const int scored = opt.n_envs - int(rep.notices.size());
    REQUIRE(scored >= 1);
    CHECK(rep.rows.size() == std::size_t(2 * scored));   /* raw at 1scan and T-5 */

    for (const auto& r : rep.rows) {
        CHECK(r.method == "raw");
        CHECK((r.stage == "1scan" || r.stage == "T-5"));
        CHECK(r.metrics.accuracy >= 0.0);
        CHECK(r.metrics.accuracy <= 1.0);
        CHECK(r.metrics.f_measure >= 0.0);
        CHECK(r.metrics.f_measure <= 1.0);
    }
    for (const auto& r : rep.rows) {
        if (r.stage != "T-5") continue;
        const auto& one = find_row(rep, r.env_id, "1scan", "raw");
        /* more scans never shrink the observed set, and truth is the T-scan map */
        CHECK(r.metrics.recall >= one.metrics.recall);
    }

    CHECK(report_json(run_experiment2(opt)) == report_json(rep));
}
