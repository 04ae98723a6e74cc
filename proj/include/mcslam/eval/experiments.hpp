#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcslam/eval/metrics.hpp"
#include "mcslam/sim/dataset.hpp"
#include "mcslam/sim/floorplan.hpp"
#include "mcslam/sim/lidar.hpp"

namespace mcslam::eval {

struct ExperimentRow {
    std::string env_id;
    std::string stage;    // empty for experiment 1; "1scan" or "T-5" for experiment 2
    std::string method;
    Metrics metrics;
};

struct MethodMean {
    std::string stage;
    std::string method;
    Metrics metrics;      // field-wise average; degenerate if any row was
    long rows = 0;
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;
    std::vector<MethodMean> means;    // ordered by first appearance
    std::vector<std::string> notices;
};

// A named generator checkpoint; the name becomes the report's method label.
struct GenModel {
    std::string name;
    std::string checkpoint;
};

struct NetShape {
    int size = 64;
    int base = 16;
    bool spectral_norm = true;
};

struct Experiment1Options {
    std::vector<GenModel> models;
    bool include_raw = true;
    bool include_baseline = true;
    NetShape net;
    std::string out_dir;    // empty: no report files or panels
    int panels = 4;         // side-by-side images for the first n environments
};

// Scores every completion method on data.test against the full maps.
// Baseline retrieval runs over data.train full maps, queried with the first
// model's completed map (the raw partial when no models are given). Throws
// when a listed checkpoint cannot be loaded, naming it.
ExperimentReport run_experiment1(const sim::DatasetBundle& data,
                                 const Experiment1Options& opt);

struct Experiment2Options {
    std::vector<GenModel> models;
    const sim::Dataset* baseline_train = nullptr;   // null: no baseline rows
    sim::FloorPlanParams plan;
    sim::ScanConfig scan{180, 6.283185307179586476925286766559, 6.0, 0.01};
    int n_envs = 5;
    int max_steps = 600;
    double coverage_target = 0.98;
    int particle_count = 30;
    int canvas_size = 64;
    std::uint64_t seed = 1;
    NetShape net;
    std::string out_dir;
    int panels = 3;
};

// Per environment: a full exploration episode defines T (first scan count
// whose best map covers coverage_target of the reachable cells) and yields
// the scoring truth m_T; methods are scored at the 1-scan and T-5 stages.
// Environments that never reach the target, or whose filter fails, are
// skipped with a notice.
ExperimentReport run_experiment2(const Experiment2Options& opt);

// Free cell nearest the plan center, pose at its middle, heading 0.
grid::Pose2D central_free_pose(const sim::FloorPlan& plan);

std::string report_json(const ExperimentReport& report);

// Aligned-column table; per-column best mean is marked and the legend says
// so.
std::string report_table(const ExperimentReport& report);

void write_report(const ExperimentReport& report, const std::string& dir);

}  // namespace mcslam::eval
