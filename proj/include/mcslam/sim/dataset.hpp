#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mcslam/grid/ternary.hpp"
#include "mcslam/sim/floorplan.hpp"
#include "mcslam/sim/lidar.hpp"

namespace mcslam::sim {

/* Replaces a seeded union of rectangles with 0.5 until the masked count hits
   round(missing_fraction * searched cells) exactly. Never touches occupancy
   values otherwise. */
grid::TernaryMap degrade_map(const grid::TernaryMap& full, double missing_fraction,
                             std::uint64_t seed);

struct DatasetEntry {
    std::string env_id;
    grid::TernaryMap partial;
    grid::TernaryMap full;
};

struct Dataset {
    std::string split;
    std::vector<DatasetEntry> entries;
};

struct DatasetBundle {
    Dataset train;
    Dataset val;
    Dataset test;
};

enum class PartialMode { degrade, sim_partial };

struct DatasetParams {
    int n_envs = 480;
    double train_frac = 5.0 / 6.0;
    double val_frac = 1.0 / 12.0;
    PartialMode mode = PartialMode::degrade;
    FloorPlanParams plan = style_a_params();
    int canvas_size = 64;
    double min_missing = 0.1;   /* degrade mode */
    double max_missing = 0.5;
    ScanConfig scan;            /* sim_partial mode */
};

/* Environment i is a pure function of (seed, i); splits partition the ids. */
DatasetBundle make_dataset(const DatasetParams& params, std::uint64_t seed);

void write_dataset(const DatasetBundle& bundle, const std::filesystem::path& dir);

/* Reads dir/<split>/<env_id>/{full,partial}.pgm, env ids sorted. */
Dataset load_dataset_split(const std::filesystem::path& dir, const std::string& split);

}  // namespace mcslam::sim
