#include "mcslam/sim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mcslam/grid/map_io.hpp"
#include "mcslam/slam/mapper.hpp"
#include "mcslam/util/rng.hpp"

namespace mcslam::sim {

grid::TernaryMap degrade_map(const grid::TernaryMap& full, double missing_fraction,
                             std::uint64_t seed) {
    if (missing_fraction < 0.0 || missing_fraction > 1.0)
        throw std::invalid_argument("missing_fraction must lie in [0, 1]");

    long searched = 0;
    for (double v : full.values)
        if (v != 0.5) ++searched;
    long target = std::lround(missing_fraction * double(searched));

    grid::TernaryMap out = full;
    Rng rng(seed);
    long covered = 0;
    std::vector<std::size_t> remaining;
    while (covered < target) {
        remaining.clear();
        for (std::size_t i = 0; i < out.values.size(); ++i)
            if (out.values[i] != 0.5) remaining.push_back(i);

        std::size_t center = remaining[std::size_t(
            rng.uniform_int(0, std::int64_t(remaining.size()) - 1))];
        int cc = int(center % std::size_t(out.width));
        int cr = int(center / std::size_t(out.width));
        int w = int(rng.uniform_int(2, 8));
        int h = int(rng.uniform_int(2, 8));

        auto count_new = [&](int rw, int rh) {
            long cnt = 0;
            for (int r = std::max(0, cr - rh / 2); r < std::min(out.height, cr - rh / 2 + rh); ++r)
                for (int c = std::max(0, cc - rw / 2); c < std::min(out.width, cc - rw / 2 + rw); ++c)
                    if (out.at(c, r) != 0.5) ++cnt;
            return cnt;
        };
        while (covered + count_new(w, h) > target && (w > 1 || h > 1)) {
            if (w >= h)
                --w;
            else
                --h;
        }
        for (int r = std::max(0, cr - h / 2); r < std::min(out.height, cr - h / 2 + h); ++r)
            for (int c = std::max(0, cc - w / 2); c < std::min(out.width, cc - w / 2 + w); ++c)
                if (out.at(c, r) != 0.5) {
                    out.at(c, r) = 0.5;
                    ++covered;
                }
    }
    return out;
}

namespace {

DatasetEntry make_entry(const DatasetParams& params, std::uint64_t seed, int i) {
    DatasetEntry entry;
    char buf[16];
    std::snprintf(buf, sizeof buf, "env_%04d", i);
    entry.env_id = buf;

    FloorPlan plan = generate_floorplan(mix_seed(seed, std::uint64_t(i), 0), params.plan);
    entry.full = render_plan(plan, params.canvas_size);

    if (params.mode == PartialMode::degrade) {
        Rng rng(mix_seed(seed, std::uint64_t(i), 1));
        double frac = rng.uniform(params.min_missing, params.max_missing);
        entry.partial = degrade_map(entry.full, frac, mix_seed(seed, std::uint64_t(i), 2));
        return entry;
    }

    /* one stationary panoramic scan from a random free cell */
    Rng rng(mix_seed(seed, std::uint64_t(i), 3));
    std::vector<std::size_t> free_cells;
    for (std::size_t k = 0; k < plan.occupied.size(); ++k)
        if (!plan.occupied[k]) free_cells.push_back(k);
    std::size_t cell = free_cells[std::size_t(
        rng.uniform_int(0, std::int64_t(free_cells.size()) - 1))];
    double res = plan.resolution;
    RobotState state;
    state.pose.x = (double(cell % std::size_t(plan.width)) + 0.5 + rng.uniform(-0.3, 0.3)) * res;
    state.pose.y = (double(cell / std::size_t(plan.width)) + 0.5 + rng.uniform(-0.3, 0.3)) * res;
    state.pose.theta = rng.uniform(-3.141592653589793, 3.141592653589793);

    Scan scan = raycast(plan, state, params.scan, rng);
    grid::OccupancyGrid map(params.canvas_size, params.canvas_size, res, entry.full.origin);
    slam::SensorModel sensor;
    sensor.max_range = params.scan.max_range;
    slam::integrate_scan(map, state.pose, scan, sensor);
    entry.partial = grid::to_ternary(map);
    return entry;
}

}  // namespace

DatasetBundle make_dataset(const DatasetParams& params, std::uint64_t seed) {
    if (params.n_envs < 1) throw std::invalid_argument("n_envs must be >= 1");
    if (params.train_frac < 0.0 || params.val_frac < 0.0 ||
        params.train_frac + params.val_frac > 1.0)
        throw std::invalid_argument("split fractions must be nonnegative and sum to <= 1");

    int n_train = int(std::lround(params.n_envs * params.train_frac));
    int n_val = int(std::lround(params.n_envs * params.val_frac));
    if (n_train + n_val > params.n_envs)
        throw std::invalid_argument("split fractions leave no test environments");

    DatasetBundle bundle;
    bundle.train.split = "train";
    bundle.val.split = "val";
    bundle.test.split = "test";
    for (int i = 0; i < params.n_envs; ++i) {
        DatasetEntry entry = make_entry(params, seed, i);
        if (i < n_train)
            bundle.train.entries.push_back(std::move(entry));
        else if (i < n_train + n_val)
            bundle.val.entries.push_back(std::move(entry));
        else
            bundle.test.entries.push_back(std::move(entry));
    }
    return bundle;
}

void write_dataset(const DatasetBundle& bundle, const std::filesystem::path& dir) {
    for (const Dataset* ds : {&bundle.train, &bundle.val, &bundle.test}) {
        for (const DatasetEntry& e : ds->entries) {
            auto env_dir = dir / ds->split / e.env_id;
            std::filesystem::create_directories(env_dir);
            grid::save_ternary(e.full, (env_dir / "full.pgm").string());
            grid::save_ternary(e.partial, (env_dir / "partial.pgm").string());
        }
    }
}

Dataset load_dataset_split(const std::filesystem::path& dir, const std::string& split) {
    auto split_dir = dir / split;
    if (!std::filesystem::is_directory(split_dir))
        throw std::runtime_error("dataset split directory missing: " + split_dir.string());
    std::vector<std::string> ids;
    for (const auto& de : std::filesystem::directory_iterator(split_dir))
        if (de.is_directory()) ids.push_back(de.path().filename().string());
    std::sort(ids.begin(), ids.end());

    Dataset ds;
    ds.split = split;
    for (const auto& id : ids) {
        DatasetEntry e;
        e.env_id = id;
        e.full = grid::load_ternary((split_dir / id / "full.pgm").string());
        e.partial = grid::load_ternary((split_dir / id / "partial.pgm").string());
        ds.entries.push_back(std::move(e));
    }
    return ds;
}

}  // namespace mcslam::sim
