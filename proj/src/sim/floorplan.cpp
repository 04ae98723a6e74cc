#include "mcslam/sim/floorplan.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "mcslam/util/rng.hpp"

namespace mcslam::sim {

FloorPlanParams style_a_params() {
    return FloorPlanParams{};
}

FloorPlanParams style_b_params() {
    FloorPlanParams p;
    p.min_width = 40;
    p.max_width = 56;
    p.min_height = 40;
    p.max_height = 56;
    p.min_rooms = 6;
    p.max_rooms = 9;
    p.min_room_size = 4;
    p.doorway_width = 1;
    return p;
}

namespace {

struct Splitter {
    FloorPlan& plan;
    Rng& rng;
    int min_size;
    int door_width;

    void set_wall(int col, int row) {
        plan.occupied[std::size_t(row) * plan.width + col] = 1;
    }

    bool blocked(int col, int row) const {
        return !plan.in_bounds(col, row) || plan.wall(col, row);
    }

    /* A wall line must end against existing walls on both sides; ending
       against a doorway cell would seal that doorway off. */
    std::vector<int> wall_positions(const RoomRect& r, bool vertical) const {
        std::vector<int> out;
        if (vertical) {
            for (int c = r.col + min_size; c <= r.col + r.width - 1 - min_size; ++c)
                if (blocked(c, r.row - 1) && blocked(c, r.row + r.height)) out.push_back(c);
        } else {
            for (int w = r.row + min_size; w <= r.row + r.height - 1 - min_size; ++w)
                if (blocked(r.col - 1, w) && blocked(r.col + r.width, w)) out.push_back(w);
        }
        return out;
    }

    bool splittable(const RoomRect& r) const {
        return (r.width >= 2 * min_size + 1 && !wall_positions(r, true).empty()) ||
               (r.height >= 2 * min_size + 1 && !wall_positions(r, false).empty());
    }

    /* Splits `r` in two with a one-cell wall, carving one doorway. */
    std::pair<RoomRect, RoomRect> split(const RoomRect& r) {
        auto v_pos = r.width >= 2 * min_size + 1 ? wall_positions(r, true) : std::vector<int>{};
        auto h_pos = r.height >= 2 * min_size + 1 ? wall_positions(r, false) : std::vector<int>{};
        bool vertical;   /* wall along a column */
        if (!v_pos.empty() && !h_pos.empty())
            vertical = r.width >= r.height;
        else
            vertical = !v_pos.empty();

        if (vertical) {
            int wall_col = v_pos[std::size_t(rng.uniform_int(0, std::int64_t(v_pos.size()) - 1))];
            for (int row = r.row; row < r.row + r.height; ++row) set_wall(wall_col, row);
            int dw = std::min(door_width, r.height);
            int door_row = r.row + int(rng.uniform_int(0, r.height - dw));
            for (int k = 0; k < dw; ++k)
                plan.occupied[std::size_t(door_row + k) * plan.width + wall_col] = 0;
            plan.doorways.push_back({wall_col, door_row, dw, true});
            RoomRect left{r.col, r.row, wall_col - r.col, r.height};
            RoomRect right{wall_col + 1, r.row, r.col + r.width - wall_col - 1, r.height};
            return {left, right};
        }
        int wall_row = h_pos[std::size_t(rng.uniform_int(0, std::int64_t(h_pos.size()) - 1))];
        for (int col = r.col; col < r.col + r.width; ++col) set_wall(col, wall_row);
        int dw = std::min(door_width, r.width);
        int door_col = r.col + int(rng.uniform_int(0, r.width - dw));
        for (int k = 0; k < dw; ++k)
            plan.occupied[std::size_t(wall_row) * plan.width + door_col + k] = 0;
        plan.doorways.push_back({door_col, wall_row, dw, false});
        RoomRect top{r.col, r.row, r.width, wall_row - r.row};
        RoomRect bottom{r.col, wall_row + 1, r.width, r.row + r.height - wall_row - 1};
        return {top, bottom};
    }
};

}  // namespace

FloorPlan generate_floorplan(std::uint64_t seed, const FloorPlanParams& params) {
    if (params.min_width > params.max_width || params.min_height > params.max_height ||
        params.min_rooms > params.max_rooms || params.min_rooms < 1 ||
        params.min_room_size < 1 || params.doorway_width < 1)
        throw std::invalid_argument("floorplan params ranges empty or non-positive");

    Rng rng(seed);
    FloorPlan plan;
    plan.width = int(rng.uniform_int(params.min_width, params.max_width));
    plan.height = int(rng.uniform_int(params.min_height, params.max_height));
    plan.resolution = params.resolution;
    plan.occupied.assign(std::size_t(plan.width) * plan.height, 0);

    for (int col = 0; col < plan.width; ++col) {
        plan.occupied[col] = 1;
        plan.occupied[std::size_t(plan.height - 1) * plan.width + col] = 1;
    }
    for (int row = 0; row < plan.height; ++row) {
        plan.occupied[std::size_t(row) * plan.width] = 1;
        plan.occupied[std::size_t(row) * plan.width + plan.width - 1] = 1;
    }

    int n_rooms = int(rng.uniform_int(params.min_rooms, params.max_rooms));
    Splitter splitter{plan, rng, params.min_room_size, params.doorway_width};
    std::vector<RoomRect> leaves{{1, 1, plan.width - 2, plan.height - 2}};

    while (int(leaves.size()) < n_rooms) {
        /* split the largest splittable leaf so rooms stay balanced */
        int best = -1;
        long best_area = -1;
        for (int i = 0; i < int(leaves.size()); ++i) {
            if (!splitter.splittable(leaves[i])) continue;
            long area = long(leaves[i].width) * leaves[i].height;
            if (area > best_area) {
                best_area = area;
                best = i;
            }
        }
        if (best < 0) {
            if (int(leaves.size()) >= params.min_rooms) break;
            throw std::invalid_argument(
                "floorplan params unsatisfiable: cannot fit " + std::to_string(params.min_rooms) +
                " rooms of side >= " + std::to_string(params.min_room_size) + " in " +
                std::to_string(plan.width) + "x" + std::to_string(plan.height));
        }
        auto [a, b] = splitter.split(leaves[best]);
        leaves[best] = a;
        leaves.push_back(b);
    }

    plan.rooms = leaves;
    return plan;
}

bool plan_connected(const FloorPlan& plan) {
    const std::size_t n = plan.occupied.size();
    std::vector<std::uint8_t> seen(n, 0);
    std::size_t start = n, free_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!plan.occupied[i]) {
            ++free_count;
            if (start == n) start = i;
        }
    }
    if (free_count == 0) return false;

    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    std::size_t reached = 0;
    while (!stack.empty()) {
        std::size_t idx = stack.back();
        stack.pop_back();
        ++reached;
        int col = int(idx % plan.width), row = int(idx / plan.width);
        const int dc[4] = {1, -1, 0, 0};
        const int dr[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            int nc = col + dc[k], nr = row + dr[k];
            if (!plan.in_bounds(nc, nr)) continue;
            std::size_t ni = std::size_t(nr) * plan.width + nc;
            if (plan.occupied[ni] || seen[ni]) continue;
            seen[ni] = 1;
            stack.push_back(ni);
        }
    }
    return reached == free_count;
}

grid::TernaryMap render_plan(const FloorPlan& plan, int canvas_size) {
    if (plan.width > canvas_size || plan.height > canvas_size)
        throw std::invalid_argument("plan does not fit the canvas");
    int off_col = (canvas_size - plan.width) / 2;
    int off_row = (canvas_size - plan.height) / 2;
    grid::Pose2D origin{-off_col * plan.resolution, -off_row * plan.resolution, 0.0};
    grid::TernaryMap map(canvas_size, canvas_size, plan.resolution, origin);
    for (int row = 0; row < plan.height; ++row)
        for (int col = 0; col < plan.width; ++col)
            map.at(off_col + col, off_row + row) = plan.wall(col, row) ? 1.0 : 0.0;
    return map;
}

}  // namespace mcslam::sim
