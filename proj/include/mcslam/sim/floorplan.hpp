#pragma once

#include <cstdint>
#include <vector>

#include "mcslam/grid/ternary.hpp"

namespace mcslam::sim {

struct RoomRect {
    int col = 0;
    int row = 0;
    int width = 0;
    int height = 0;

    bool operator==(const RoomRect&) const = default;
};

struct Doorway {
    int col = 0;
    int row = 0;
    int width = 0;          /* cells along the wall */
    bool vertical_wall = false;

    bool operator==(const Doorway&) const = default;
};

/* Rectilinear indoor world. Cell (c,r) spans world
   [c*res, (c+1)*res) x [r*res, (r+1)*res), corner at the origin. */
struct FloorPlan {
    int width = 0;
    int height = 0;
    double resolution = 0.1;
    std::vector<std::uint8_t> occupied;   /* row-major, 1 = wall */
    std::vector<RoomRect> rooms;
    std::vector<Doorway> doorways;

    bool wall(int col, int row) const { return occupied[std::size_t(row) * width + col] != 0; }
    bool in_bounds(int col, int row) const {
        return col >= 0 && col < width && row >= 0 && row < height;
    }

    bool operator==(const FloorPlan&) const = default;
};

struct FloorPlanParams {
    int min_width = 48;
    int max_width = 64;
    int min_height = 48;
    int max_height = 64;
    int min_rooms = 3;
    int max_rooms = 6;
    int min_room_size = 8;    /* smallest interior side length, cells */
    int doorway_width = 2;
    double resolution = 0.1;
};

/* Two visual styles for cross-domain experiments: A has few large rooms
   with wide doorways, B has many small rooms with narrow ones. */
FloorPlanParams style_a_params();
FloorPlanParams style_b_params();

FloorPlan generate_floorplan(std::uint64_t seed, const FloorPlanParams& params);

/* Every free cell reachable from every other through free cells (4-connected). */
bool plan_connected(const FloorPlan& plan);

/* Blit the plan centered into a canvas_size^2 ternary map: wall cells 1.0,
   free cells 0.0, canvas outside the footprint stays 0.5. The map origin is
   chosen so plan world coordinates and map world coordinates coincide. */
grid::TernaryMap render_plan(const FloorPlan& plan, int canvas_size);

}  // namespace mcslam::sim
