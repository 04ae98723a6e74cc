#pragma once

#include <vector>

#include "mcslam/completion/generator.hpp"
#include "mcslam/grid/occupancy_grid.hpp"
#include "mcslam/grid/ternary.hpp"
#include "mcslam/nn/tensor.hpp"
#include "mcslam/util/rng.hpp"

namespace mcslam::completion {

// Network image of a ternary map: channel 0 the values, channel 1 the
// unsearched mask (1 where the value is 0.5). Throws when the map is not
// expected_size square.
nn::Tensor pack_input(const grid::TernaryMap& m, int expected_size);

// Inverse of pack_input for batch element n, thresholded back to a legal
// ternary map; resolution and origin are copied from `like`.
grid::TernaryMap unpack_output(const nn::Tensor& y, int n, const grid::TernaryMap& like);

// pack -> forward -> discretize. Dropout runs only when stochastic, so
// stochastic=false is a pure function of (weights, input).
grid::TernaryMap generate(Generator& g, const grid::TernaryMap& m_t, Rng& rng,
                          bool stochastic);

// Square window in map cell coordinates; may overhang the map when the map
// is smaller than the network field.
struct CropWindow {
    int col0 = 0;
    int row0 = 0;
    int size = 0;
};

// Window of the network's size centered on the bounding box of searched
// cells (clamped to the map where possible). Throws when the searched
// region itself does not fit the field.
CropWindow compute_crop_window(const grid::TernaryMap& m, int net_size);

// Contents of the window; cells outside the map read as 0.5.
grid::TernaryMap crop_to_window(const grid::TernaryMap& m, const CropWindow& win);

// Copy of `base` with the window region replaced by `patch`.
grid::TernaryMap paste_from_window(const grid::TernaryMap& base,
                                   const grid::TernaryMap& patch, const CropWindow& win);

// to_ternary -> crop -> generate -> paste. Output has the input grid's
// dimensions; cells outside the crop keep their input value.
grid::TernaryMap complete_map(Generator& g, const grid::OccupancyGrid& occ, Rng& rng,
                              bool stochastic);

// Same crop -> generate -> paste path for an already ternary partial map.
grid::TernaryMap complete_map(Generator& g, const grid::TernaryMap& m_t, Rng& rng,
                              bool stochastic);

// Builds a generator of the given shape and fills it from a checkpoint.
// Throws when the file is missing or was written for a different shape.
Generator load_generator(const std::string& checkpoint, const GeneratorConfig& cfg);

}  // namespace mcslam::completion
