#ifndef MCSLAM_GRID_MAP_IO_HPP
#define MCSLAM_GRID_MAP_IO_HPP

#include <string>

#include "mcslam/grid/ternary.hpp"

namespace mcslam::grid {

// Ternary maps travel as binary 8-bit PGM (P5, maxval 255) with the fixed
// codebook 0 -> 0.0 (free), 128 -> 0.5 (unsearched), 255 -> 1.0 (occupied),
// plus a "<path>.meta" plain-text key: value sidecar carrying resolution and
// origin. load(save(m)) == m bit-exactly for every legal map.

void save_ternary(const TernaryMap& map, const std::string& pgm_path);

// Throws std::runtime_error naming the offending byte offset on malformed
// files or illegal pixel values.
TernaryMap load_ternary(const std::string& pgm_path);

// Sidecar path for a map file ("maps/a.pgm" -> "maps/a.pgm.meta").
std::string meta_path_for(const std::string& pgm_path);

}  // namespace mcslam::grid

#endif  // MCSLAM_GRID_MAP_IO_HPP
