#pragma once

#include <cstddef>
#include <vector>

#include "mcslam/grid/ternary.hpp"

namespace mcslam::eval {

struct ConfusionCounts {
    long tp = 0, fp = 0, fn = 0, tn = 0;
    long total() const { return tp + fp + fn + tn; }
};

// A cell is positive iff its value is exactly 1.0; unsearched (0.5) scores
// as negative. Throws on dimension mismatch.
ConfusionCounts confusion(const grid::TernaryMap& pred, const grid::TernaryMap& truth);

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
    bool degenerate = false;   // some zero-denominator value was forced to 0
};

Metrics metrics(const ConfusionCounts& c);

// Scores every candidate as a prediction against the query as truth and
// returns the argmax precision, lowest index on ties.
std::size_t baseline_best_match_index(const grid::TernaryMap& query,
                                      const std::vector<grid::TernaryMap>& training);

const grid::TernaryMap& baseline_best_match(const grid::TernaryMap& query,
                                            const std::vector<grid::TernaryMap>& training);

}  // namespace mcslam::eval
