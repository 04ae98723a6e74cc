#include "mcslam/eval/metrics.hpp"

#include <stdexcept>

namespace mcslam::eval {

ConfusionCounts confusion(const grid::TernaryMap& pred, const grid::TernaryMap& truth) {
    if (pred.width != truth.width || pred.height != truth.height)
        throw std::invalid_argument("confusion: map dimensions do not match");
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.values.size(); ++i) {
        const bool p = pred.values[i] == 1.0;
        const bool t = truth.values[i] == 1.0;
        if (p && t) ++c.tp;
        else if (p && !t) ++c.fp;
        else if (!p && t) ++c.fn;
        else ++c.tn;
    }
    return c;
}

Metrics metrics(const ConfusionCounts& c) {
    Metrics m;
    const long total = c.total();
    if (total > 0) {
        m.accuracy = double(c.tp + c.tn) / double(total);
    } else {
        m.degenerate = true;
    }
    if (c.tp + c.fp > 0) {
        m.precision = double(c.tp) / double(c.tp + c.fp);
    } else {
        m.degenerate = true;
    }
    if (c.tp + c.fn > 0) {
        m.recall = double(c.tp) / double(c.tp + c.fn);
    } else {
        m.degenerate = true;
    }
    if (m.precision + m.recall > 0.0) {
        m.f_measure = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    } else {
        m.degenerate = true;
    }
    return m;
}

std::size_t baseline_best_match_index(const grid::TernaryMap& query,
                                      const std::vector<grid::TernaryMap>& training) {
    if (training.empty())
        throw std::invalid_argument("baseline_best_match: empty training set");
    std::size_t best = 0;
    double best_prec = -1.0;
    for (std::size_t i = 0; i < training.size(); ++i) {
        const Metrics m = metrics(confusion(training[i], query));
        if (m.precision > best_prec) {
            best_prec = m.precision;
            best = i;
        }
    }
    return best;
}

const grid::TernaryMap& baseline_best_match(const grid::TernaryMap& query,
                                            const std::vector<grid::TernaryMap>& training) {
    return training[baseline_best_match_index(query, training)];
}

}  // namespace mcslam::eval
