#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "mcslam/eval/metrics.hpp"
#include "mcslam/util/rng.hpp"

using namespace mcslam;
using grid::TernaryMap;

namespace {

TernaryMap map_with(int w, int h, const std::vector<std::pair<int, int>>& occupied,
                    double background = 0.0) {
    TernaryMap m(w, h);
    std::fill(m.values.begin(), m.values.end(), background);
    for (auto [c, r] : occupied) m.at(c, r) = 1.0;
    return m;
}

}  // namespace

TEST_CASE("confusion counts on a hand-built pair") {
    /* truth: 3 occupied cells; pred hits 2 of them and adds a stray one */
    TernaryMap truth = map_with(4, 4, {{0, 0}, {1, 0}, {2, 0}});
    TernaryMap pred = map_with(4, 4, {{0, 0}, {1, 0}, {3, 3}});

    const eval::ConfusionCounts c = eval::confusion(pred, truth);
    CHECK(c.tp == 2);
    CHECK(c.fp == 1);
    CHECK(c.fn == 1);
    CHECK(c.tn == 12);
    CHECK(c.total() == 16);

    const eval::Metrics m = eval::metrics(c);
    CHECK(m.accuracy == doctest::Approx(14.0 / 16.0).epsilon(1e-15));
    CHECK(m.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(m.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(m.f_measure == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK_FALSE(m.degenerate);
}

TEST_CASE("unsearched cells score as negative") {
    /* pred leaves an occupied truth cell at 0.5: a miss. pred marks an
       unsearched truth cell occupied: a false positive. */
    TernaryMap truth = map_with(2, 2, {{0, 0}});
    truth.at(1, 1) = 0.5;
    TernaryMap pred(2, 2);
    std::fill(pred.values.begin(), pred.values.end(), 0.0);
    pred.at(0, 0) = 0.5;
    pred.at(1, 1) = 1.0;

    const eval::ConfusionCounts c = eval::confusion(pred, truth);
    CHECK(c.tp == 0);
    CHECK(c.fn == 1);
    CHECK(c.fp == 1);
    CHECK(c.tn == 2);
}

TEST_CASE("dimension mismatch throws") {
    TernaryMap a(4, 4), b(4, 5);
    CHECK_THROWS_AS(eval::confusion(a, b), std::invalid_argument);
}

TEST_CASE("zero denominators are flagged and scored 0") {
    SUBCASE("nothing positive anywhere") {
        TernaryMap truth = map_with(3, 3, {});
        TernaryMap pred = map_with(3, 3, {});
        const eval::Metrics m = eval::metrics(eval::confusion(pred, truth));
        CHECK(m.accuracy == 1.0);
        CHECK(m.precision == 0.0);
        CHECK(m.recall == 0.0);
        CHECK(m.f_measure == 0.0);
        CHECK(m.degenerate);
    }
    SUBCASE("prediction all positive, truth all negative") {
        TernaryMap truth = map_with(3, 3, {});
        TernaryMap pred(3, 3);
        std::fill(pred.values.begin(), pred.values.end(), 1.0);
        const eval::Metrics m = eval::metrics(eval::confusion(pred, truth));
        CHECK(m.accuracy == 0.0);
        CHECK(m.precision == 0.0);       /* tp=0 over 9 predicted */
        CHECK(m.recall == 0.0);          /* tp+fn = 0, forced */
        CHECK(m.f_measure == 0.0);
        CHECK(m.degenerate);
    }
    SUBCASE("perfect prediction is not degenerate") {
        TernaryMap truth = map_with(3, 3, {{1, 1}});
        const eval::Metrics m = eval::metrics(eval::confusion(truth, truth));
        CHECK(m.accuracy == 1.0);
        CHECK(m.precision == 1.0);
        CHECK(m.recall == 1.0);
        CHECK(m.f_measure == 1.0);
        CHECK_FALSE(m.degenerate);
    }
}

TEST_CASE("best match maximizes precision against the query") {
    /* query marks cells 0..9 of the top row block; candidates predict 10
       cells each with controlled overlap, so precision is overlap/10 */
    TernaryMap query(10, 10);
    std::fill(query.values.begin(), query.values.end(), 0.0);
    for (int i = 0; i < 10; ++i) query.at(i, 0) = 1.0;

    auto candidate = [&](int overlap) {
        TernaryMap m(10, 10);
        std::fill(m.values.begin(), m.values.end(), 0.0);
        for (int i = 0; i < overlap; ++i) m.at(i, 0) = 1.0;
        for (int i = overlap; i < 10; ++i) m.at(i, 5) = 1.0;   /* off-query cells */
        return m;
    };

    std::vector<TernaryMap> training = {candidate(2), candidate(9), candidate(5)};
    CHECK(eval::baseline_best_match_index(query, training) == 1);
    CHECK(eval::baseline_best_match(query, training) == training[1]);

    SUBCASE("query inside the training set wins outright") {
        training.push_back(query);
        CHECK(eval::baseline_best_match_index(query, training) == 3);
    }
    SUBCASE("ties resolve to the lowest index") {
        training.push_back(candidate(9));   /* duplicate of the best */
        CHECK(eval::baseline_best_match_index(query, training) == 1);
    }
    SUBCASE("empty training set throws") {
        CHECK_THROWS_AS(eval::baseline_best_match_index(query, {}),
                        std::invalid_argument);
    }
}

TEST_CASE("f-measure is the harmonic mean on random counts") {
    Rng rng(0xFEEDu);
    for (int trial = 0; trial < 50; ++trial) {
        eval::ConfusionCounts c;
        c.tp = rng.uniform_int(1, 40);
        c.fp = rng.uniform_int(0, 40);
        c.fn = rng.uniform_int(0, 40);
        c.tn = rng.uniform_int(0, 40);
        const eval::Metrics m = eval::metrics(c);
        const double p = double(c.tp) / double(c.tp + c.fp);
        const double r = double(c.tp) / double(c.tp + c.fn);
        CHECK(m.precision == doctest::Approx(p).epsilon(1e-14));
        CHECK(m.recall == doctest::Approx(r).epsilon(1e-14));
        CHECK(m.f_measure == doctest::Approx(2 * p * r / (p + r)).epsilon(1e-14));
        CHECK(m.accuracy ==
              doctest::Approx(double(c.tp + c.tn) / double(c.total())).epsilon(1e-14));
    }
}
