#include "mcslam/eval/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "mcslam/completion/pipeline.hpp"
#include "mcslam/slam/episode.hpp"
#include "mcslam/util/image.hpp"

namespace mcslam::eval {

namespace {

using completion::Generator;
using completion::GeneratorConfig;
using grid::TernaryMap;

std::vector<Generator> load_models(const std::vector<GenModel>& models, const NetShape& net) {
    GeneratorConfig gc;
    gc.size = net.size;
    gc.base = net.base;
    gc.spectral_norm = net.spectral_norm;
    std::vector<Generator> out;
    out.reserve(models.size());
    for (const auto& m : models) {
        try {
            out.push_back(completion::load_generator(m.checkpoint, gc));
        } catch (const std::exception& e) {
            throw std::runtime_error("cannot load model '" + m.name + "' from " +
                                     m.checkpoint + ": " + e.what());
        }
    }
    return out;
}

void add_row(ExperimentReport& rep, const std::string& env, const std::string& stage,
             const std::string& method, const TernaryMap& pred, const TernaryMap& truth) {
    rep.rows.push_back({env, stage, method, metrics(confusion(pred, truth))});
}

void finalize_means(ExperimentReport& rep) {
    rep.means.clear();
    for (const auto& row : rep.rows) {
        MethodMean* slot = nullptr;
        for (auto& m : rep.means)
            if (m.stage == row.stage && m.method == row.method) slot = &m;
        if (!slot) {
            rep.means.push_back({row.stage, row.method, {}, 0});
            slot = &rep.means.back();
        }
        slot->metrics.accuracy += row.metrics.accuracy;
        slot->metrics.precision += row.metrics.precision;
        slot->metrics.recall += row.metrics.recall;
        slot->metrics.f_measure += row.metrics.f_measure;
        slot->metrics.degenerate = slot->metrics.degenerate || row.metrics.degenerate;
        ++slot->rows;
    }
    for (auto& m : rep.means)
        if (m.rows > 0) {
            m.metrics.accuracy /= double(m.rows);
            m.metrics.precision /= double(m.rows);
            m.metrics.recall /= double(m.rows);
            m.metrics.f_measure /= double(m.rows);
        }
}

void render_panel(const std::string& dir, const std::string& name,
                  const std::vector<const TernaryMap*>& maps) {
    std::vector<util::GrayImage> tiles;
    tiles.reserve(maps.size());
    for (const auto* m : maps) tiles.push_back(util::ternary_to_gray(*m));
    const util::GrayImage img = util::hstack(tiles);
    std::filesystem::create_directories(dir);
    util::write_pgm_gray(dir + "/" + name + ".pgm", img);
    util::write_png_gray(dir + "/" + name + ".png", img);
}

}  // namespace

ExperimentReport run_experiment1(const sim::DatasetBundle& data,
                                 const Experiment1Options& opt) {
    std::vector<Generator> gens = load_models(opt.models, opt.net);

    std::vector<TernaryMap> train_fulls;
    train_fulls.reserve(data.train.entries.size());
    for (const auto& e : data.train.entries) train_fulls.push_back(e.full);

    ExperimentReport rep;
    int panel_count = 0;
    for (const auto& e : data.test.entries) {
        std::vector<TernaryMap> completed;
        Rng rng(0);
        for (std::size_t k = 0; k < gens.size(); ++k) {
            completed.push_back(completion::complete_map(gens[k], e.partial, rng, false));
            add_row(rep, e.env_id, "", opt.models[k].name, completed.back(), e.full);
        }
        if (opt.include_raw) add_row(rep, e.env_id, "", "raw", e.partial, e.full);

        const TernaryMap* baseline = nullptr;
        if (opt.include_baseline && !train_fulls.empty()) {
            const TernaryMap& query = completed.empty() ? e.partial : completed.front();
            baseline = &baseline_best_match(query, train_fulls);
            add_row(rep, e.env_id, "", "baseline", *baseline, e.full);
        }

        if (!opt.out_dir.empty() && panel_count < opt.panels) {
            std::vector<const TernaryMap*> maps{&e.partial};
            for (const auto& c : completed) maps.push_back(&c);
            if (baseline) maps.push_back(baseline);
            maps.push_back(&e.full);
            render_panel(opt.out_dir + "/panels", e.env_id, maps);
            ++panel_count;
        }
    }

    finalize_means(rep);
    if (!opt.out_dir.empty()) write_report(rep, opt.out_dir);
    return rep;
}

grid::Pose2D central_free_pose(const sim::FloorPlan& plan) {
    const double mc = plan.width / 2.0;
    const double mr = plan.height / 2.0;
    int best_c = -1, best_r = -1;
    double best_d = 0.0;
    for (int r = 0; r < plan.height; ++r)
        for (int c = 0; c < plan.width; ++c) {
            if (plan.wall(c, r)) continue;
            const double d = (c + 0.5 - mc) * (c + 0.5 - mc) + (r + 0.5 - mr) * (r + 0.5 - mr);
            if (best_c < 0 || d < best_d) {
                best_c = c;
                best_r = r;
                best_d = d;
            }
        }
    if (best_c < 0) throw std::runtime_error("floor plan has no free cell");
    /* slightly off the cell center so the pose never sits on a gridline */
    return {(best_c + 0.51) * plan.resolution, (best_r + 0.49) * plan.resolution, 0.0};
}

namespace {

/* The searchable area: free cells connected to the start, as canvas indices.
   Walls are left out of the termination criterion since narrow nooks can hide
   wall faces from every pose a tour visits. */
std::vector<std::size_t> reachable_canvas_cells(const sim::FloorPlan& plan, int start_c,
                                                int start_r, int off_col, int off_row,
                                                int canvas) {
    const int w = plan.width, h = plan.height;
    std::vector<std::uint8_t> seen(std::size_t(w) * h, 0);
    std::deque<std::pair<int, int>> queue;
    queue.emplace_back(start_c, start_r);
    seen[std::size_t(start_r) * w + start_c] = 1;
    const int dc[4] = {1, -1, 0, 0};
    const int dr[4] = {0, 0, 1, -1};
    while (!queue.empty()) {
        auto [c, r] = queue.front();
        queue.pop_front();
        for (int k = 0; k < 4; ++k) {
            const int nc = c + dc[k], nr = r + dr[k];
            if (!plan.in_bounds(nc, nr) || plan.wall(nc, nr) ||
                seen[std::size_t(nr) * w + nc])
                continue;
            seen[std::size_t(nr) * w + nc] = 1;
            queue.emplace_back(nc, nr);
        }
    }
    std::vector<std::size_t> cells;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (seen[std::size_t(r) * w + c])
                cells.push_back(std::size_t(r + off_row) * canvas + std::size_t(c + off_col));
    return cells;
}

double coverage_of(const TernaryMap& m, const std::vector<std::size_t>& cells) {
    if (cells.empty()) return 1.0;
    long observed = 0;
    for (std::size_t i : cells)
        if (m.values[i] != 0.5) ++observed;
    return double(observed) / double(cells.size());
}

}  // namespace

ExperimentReport run_experiment2(const Experiment2Options& opt) {
    std::vector<Generator> gens = load_models(opt.models, opt.net);

    std::vector<TernaryMap> baseline_fulls;
    if (opt.baseline_train)
        for (const auto& e : opt.baseline_train->entries) baseline_fulls.push_back(e.full);

    ExperimentReport rep;
    int panel_count = 0;
    for (int env = 0; env < opt.n_envs; ++env) {
        char id[16];
        std::snprintf(id, sizeof id, "env_%03d", env);
        try {
            const sim::FloorPlan plan =
                sim::generate_floorplan(mix_seed(opt.seed, std::uint64_t(env), 0), opt.plan);
            const int off_col = (opt.canvas_size - plan.width) / 2;
            const int off_row = (opt.canvas_size - plan.height) / 2;

            slam::EpisodeConfig ec;
            ec.steps = opt.max_steps;
            ec.scan = opt.scan;
            ec.odom_noise = {0.01, 0.001, 0.01, 0.001};
            ec.filter.particle_count = opt.particle_count;
            ec.filter.noise = {0.04, 0.004, 0.04, 0.004};
            ec.filter.sensor.max_range = opt.scan.max_range;
            ec.filter.map_width = opt.canvas_size;
            ec.filter.map_height = opt.canvas_size;
            ec.filter.resolution = plan.resolution;
            ec.filter.map_origin = {-off_col * plan.resolution, -off_row * plan.resolution,
                                    0.0};
            ec.filter.seed = mix_seed(opt.seed, std::uint64_t(env), 1);
            ec.sim_seed = mix_seed(opt.seed, std::uint64_t(env), 2);

            const grid::Pose2D start = central_free_pose(plan);
            const int start_c = int(start.x / plan.resolution);
            const int start_r = int(start.y / plan.resolution);
            const std::vector<std::size_t> reachable =
                reachable_canvas_cells(plan, start_c, start_r, off_col, off_row,
                                       opt.canvas_size);

            /* snapshots[i] is the best map after i+1 scan integrations */
            std::vector<TernaryMap> snaps;
            int t_idx = -1;
            slam::run_episode(plan, start, ec, slam::tour_policy(0.3, 1.0), nullptr,
                              [&](const slam::ParticleSet& ps) {
                                  snaps.push_back(
                                      grid::to_ternary(slam::best_particle(ps).map));
                                  if (t_idx < 0 &&
                                      coverage_of(snaps.back(), reachable) >=
                                          opt.coverage_target)
                                      t_idx = int(snaps.size()) - 1;
                              });
            if (t_idx < 0) {
                rep.notices.push_back(std::string(id) + " skipped: coverage " +
                                      std::to_string(coverage_of(snaps.back(), reachable)) +
                                      " after " + std::to_string(snaps.size()) +
                                      " scans never reached the target");
                continue;
            }

            const TernaryMap& m_T = snaps[std::size_t(t_idx)];
            const TernaryMap& m_1 = snaps.front();
            const TernaryMap& m_tm5 = snaps[std::size_t(std::max(0, t_idx - 5))];

            const std::pair<const char*, const TernaryMap*> stages[] = {{"1scan", &m_1},
                                                                        {"T-5", &m_tm5}};
            std::vector<TernaryMap> first_completions;
            first_completions.reserve(2);
            for (const auto& stage : stages) {
                std::vector<TernaryMap> completed;
                Rng rng(0);
                for (std::size_t k = 0; k < gens.size(); ++k) {
                    completed.push_back(
                        completion::complete_map(gens[k], *stage.second, rng, false));
                    add_row(rep, id, stage.first, opt.models[k].name, completed.back(), m_T);
                }
                add_row(rep, id, stage.first, "raw", *stage.second, m_T);
                if (!baseline_fulls.empty()) {
                    const TernaryMap& query =
                        completed.empty() ? *stage.second : completed.front();
                    add_row(rep, id, stage.first, "baseline",
                            baseline_best_match(query, baseline_fulls), m_T);
                }
                if (!completed.empty()) first_completions.push_back(std::move(completed.front()));
            }

            if (!opt.out_dir.empty() && panel_count < opt.panels) {
                std::vector<const TernaryMap*> panel_maps{&m_1};
                if (!first_completions.empty()) panel_maps.push_back(&first_completions[0]);
                panel_maps.push_back(&m_tm5);
                if (first_completions.size() > 1) panel_maps.push_back(&first_completions[1]);
                panel_maps.push_back(&m_T);
                render_panel(opt.out_dir + "/panels", id, panel_maps);
                ++panel_count;
            }
        } catch (const std::exception& e) {
            rep.notices.push_back(std::string(id) + " skipped: " + e.what());
        }
    }

    finalize_means(rep);
    if (!opt.out_dir.empty()) write_report(rep, opt.out_dir);
    return rep;
}

std::string report_json(const ExperimentReport& report) {
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) {
        nlohmann::ordered_json row;
        row["env"] = r.env_id;
        if (!r.stage.empty()) row["stage"] = r.stage;
        row["method"] = r.method;
        row["accuracy"] = r.metrics.accuracy;
        row["precision"] = r.metrics.precision;
        row["recall"] = r.metrics.recall;
        row["f_measure"] = r.metrics.f_measure;
        row["degenerate"] = r.metrics.degenerate;
        j["rows"].push_back(row);
    }
    j["means"] = nlohmann::ordered_json::array();
    for (const auto& m : report.means) {
        nlohmann::ordered_json row;
        if (!m.stage.empty()) row["stage"] = m.stage;
        row["method"] = m.method;
        row["rows"] = m.rows;
        row["accuracy"] = m.metrics.accuracy;
        row["precision"] = m.metrics.precision;
        row["recall"] = m.metrics.recall;
        row["f_measure"] = m.metrics.f_measure;
        row["degenerate"] = m.metrics.degenerate;
        j["means"].push_back(row);
    }
    j["notices"] = report.notices;
    return j.dump(2) + "\n";
}

std::string report_table(const ExperimentReport& report) {
    /* per-column best within each stage, among the mean rows */
    auto best_in = [&](const std::string& stage, double Metrics::* field) {
        double best = -1.0;
        for (const auto& m : report.means)
            if (m.stage == stage) best = std::max(best, m.metrics.*field);
        return best;
    };

    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-8s %-16s %9s %10s %8s %10s %6s\n", "stage", "method",
                  "accuracy", "precision", "recall", "f-measure", "rows");
    out += line;
    out += std::string(72, '-') + "\n";
    for (const auto& m : report.means) {
        auto cell = [&](double v, double best) {
            char buf[24];
            std::snprintf(buf, sizeof buf, "%.4f%s", v, v == best ? "*" : " ");
            return std::string(buf);
        };
        std::snprintf(line, sizeof line, "%-8s %-16s %9s %10s %8s %10s %6ld\n",
                      m.stage.empty() ? "-" : m.stage.c_str(), m.method.c_str(),
                      cell(m.metrics.accuracy, best_in(m.stage, &Metrics::accuracy)).c_str(),
                      cell(m.metrics.precision, best_in(m.stage, &Metrics::precision)).c_str(),
                      cell(m.metrics.recall, best_in(m.stage, &Metrics::recall)).c_str(),
                      cell(m.metrics.f_measure, best_in(m.stage, &Metrics::f_measure)).c_str(),
                      m.rows);
        out += line;
    }
    out += "(*) best mean per metric column within a stage\n";
    for (const auto& n : report.notices) out += "note: " + n + "\n";
    return out;
}

void write_report(const ExperimentReport& report, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream js(dir + "/report.json", std::ios::binary);
    js << report_json(report);
    std::ofstream txt(dir + "/report.txt", std::ios::binary);
    txt << report_table(report);
}

}  // namespace mcslam::eval
