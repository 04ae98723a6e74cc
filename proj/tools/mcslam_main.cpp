#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcslam/completion/pipeline.hpp"
#include "mcslam/completion/trainer.hpp"
#include "mcslam/eval/experiments.hpp"
#include "mcslam/grid/map_io.hpp"
#include "mcslam/sim/dataset.hpp"
#include "mcslam/slam/episode.hpp"
#include "mcslam/util/image.hpp"
#include "mcslam/util/rng.hpp"

namespace {

using nlohmann::ordered_json;
using namespace mcslam;

constexpr double kTwoPi = 6.283185307179586476925286766559;

/* bad values found after flag parsing (config file included) */
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void flatten_json(const nlohmann::json& j, const std::string& prefix,
                  std::map<std::string, nlohmann::json>& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten_json(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else {
        out[prefix] = j;
    }
}

void set_dotted(ordered_json& root, const std::string& key, ordered_json value) {
    ordered_json* node = &root;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t dot = key.find('.', pos);
        if (dot == std::string::npos) {
            (*node)[key.substr(pos)] = std::move(value);
            return;
        }
        node = &(*node)[key.substr(pos, dot - pos)];
        pos = dot + 1;
    }
}

/* Ties every option to a config-file key so that flags > config > defaults,
   and the final values can be echoed as one JSON document. */
class ParamSet {
  public:
    template <typename T>
    CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key, T& var,
                     const std::string& desc) {
        CLI::Option* opt = app->add_option(flag, var, desc);
        bind(opt, key, var);
        return opt;
    }

    template <typename T>
    CLI::Option* add_flag(CLI::App* app, const std::string& flag, const std::string& key,
                          T& var, const std::string& desc) {
        CLI::Option* opt = app->add_flag(flag, var, desc);
        bind(opt, key, var);
        return opt;
    }

    void apply_config_file(const std::string& path) const {
        std::ifstream in(path);
        if (!in) throw UsageError("cannot open config file " + path);
        nlohmann::json cfg;
        try {
            cfg = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw UsageError(std::string("bad config file: ") + e.what());
        }
        if (!cfg.is_object()) throw UsageError("config root must be a JSON object");
        std::map<std::string, nlohmann::json> flat;
        flatten_json(cfg, "", flat);
        for (const auto& [key, value] : flat) {
            const Binding* b = find(key);
            if (!b) throw UsageError("unknown config key '" + key + "'");
            if (b->opt->count() == 0) b->from_json(value);
        }
    }

    ordered_json resolved() const {
        ordered_json out;
        for (const auto& b : bindings_) set_dotted(out, b.key, b.to_json());
        return out;
    }

  private:
    struct Binding {
        std::string key;
        CLI::Option* opt;
        std::function<void(const nlohmann::json&)> from_json;
        std::function<ordered_json()> to_json;
    };

    template <typename T>
    void bind(CLI::Option* opt, const std::string& key, T& var) {
        bindings_.push_back({key, opt,
                             [&var, key](const nlohmann::json& j) {
                                 try {
                                     var = j.get<T>();
                                 } catch (const nlohmann::json::exception&) {
                                     throw UsageError("config key '" + key +
                                                      "' has the wrong type");
                                 }
                             },
                             [&var] { return ordered_json(var); }});
    }

    const Binding* find(const std::string& key) const {
        for (const auto& b : bindings_)
            if (b.key == key) return &b;
        return nullptr;
    }

    std::vector<Binding> bindings_;
};

void write_echo(const ordered_json& doc, const std::filesystem::path& path) {
    std::filesystem::create_directories(path.parent_path().empty() ? "."
                                                                   : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

ordered_json with_name(const std::string& subcommand, const ParamSet& ps) {
    ordered_json doc;
    doc["subcommand"] = subcommand;
    const ordered_json params = ps.resolved();
    for (const auto& [k, v] : params.items()) doc[k] = v;
    return doc;
}

std::vector<eval::GenModel> parse_models(const std::vector<std::string>& specs) {
    std::vector<eval::GenModel> out;
    for (const auto& s : specs) {
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) {
            out.push_back({std::filesystem::path(s).stem().string(), s});
        } else if (eq == 0 || eq + 1 == s.size()) {
            throw UsageError("--model expects name=path, got '" + s + "'");
        } else {
            out.push_back({s.substr(0, eq), s.substr(eq + 1)});
        }
    }
    return out;
}

sim::FloorPlanParams style_params(const std::string& style) {
    if (style == "a") return sim::style_a_params();
    if (style == "b") return sim::style_b_params();
    throw UsageError("--style must be 'a' or 'b'");
}

void require_out(const std::string& out) {
    if (out.empty()) throw UsageError("--out is required");
}

util::GrayImage upscale(const util::GrayImage& img, int k) {
    util::GrayImage out(img.width * k, img.height * k);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) {
            const std::uint8_t v = img.pixels[std::size_t(r) * img.width + c];
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j)
                    out.pixels[std::size_t(r * k + i) * out.width + c * k + j] = v;
        }
    return out;
}

/* shared state wiring for one subcommand */
struct Command {
    CLI::App* app = nullptr;
    std::shared_ptr<ParamSet> params = std::make_shared<ParamSet>();
    std::string config_path;
    std::function<int(const ParamSet&)> run;

    int execute() {
        if (!config_path.empty()) params->apply_config_file(config_path);
        return run(*params);
    }
};

Command* add_command(std::vector<std::unique_ptr<Command>>& all, CLI::App& root,
                     const std::string& name, const std::string& desc) {
    auto cmd = std::make_unique<Command>();
    cmd->app = root.add_subcommand(name, desc);
    cmd->app->add_option("--config", cmd->config_path,
                         "JSON config file; explicit flags override its keys");
    all.push_back(std::move(cmd));
    return all.back().get();
}

struct GenDataState {
    int envs = 480;
    std::uint64_t seed = 1;
    std::string mode = "degrade";
    std::string style = "a";
    int canvas = 64;
    double min_missing = 0.1;
    double max_missing = 0.5;
    double train_frac = 5.0 / 6.0;
    double val_frac = 1.0 / 12.0;
    int beams = 90;
    double max_range = 6.0;
    double scan_noise = 0.01;
    std::string out;
};

void setup_gen_data(std::vector<std::unique_ptr<Command>>& all, CLI::App& root) {
    Command* cmd = add_command(all, root, "gen-data",
                               "Synthesize a train/val/test map-completion dataset");
    auto st = std::make_shared<GenDataState>();
    auto& ps = *cmd->params;
    CLI::App* app = cmd->app;
    ps.add(app, "--envs", "envs", st->envs, "number of environments")
        ->check(CLI::PositiveNumber);
    ps.add(app, "--seed", "seed", st->seed, "master dataset seed");
    ps.add(app, "--mode", "mode", st->mode, "partial-map source: degrade | sim");
    ps.add(app, "--style", "style", st->style, "floor plan style: a | b");
    ps.add(app, "--canvas", "canvas", st->canvas, "map side length, cells");
    ps.add(app, "--min-missing", "min_missing", st->min_missing,
           "degrade mode: smallest masked fraction");
    ps.add(app, "--max-missing", "max_missing", st->max_missing,
           "degrade mode: largest masked fraction");
    ps.add(app, "--train-frac", "train_frac", st->train_frac, "training split fraction");
    ps.add(app, "--val-frac", "val_frac", st->val_frac, "validation split fraction");
    ps.add(app, "--beams", "scan.beams", st->beams, "sim mode: beams per scan");
    ps.add(app, "--max-range", "scan.max_range", st->max_range, "sim mode: lidar range, m");
    ps.add(app, "--scan-noise", "scan.noise", st->scan_noise,
           "sim mode: range noise sigma, m");
    ps.add(app, "--out", "out", st->out, "output dataset directory");

    cmd->run = [st](const ParamSet& params) {
        require_out(st->out);
        if (st->envs <= 0) throw UsageError("--envs must be positive");
        if (st->canvas <= 0) throw UsageError("--canvas must be positive");
        if (st->mode != "degrade" && st->mode != "sim")
            throw UsageError("--mode must be 'degrade' or 'sim'");
        if (!(st->min_missing >= 0.0 && st->min_missing <= st->max_missing &&
              st->max_missing <= 1.0))
            throw UsageError("missing fractions must satisfy 0 <= min <= max <= 1");
        if (!(st->train_frac > 0.0 && st->val_frac > 0.0 &&
              st->train_frac + st->val_frac < 1.0))
            throw UsageError("split fractions must be positive and sum below 1");
        if (st->beams <= 0 || st->max_range <= 0.0 || st->scan_noise < 0.0)
            throw UsageError("scan parameters out of range");

        sim::DatasetParams p;
        p.n_envs = st->envs;
        p.train_frac = st->train_frac;
        p.val_frac = st->val_frac;
        p.mode = st->mode == "degrade" ? sim::PartialMode::degrade
                                       : sim::PartialMode::sim_partial;
        p.plan = style_params(st->style);
        p.canvas_size = st->canvas;
        p.min_missing = st->min_missing;
        p.max_missing = st->max_missing;
        p.scan = {st->beams, kTwoPi, st->max_range, st->scan_noise};

        const sim::DatasetBundle bundle = sim::make_dataset(p, st->seed);
        sim::write_dataset(bundle, st->out);
        write_echo(with_name("gen-data", params),
                   std::filesystem::path(st->out) / "resolved_config.json");
        std::cout << "wrote " << bundle.train.entries.size() << " train / "
                  << bundle.val.entries.size() << " val / " << bundle.test.entries.size()
                  << " test environments to " << st->out << "\n";
        return 0;
    };
}

struct TrainState {
    std::string data;
    std::string out;
    std::string mode = "l2";
    int epochs = 100;
    int batch = 8;
    double lr = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double dropout = 0.5;
    double lambda = 10.0;
    std::uint64_t seed = 1;
    int checkpoint_every = 25;
    int size = 64;
    int g_base = 16;
    int d_base = 32;
    bool spectral_norm = true;
};

void setup_train(std::vector<std::unique_ptr<Command>>& all, CLI::App& root) {
    Command* cmd = add_command(all, root, "train", "Train a map-completion generator");
    auto st = std::make_shared<TrainState>();
    auto& ps = *cmd->params;
    CLI::App* app = cmd->app;
    ps.add(app, "--data", "data", st->data, "dataset directory (train/ and val/ splits)");
    ps.add(app, "--out", "out", st->out, "checkpoint + metric output directory");
    ps.add(app, "--mode", "mode", st->mode, "loss mode: l2 | gan");
    ps.add(app, "--epochs", "epochs", st->epochs, "training epochs")
        ->check(CLI::PositiveNumber);
    ps.add(app, "--batch", "batch", st->batch, "batch size")->check(CLI::PositiveNumber);
    ps.add(app, "--lr", "lr", st->lr, "adam learning rate");
    ps.add(app, "--beta1", "beta1", st->beta1, "adam beta1");
    ps.add(app, "--beta2", "beta2", st->beta2, "adam beta2");
    ps.add(app, "--dropout", "dropout", st->dropout, "decoder dropout probability");
    ps.add(app, "--lambda", "lambda", st->lambda, "gan mode: reconstruction weight");
    ps.add(app, "--seed", "seed", st->seed, "training seed");
    ps.add(app, "--checkpoint-every", "checkpoint_every", st->checkpoint_every,
           "epochs between periodic checkpoints, 0 disables");
    ps.add(app, "--size", "net.size", st->size, "network input side, cells");
    ps.add(app, "--g-base", "net.g_base", st->g_base, "generator base channels");
    ps.add(app, "--d-base", "net.d_base", st->d_base, "discriminator base channels");
    ps.add_flag(app, "--spectral-norm,!--no-spectral-norm", "net.spectral_norm",
                st->spectral_norm, "spectral normalization in the discriminator");

    cmd->run = [st](const ParamSet& params) {
        require_out(st->out);
        if (st->data.empty()) throw UsageError("--data is required");
        if (st->mode != "l2" && st->mode != "gan")
            throw UsageError("--mode must be 'l2' or 'gan'");
        if (st->epochs <= 0) throw UsageError("--epochs must be positive");
        if (st->batch <= 0) throw UsageError("--batch must be positive");
        if (st->lr <= 0.0) throw UsageError("--lr must be positive");
        if (st->lambda < 0.0) throw UsageError("--lambda must be nonnegative");
        if (st->dropout < 0.0 || st->dropout >= 1.0)
            throw UsageError("--dropout must be in [0, 1)");
        if (st->size <= 0 || st->size % 16 != 0)
            throw UsageError("--size must be a positive multiple of 16");
        if (st->g_base <= 0 || st->d_base <= 0)
            throw UsageError("base channel counts must be positive");
        if (st->checkpoint_every < 0)
            throw UsageError("--checkpoint-every must be nonnegative");

        sim::DatasetBundle bundle;
        bundle.train = sim::load_dataset_split(st->data, "train");
        bundle.val = sim::load_dataset_split(st->data, "val");

        completion::TrainConfig tc;
        tc.mode = st->mode == "l2" ? completion::TrainMode::l2 : completion::TrainMode::gan;
        tc.epochs = st->epochs;
        tc.batch = st->batch;
        tc.lr = st->lr;
        tc.beta1 = st->beta1;
        tc.beta2 = st->beta2;
        tc.dropout = st->dropout;
        tc.lambda = st->lambda;
        tc.seed = st->seed;
        tc.checkpoint_every = st->checkpoint_every;
        tc.net_size = st->size;
        tc.g_base = st->g_base;
        tc.d_base = st->d_base;
        tc.spectral_norm = st->spectral_norm;
        tc.out_dir = st->out;

        write_echo(with_name("train", params),
                   std::filesystem::path(st->out) / "resolved_config.json");
        const completion::TrainResult res = completion::train(bundle, tc);
        if (res.diverged) {
            std::cerr << "training diverged: " << res.divergence_message << "\n";
            return 1;
        }
        if (!res.log.empty()) {
            const auto& last = res.log.back();
            std::cout << "epoch " << last.epoch << ": train_l2 " << last.train_l2
                      << ", val_l2 " << last.val_l2 << ", val_f " << last.val_f << "\n";
        }
        std::cout << "checkpoints in " << st->out << "\n";
        return 0;
    };
}

struct SlamState {
    std::uint64_t env_seed = 1;
    std::uint64_t sim_seed = 2;
    std::uint64_t filter_seed = 1;
    std::string style = "a";
    int canvas = 64;
    int steps = 200;
    int particles = 30;
    int beams = 90;
    double max_range = 6.0;
    double scan_noise = 0.01;
    std::string out;
};

void setup_slam(std::vector<std::unique_ptr<Command>>& all, CLI::App& root) {
    Command* cmd = add_command(all, root, "slam",
                               "Run one exploration episode of the particle filter");
    auto st = std::make_shared<SlamState>();
    auto& ps = *cmd->params;
    CLI::App* app = cmd->app;
    ps.add(app, "--env-seed", "env_seed", st->env_seed, "floor plan seed");
    ps.add(app, "--sim-seed", "sim_seed", st->sim_seed, "odometry/scan noise seed");
    ps.add(app, "--seed", "filter_seed", st->filter_seed, "particle filter seed");
    ps.add(app, "--style", "style", st->style, "floor plan style: a | b");
    ps.add(app, "--canvas", "canvas", st->canvas, "filter map side length, cells");
    ps.add(app, "--steps", "steps", st->steps, "motion steps")->check(CLI::PositiveNumber);
    ps.add(app, "--particles", "particles", st->particles, "particle count")
        ->check(CLI::PositiveNumber);
    ps.add(app, "--beams", "scan.beams", st->beams, "beams per scan");
    ps.add(app, "--max-range", "scan.max_range", st->max_range, "lidar range, m");
    ps.add(app, "--scan-noise", "scan.noise", st->scan_noise, "range noise sigma, m");
    ps.add(app, "--out", "out", st->out, "output directory");

    cmd->run = [st](const ParamSet& params) {
        require_out(st->out);
        if (st->steps <= 0) throw UsageError("--steps must be positive");
        if (st->particles <= 0) throw UsageError("--particles must be positive");
        if (st->beams <= 0 || st->max_range <= 0.0 || st->scan_noise < 0.0)
            throw UsageError("scan parameters out of range");

        const sim::FloorPlan plan =
            sim::generate_floorplan(st->env_seed, style_params(st->style));
        if (plan.width > st->canvas || plan.height > st->canvas)
            throw std::runtime_error("canvas smaller than the generated plan");
        const int off_col = (st->canvas - plan.width) / 2;
        const int off_row = (st->canvas - plan.height) / 2;

        slam::EpisodeConfig ec;
        ec.steps = st->steps;
        ec.scan = {st->beams, kTwoPi, st->max_range, st->scan_noise};
        ec.sim_seed = st->sim_seed;
        ec.filter.particle_count = st->particles;
        ec.filter.noise = {0.04, 0.004, 0.04, 0.004};
        ec.filter.sensor.max_range = st->max_range;
        ec.filter.seed = st->filter_seed;
        ec.filter.map_width = st->canvas;
        ec.filter.map_height = st->canvas;
        ec.filter.resolution = plan.resolution;
        ec.filter.map_origin = {-off_col * plan.resolution, -off_row * plan.resolution, 0.0};

        std::filesystem::create_directories(st->out);
        std::ofstream log(std::filesystem::path(st->out) / "episode.jsonl",
                          std::ios::binary);
        const grid::Pose2D start = eval::central_free_pose(plan);
        const slam::EpisodeResult res =
            slam::run_episode(plan, start, ec, slam::random_walk_policy(0.3, 1.0), &log);

        const slam::Particle& best = slam::best_particle(res.particles);
        grid::save_ternary(grid::to_ternary(best.map),
                           (std::filesystem::path(st->out) / "best_map.pgm").string());
        grid::save_ternary(sim::render_plan(plan, st->canvas),
                           (std::filesystem::path(st->out) / "truth.pgm").string());
        write_echo(with_name("slam", params),
                   std::filesystem::path(st->out) / "resolved_config.json");

        const grid::Pose2D& truth = res.true_poses.back();
        const grid::Pose2D& est = best.trajectory.back();
        const double dx = est.x - truth.x;
        const double dy = est.y - truth.y;
        std::cout << "final position error " << std::sqrt(dx * dx + dy * dy)
                  << " m over " << st->steps << " steps\n";
        return 0;
    };
}

struct CompleteState {
    std::string model;
    std::string in;
    std::string out;
    int size = 64;
    int base = 16;
    bool spectral_norm = true;
    bool stochastic = false;
    std::uint64_t seed = 0;
};

void setup_complete(std::vector<std::unique_ptr<Command>>& all, CLI::App& root) {
    Command* cmd = add_command(all, root, "complete",
                               "Complete a partial ternary map with a trained generator");
    auto st = std::make_shared<CompleteState>();
    auto& ps = *cmd->params;
    CLI::App* app = cmd->app;
    ps.add(app, "--model", "model", st->model, "generator checkpoint");
    ps.add(app, "--in", "in", st->in, "partial map PGM");
    ps.add(app, "--out", "out", st->out, "completed map PGM path");
    ps.add(app, "--size", "net.size", st->size, "network input side, cells");
    ps.add(app, "--base", "net.base", st->base, "generator base channels");
    ps.add_flag(app, "--spectral-norm,!--no-spectral-norm", "net.spectral_norm",
                st->spectral_norm, "checkpoint was trained with spectral norm");
    ps.add_flag(app, "--stochastic", "stochastic", st->stochastic,
                "keep decoder dropout active");
    ps.add(app, "--seed", "seed", st->seed, "dropout seed for --stochastic");

    cmd->run = [st](const ParamSet& params) {
        require_out(st->out);
        if (st->model.empty()) throw UsageError("--model is required");
        if (st->in.empty()) throw UsageError("--in is required");
        if (st->size <= 0 || st->size % 16 != 0)
            throw UsageError("--size must be a positive multiple of 16");
        if (st->base <= 0) throw UsageError("--base must be positive");

        const grid::TernaryMap partial = grid::load_ternary(st->in);
        completion::GeneratorConfig gc;
        gc.size = st->size;
        gc.base = st->base;
        gc.spectral_norm = st->spectral_norm;
        completion::Generator g = completion::load_generator(st->model, gc);
        Rng rng(st->seed);
        const grid::TernaryMap completed =
            completion::complete_map(g, partial, rng, st->stochastic);
        grid::save_ternary(completed, st->out);
        write_echo(with_name("complete", params), st->out + ".config.json");
        std::cout << "wrote " << st->out << "\n";
        return 0;
    };
}

struct Eval1State {
    std::string data;
    std::string out;
    std::vector<std::string> models;
    int size = 64;
    int base = 16;
    bool spectral_norm = true;
    bool raw = true;
    bool baseline = true;
    int panels = 4;
};

void setup_eval1(std::vector<std::unique_ptr<Command>>& all, CLI::App& root) {
    Command* cmd = add_command(all, root, "eval1",
                               "Score completion methods on a dataset's test split");
    auto st = std::make_shared<Eval1State>();
    auto& ps = *cmd->params;
    CLI::App* app = cmd->app;
    ps.add(app, "--data", "data", st->data, "dataset directory");
    ps.add(app, "--out", "out", st->out, "report output directory");
    ps.add(app, "--model", "models", st->models,
           "generator checkpoint as name=path; repeatable");
    ps.add(app, "--size", "net.size", st->size, "network input side, cells");
    ps.add(app, "--base", "net.base", st->base, "generator base channels");
    ps.add_flag(app, "--spectral-norm,!--no-spectral-norm", "net.spectral_norm",
                st->spectral_norm, "checkpoints were trained with spectral norm");
    ps.add_flag(app, "--raw,!--no-raw", "raw", st->raw, "score the raw partial maps");
    ps.add_flag(app, "--baseline,!--no-baseline", "baseline", st->baseline,
                "score retrieval from the training maps");
    ps.add(app, "--panels", "panels", st->panels, "side-by-side images to render");

    cmd->run = [st](const ParamSet& params) {
        require_out(st->out);
        if (st->data.empty()) throw UsageError("--data is required");
        if (st->panels < 0) throw UsageError("--panels must be nonnegative");

        sim::DatasetBundle data;
        data.train = sim::load_dataset_split(st->data, "train");
        data.test = sim::load_dataset_split(st->data, "test");

        eval::Experiment1Options opt;
        opt.models = parse_models(st->models);
        opt.include_raw = st->raw;
        opt.include_baseline = st->baseline;
        opt.net = {st->size, st->base, st->spectral_norm};
        opt.out_dir = st->out;
        opt.panels = st->panels;

        const eval::ExperimentReport rep = run_experiment1(data, opt);
        write_echo(with_name("eval1", params),
                   std::filesystem::path(st->out) / "resolved_config.json");
        std::cout << report_table(rep);
        return 0;
    };
}

struct Eval2State {
    std::vector<std::string> models;
    std::string baseline_data;
    std::string out;
    std::string style = "a";
    int envs = 5;
    std::uint64_t seed = 1;
    int steps = 600;
    double coverage = 0.98;
    int particles = 30;
    int canvas = 64;
    int size = 64;
    int base = 16;
    bool spectral_norm = true;
    int panels = 3;
    int beams = 180;
    double max_range = 6.0;
    double scan_noise = 0.01;
};

void setup_eval2(std::vector<std::unique_ptr<Command>>& all, CLI::App& root) {
    Command* cmd = add_command(all, root, "eval2",
                               "Score completion methods inside live exploration runs");
    auto st = std::make_shared<Eval2State>();
    auto& ps = *cmd->params;
    CLI::App* app = cmd->app;
    ps.add(app, "--model", "models", st->models,
           "generator checkpoint as name=path; repeatable");
    ps.add(app, "--baseline-data", "baseline_data", st->baseline_data,
           "dataset directory whose train split feeds retrieval");
    ps.add(app, "--out", "out", st->out, "report output directory");
    ps.add(app, "--style", "style", st->style, "floor plan style: a | b");
    ps.add(app, "--envs", "envs", st->envs, "environments to run")
        ->check(CLI::PositiveNumber);
    ps.add(app, "--seed", "seed", st->seed, "master seed");
    ps.add(app, "--steps", "steps", st->steps, "max motion steps per environment")
        ->check(CLI::PositiveNumber);
    ps.add(app, "--coverage", "coverage", st->coverage,
           "fraction of reachable cells that defines the final map");
    ps.add(app, "--particles", "particles", st->particles, "particle count")
        ->check(CLI::PositiveNumber);
    ps.add(app, "--canvas", "canvas", st->canvas, "map side length, cells");
    ps.add(app, "--size", "net.size", st->size, "network input side, cells");
    ps.add(app, "--base", "net.base", st->base, "generator base channels");
    ps.add_flag(app, "--spectral-norm,!--no-spectral-norm", "net.spectral_norm",
                st->spectral_norm, "checkpoints were trained with spectral norm");
    ps.add(app, "--panels", "panels", st->panels, "side-by-side images to render");
    ps.add(app, "--beams", "scan.beams", st->beams, "beams per scan");
    ps.add(app, "--max-range", "scan.max_range", st->max_range, "lidar range, m");
    ps.add(app, "--scan-noise", "scan.noise", st->scan_noise, "range noise sigma, m");

    cmd->run = [st](const ParamSet& params) {
        require_out(st->out);
        if (st->coverage <= 0.0 || st->coverage > 1.0)
            throw UsageError("--coverage must be in (0, 1]");
        if (st->panels < 0) throw UsageError("--panels must be nonnegative");
        if (st->beams <= 0 || st->max_range <= 0.0 || st->scan_noise < 0.0)
            throw UsageError("scan parameters out of range");

        sim::Dataset baseline_train;
        eval::Experiment2Options opt;
        opt.models = parse_models(st->models);
        if (!st->baseline_data.empty()) {
            baseline_train = sim::load_dataset_split(st->baseline_data, "train");
            opt.baseline_train = &baseline_train;
        }
        opt.plan = style_params(st->style);
        opt.scan = {st->beams, kTwoPi, st->max_range, st->scan_noise};
        opt.n_envs = st->envs;
        opt.max_steps = st->steps;
        opt.coverage_target = st->coverage;
        opt.particle_count = st->particles;
        opt.canvas_size = st->canvas;
        opt.seed = st->seed;
        opt.net = {st->size, st->base, st->spectral_norm};
        opt.out_dir = st->out;
        opt.panels = st->panels;

        const eval::ExperimentReport rep = run_experiment2(opt);
        write_echo(with_name("eval2", params),
                   std::filesystem::path(st->out) / "resolved_config.json");
        std::cout << report_table(rep);
        return 0;
    };
}

struct RenderState {
    std::string in;
    std::string out;
    int scale = 4;
};

void setup_render(std::vector<std::unique_ptr<Command>>& all, CLI::App& root) {
    Command* cmd = add_command(all, root, "render",
                               "Render a ternary map PGM as a grayscale image");
    auto st = std::make_shared<RenderState>();
    auto& ps = *cmd->params;
    CLI::App* app = cmd->app;
    ps.add(app, "--in", "in", st->in, "map PGM to render");
    ps.add(app, "--out", "out", st->out, "output image path (.png or .pgm)");
    ps.add(app, "--scale", "scale", st->scale, "integer upscale factor");

    cmd->run = [st](const ParamSet& params) {
        require_out(st->out);
        if (st->in.empty()) throw UsageError("--in is required");
        if (st->scale < 1) throw UsageError("--scale must be at least 1");

        const grid::TernaryMap m = grid::load_ternary(st->in);
        util::GrayImage img = util::ternary_to_gray(m);
        if (st->scale > 1) img = upscale(img, st->scale);
        if (st->out.size() >= 4 && st->out.substr(st->out.size() - 4) == ".pgm")
            util::write_pgm_gray(st->out, img);
        else
            util::write_png_gray(st->out, img);
        write_echo(with_name("render", params), st->out + ".config.json");
        std::cout << "wrote " << st->out << "\n";
        return 0;
    };
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"grid SLAM with learned map completion"};
    app.require_subcommand(1);

    std::vector<std::unique_ptr<Command>> commands;
    setup_gen_data(commands, app);
    setup_train(commands, app);
    setup_slam(commands, app);
    setup_complete(commands, app);
    setup_eval1(commands, app);
    setup_eval2(commands, app);
    setup_render(commands, app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    for (const auto& cmd : commands) {
        if (!app.got_subcommand(cmd->app)) continue;
        try {
            return cmd->execute();
        } catch (const UsageError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }
    return 2;
}
