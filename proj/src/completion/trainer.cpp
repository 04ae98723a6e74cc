#include "mcslam/completion/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <utility>

#include "mcslam/completion/losses.hpp"
#include "mcslam/completion/pipeline.hpp"
#include "mcslam/eval/metrics.hpp"
#include "mcslam/util/rng.hpp"

namespace mcslam::completion {

namespace {

/* Collects batch elements `order[begin..begin+count)` out of per-entry
   (1,C,H,W) tensors. */
nn::Tensor gather(const std::vector<nn::Tensor>& singles, const std::vector<int>& order,
                  std::size_t begin, std::size_t count) {
    const nn::Tensor& first = singles[std::size_t(order[begin])];
    nn::Tensor out(int(count), first.c, first.h, first.w);
    const std::size_t plane = first.data.size();
    for (std::size_t k = 0; k < count; ++k) {
        const nn::Tensor& s = singles[std::size_t(order[begin + k])];
        std::copy(s.data.begin(), s.data.end(), out.data.begin() + std::ptrdiff_t(k * plane));
    }
    return out;
}

std::vector<std::vector<double>> snapshot_params(std::vector<nn::ParamRef> refs) {
    std::vector<std::vector<double>> snap;
    snap.reserve(refs.size());
    for (const auto& r : refs) snap.push_back(*r.data);
    return snap;
}

void restore_params(std::vector<nn::ParamRef> refs,
                    const std::vector<std::vector<double>>& snap) {
    for (std::size_t i = 0; i < refs.size(); ++i) *refs[i].data = snap[i];
}

void append_metric_line(const std::string& path, const EpochLog& e, TrainMode mode) {
    std::FILE* f = std::fopen(path.c_str(), "ab");
    if (!f) throw std::runtime_error("cannot open metric log " + path);
    if (mode == TrainMode::gan) {
        std::fprintf(f,
                     "{\"epoch\":%d,\"d_loss\":%.17g,\"g_loss\":%.17g,\"train_l2\":%.17g,"
                     "\"val_l2\":%.17g,\"val_f\":%.17g}\n",
                     e.epoch, e.d_loss, e.g_loss, e.train_l2, e.val_l2, e.val_f);
    } else {
        std::fprintf(f, "{\"epoch\":%d,\"train_l2\":%.17g,\"val_l2\":%.17g,\"val_f\":%.17g}\n",
                     e.epoch, e.train_l2, e.val_l2, e.val_f);
    }
    std::fclose(f);
}

}  // namespace

TrainResult train(const sim::DatasetBundle& data, const TrainConfig& cfg) {
    if (cfg.epochs <= 0 || cfg.batch <= 0)
        throw std::invalid_argument("train: epochs and batch must be positive");
    if (cfg.lambda < 0.0) throw std::invalid_argument("train: lambda must be nonnegative");
    if (data.train.entries.empty()) throw std::invalid_argument("train: empty training split");

    GeneratorConfig gcfg;
    gcfg.size = cfg.net_size;
    gcfg.base = cfg.g_base;
    gcfg.dropout = cfg.dropout;
    gcfg.spectral_norm = cfg.spectral_norm;
    DiscriminatorConfig dcfg;
    dcfg.size = cfg.net_size;
    dcfg.base = cfg.d_base;

    TrainResult res{Generator(gcfg), Discriminator(dcfg), {}, false, 0, {}};
    Rng g_init(mix_seed(cfg.seed, 0, 1));
    res.g.init(g_init);
    if (cfg.mode == TrainMode::gan) {
        Rng d_init(mix_seed(cfg.seed, 0, 2));
        res.d.init(d_init);
    }

    nn::AdamConfig adam;
    adam.lr = cfg.lr;
    adam.beta1 = cfg.beta1;
    adam.beta2 = cfg.beta2;

    /* Pack the dataset once; batches are gathered per step. */
    std::vector<nn::Tensor> train_cond, train_real, val_cond, val_real;
    for (const auto& e : data.train.entries) {
        train_cond.push_back(pack_input(e.partial, cfg.net_size));
        train_real.push_back(pack_input(e.full, cfg.net_size));
    }
    for (const auto& e : data.val.entries) {
        val_cond.push_back(pack_input(e.partial, cfg.net_size));
        val_real.push_back(pack_input(e.full, cfg.net_size));
    }

    const bool writing = !cfg.out_dir.empty();
    std::string metric_path;
    if (writing) {
        std::filesystem::create_directories(cfg.out_dir);
        metric_path = (std::filesystem::path(cfg.out_dir) / "metrics.jsonl").string();
        std::FILE* f = std::fopen(metric_path.c_str(), "wb");   /* truncate previous run */
        if (!f) throw std::runtime_error("cannot open metric log " + metric_path);
        std::fclose(f);
    }

    const int n_train = int(data.train.entries.size());
    std::vector<int> order(static_cast<std::size_t>(n_train));
    for (int i = 0; i < n_train; ++i) order[std::size_t(i)] = i;

    std::vector<std::vector<double>> good_g = snapshot_params(res.g.param_refs());
    std::vector<std::vector<double>> good_d;
    if (cfg.mode == TrainMode::gan) good_d = snapshot_params(res.d.param_refs());

    auto save_nets = [&](const std::string& g_name, const std::string& d_name,
                         std::uint64_t step) {
        const auto dir = std::filesystem::path(cfg.out_dir);
        nn::save_checkpoint((dir / g_name).string(), res.g.arch_hash(), step,
                            res.g.param_refs());
        if (cfg.mode == TrainMode::gan)
            nn::save_checkpoint((dir / d_name).string(), res.d.arch_hash(), step,
                                res.d.param_refs());
    };

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        EpochLog log;
        log.epoch = epoch;
        try {
            Rng shuffle_rng(mix_seed(cfg.seed, std::uint64_t(epoch), 0));
            for (int i = n_train - 1; i > 0; --i) {
                const int j = int(shuffle_rng.uniform_int(0, i));
                std::swap(order[std::size_t(i)], order[std::size_t(j)]);
            }

            double sum_d = 0.0, sum_g = 0.0, sum_l2 = 0.0;
            int batches = 0;
            for (std::size_t begin = 0; begin < std::size_t(n_train); begin += std::size_t(cfg.batch)) {
                const std::size_t count =
                    std::min(std::size_t(cfg.batch), std::size_t(n_train) - begin);
                nn::Tensor cond = gather(train_cond, order, begin, count);
                nn::Tensor real = gather(train_real, order, begin, count);
                Rng step_rng(mix_seed(cfg.seed, std::uint64_t(epoch),
                                      1000 + std::uint64_t(batches)));

                if (cfg.mode == TrainMode::gan) {
                    GanStepResult step = gan_losses(res.g, res.d, cond, real, cfg.lambda, step_rng);
                    res.d.apply_adam(step.d_grads, adam);
                    res.g.apply_adam(step.g_grads, adam);
                    sum_d += step.d_loss;
                    sum_g += step.g_loss;
                    sum_l2 += step.l2;
                } else {
                    GenCache cache;
                    nn::Tensor fake = res.g.forward_train(cond, step_rng, cache);
                    L2Loss rec = l2_loss(fake, real);
                    if (!std::isfinite(rec.value))
                        throw std::runtime_error("non-finite training loss");
                    GenGrads grads;
                    res.g.backward(rec.grad, cache, grads);
                    res.g.apply_adam(grads, adam);
                    sum_l2 += rec.value;
                }
                ++batches;
            }
            log.d_loss = batches ? sum_d / batches : 0.0;
            log.g_loss = batches ? sum_g / batches : 0.0;
            log.train_l2 = batches ? sum_l2 / batches : 0.0;

            Rng val_rng(mix_seed(cfg.seed, std::uint64_t(epoch), 2));
            double vsum = 0.0, fsum = 0.0;
            for (std::size_t i = 0; i < val_cond.size(); ++i) {
                nn::Tensor y = res.g.forward(val_cond[i], val_rng, false);
                vsum += l2_loss(y, val_real[i]).value;
                const grid::TernaryMap pred =
                    unpack_output(y, 0, data.val.entries[i].full);
                fsum += eval::metrics(eval::confusion(pred, data.val.entries[i].full)).f_measure;
            }
            if (!val_cond.empty()) {
                log.val_l2 = vsum / double(val_cond.size());
                log.val_f = fsum / double(val_cond.size());
            }
            if (!std::isfinite(log.train_l2) || !std::isfinite(log.val_l2))
                throw std::runtime_error("non-finite epoch loss");
        } catch (const std::runtime_error& err) {
            restore_params(res.g.param_refs(), good_g);
            if (cfg.mode == TrainMode::gan) restore_params(res.d.param_refs(), good_d);
            res.diverged = true;
            res.divergence_message =
                "epoch " + std::to_string(epoch) + ": " + err.what() +
                "; rolled back to epoch " + std::to_string(res.last_good_epoch);
            break;
        }

        res.log.push_back(log);
        res.last_good_epoch = epoch;
        good_g = snapshot_params(res.g.param_refs());
        if (cfg.mode == TrainMode::gan) good_d = snapshot_params(res.d.param_refs());

        if (writing) {
            append_metric_line(metric_path, log, cfg.mode);
            if (cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0 &&
                epoch != cfg.epochs) {
                save_nets("g_epoch" + std::to_string(epoch) + ".ckpt",
                          "d_epoch" + std::to_string(epoch) + ".ckpt", std::uint64_t(epoch));
            }
        }
    }

    if (writing) save_nets("g_final.ckpt", "d_final.ckpt", std::uint64_t(res.last_good_epoch));
    return res;
}

}  // namespace mcslam::completion
