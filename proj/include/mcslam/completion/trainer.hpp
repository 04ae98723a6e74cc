#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcslam/completion/discriminator.hpp"
#include "mcslam/completion/generator.hpp"
#include "mcslam/sim/dataset.hpp"

namespace mcslam::completion {

enum class TrainMode { l2, gan };

struct TrainConfig {
    TrainMode mode = TrainMode::l2;
    int epochs = 100;
    int batch = 8;
    double lr = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double dropout = 0.5;
    double lambda = 10.0;        // reconstruction weight in gan mode
    std::uint64_t seed = 1;
    int checkpoint_every = 25;   // 0 disables periodic checkpoints
    int net_size = 64;
    int g_base = 16;
    int d_base = 32;
    bool spectral_norm = true;
    std::string out_dir;         // empty: no checkpoints, no metric log
};

struct EpochLog {
    int epoch = 0;
    double d_loss = 0.0;    // gan mode only
    double g_loss = 0.0;    // gan mode only
    double train_l2 = 0.0;
    double val_l2 = 0.0;
    double val_f = 0.0;
};

struct TrainResult {
    Generator g;
    Discriminator d;                // untouched in l2 mode
    std::vector<EpochLog> log;
    bool diverged = false;
    int last_good_epoch = 0;        // epoch whose weights survive a divergence rollback
    std::string divergence_message;
};

// Seeded epoch loop over data.train with per-epoch validation on data.val.
// Writes metrics.jsonl plus periodic and final checkpoints under out_dir
// when set. A non-finite loss rolls the weights back to the previous epoch
// and stops early with diverged set. Identical (data, cfg) reruns produce
// byte-identical checkpoints.
TrainResult train(const sim::DatasetBundle& data, const TrainConfig& cfg);

}  // namespace mcslam::completion
