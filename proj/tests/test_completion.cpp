#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "mcslam/completion/discriminator.hpp"
#include "mcslam/completion/generator.hpp"
#include "mcslam/completion/losses.hpp"
#include "mcslam/completion/pipeline.hpp"
#include "mcslam/completion/trainer.hpp"
#include "mcslam/eval/metrics.hpp"
#include "mcslam/grid/ternary.hpp"
#include "mcslam/util/rng.hpp"

using namespace mcslam;
using namespace mcslam::completion;
using grid::TernaryMap;

namespace {

TernaryMap random_ternary(int size, Rng& rng) {
    TernaryMap m(size, size);
    for (auto& v : m.values) {
        const double r = rng.uniform();
        v = r < 1.0 / 3.0 ? 0.0 : (r < 2.0 / 3.0 ? 0.5 : 1.0);
    }
    return m;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(bool(f));
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

/* Converges a stored spectral direction for one flattened kernel. */
void converge_u(std::vector<double>& kernel, int rows, int cols, std::vector<double>& u,
                int iters) {
    std::vector<double> v(static_cast<std::size_t>(cols));
    auto normalize = [](std::vector<double>& x) {
        double n = 0.0;
        for (double t : x) n += t * t;
        n = std::sqrt(n);
        if (n > 0.0)
            for (double& t : x) t /= n;
    };
    for (int it = 0; it < iters; ++it) {
        for (int c = 0; c < cols; ++c) {
            double s = 0.0;
            for (int r = 0; r < rows; ++r) s += kernel[std::size_t(r) * cols + c] * u[std::size_t(r)];
            v[std::size_t(c)] = s;
        }
        normalize(v);
        for (int r = 0; r < rows; ++r) {
            double s = 0.0;
            for (int c = 0; c < cols; ++c) s += kernel[std::size_t(r) * cols + c] * v[std::size_t(c)];
            u[std::size_t(r)] = s;
        }
        normalize(u);
    }
}

/* Walks kernel/bias/sn_u triples and converges every stored direction. */
void converge_all(std::vector<nn::ParamRef> refs) {
    for (std::size_t i = 0; i + 2 < refs.size(); i += 3) {
        REQUIRE(refs[i].name.ends_with(".kernel"));
        REQUIRE(refs[i + 2].name.ends_with(".sn_u"));
        const int rows = int(refs[i].shape[0]);
        const int cols = int(refs[i].shape[1] * refs[i].shape[2] * refs[i].shape[3]);
        converge_u(*refs[i].data, rows, cols, *refs[i + 2].data, 3000);
    }
}

/* Keeps every pre-activation clear of the activation kinks, where central
   differences pick up the slope change. */
void lift_biases(std::vector<nn::ParamRef> refs, double amount) {
    for (auto& r : refs)
        if (r.name.ends_with(".bias"))
            for (double& v : *r.data) v += amount;
}

std::vector<std::vector<double>> snapshot(std::vector<nn::ParamRef> refs) {
    std::vector<std::vector<double>> s;
    for (auto& r : refs) s.push_back(*r.data);
    return s;
}

void restore(std::vector<nn::ParamRef> refs, const std::vector<std::vector<double>>& s) {
    for (std::size_t i = 0; i < refs.size(); ++i) *refs[i].data = s[i];
}

/* Trainable blobs in GenGrads/DiscGrads order: kernel then bias per layer. */
std::vector<std::vector<double>*> trainable_blobs(std::vector<nn::ParamRef> refs) {
    std::vector<std::vector<double>*> out;
    for (auto& r : refs)
        if (!r.name.ends_with(".sn_u")) out.push_back(r.data);
    return out;
}

double rel_err(double fd, double an) {
    return std::abs(fd - an) / std::max({1e-3, std::abs(fd), std::abs(an)});
}

struct GanEnv {
    Generator g;
    Discriminator d;
    nn::Tensor cond, real;
    double lambda = 3.0;
    std::uint64_t call_seed = 0;

    GanStepResult run() {
        Rng rng(call_seed);
        return gan_losses(g, d, cond, real, lambda, rng);
    }
};

GanEnv make_gan_env(std::uint64_t seed, bool g_sn) {
    GeneratorConfig gc;
    gc.size = 16;
    gc.base = 4;
    gc.spectral_norm = g_sn;
    DiscriminatorConfig dc;
    dc.size = 16;
    dc.base = 4;
    GanEnv env{Generator(gc), Discriminator(dc), {}, {}, 3.0, mix_seed(seed, 77)};
    Rng gi(mix_seed(seed, 1)), di(mix_seed(seed, 2)), mi(mix_seed(seed, 3));
    env.g.init(gi);
    env.d.init(di);
    lift_biases(env.g.param_refs(), 0.05);
    lift_biases(env.d.param_refs(), 0.05);
    env.cond = nn::Tensor(1, 2, 16, 16);
    env.real = nn::Tensor(1, 2, 16, 16);
    for (auto& v : env.cond.data) v = mi.uniform() < 0.5 ? 0.0 : 1.0;
    for (auto& v : env.real.data) v = mi.uniform() < 0.5 ? 0.0 : 1.0;
    return env;
}

/* Central finite differences through the full adversarial step, comparing
   against the analytic gradients for a sampled set of parameters. */
void check_gan_fd(GanEnv& env, bool check_gen, int samples, Rng& pick) {
    auto g_refs = env.g.param_refs();
    auto d_refs = env.d.param_refs();
    const auto snap_g = snapshot(g_refs);
    const auto snap_d = snapshot(d_refs);
    auto reset = [&] {
        restore(env.g.param_refs(), snap_g);
        restore(env.d.param_refs(), snap_d);
    };

    reset();
    const GanStepResult base = env.run();

    std::vector<std::vector<double>*> blobs =
        trainable_blobs(check_gen ? env.g.param_refs() : env.d.param_refs());
    std::vector<const std::vector<double>*> grads;
    if (check_gen) {
        for (const auto& l : base.g_grads.layers) {
            grads.push_back(&l.kernel.data);
            grads.push_back(&l.bias);
        }
    } else {
        for (const auto& l : base.d_grads.layers) {
            grads.push_back(&l.kernel.data);
            grads.push_back(&l.bias);
        }
    }
    REQUIRE(blobs.size() == grads.size());

    const double eps = 1e-5;
    for (int s = 0; s < samples; ++s) {
        const std::size_t bi = std::size_t(pick.uniform_int(0, std::int64_t(blobs.size()) - 1));
        if (blobs[bi]->empty()) continue;
        const std::size_t ei = std::size_t(pick.uniform_int(0, std::int64_t(blobs[bi]->size()) - 1));

        reset();
        (*blobs[bi])[ei] += eps;
        const GanStepResult up = env.run();
        reset();
        (*blobs[bi])[ei] -= eps;
        const GanStepResult dn = env.run();

        const double fd = check_gen ? (up.g_loss - dn.g_loss) / (2 * eps)
                                    : (up.d_loss - dn.d_loss) / (2 * eps);
        const double an = (*grads[bi])[ei];
        INFO("blob " << bi << " elem " << ei << " fd " << fd << " analytic " << an);
        CHECK(rel_err(fd, an) < 1e-4);
    }
    reset();
}

/* Border walls plus one pattern-dependent interior wall; the right half of
   the partial map is unsearched. */
sim::DatasetBundle make_learnable_dataset(int size, int per_pattern, int patterns) {
    sim::DatasetBundle b;
    b.train.split = "train";
    b.val.split = "val";
    b.test.split = "test";
    auto full_map = [&](int k) {
        TernaryMap m(size, size);
        std::fill(m.values.begin(), m.values.end(), 0.0);
        for (int c = 0; c < size; ++c) {
            m.at(c, 0) = 1.0;
            m.at(c, size - 1) = 1.0;
        }
        for (int r = 0; r < size; ++r) {
            m.at(0, r) = 1.0;
            m.at(size - 1, r) = 1.0;
        }
        const int row = (size / (patterns + 1)) * (k + 1);
        for (int c = 2; c < size - 2; ++c) m.at(c, row) = 1.0;
        return m;
    };
    auto partial_map = [&](const TernaryMap& full) {
        TernaryMap m = full;
        for (int r = 0; r < size; ++r)
            for (int c = size / 2; c < size; ++c) m.at(c, r) = 0.5;
        return m;
    };
    for (int k = 0; k < patterns; ++k) {
        const TernaryMap full = full_map(k);
        const TernaryMap part = partial_map(full);
        for (int i = 0; i < per_pattern; ++i)
            b.train.entries.push_back({"p" + std::to_string(k) + "_" + std::to_string(i),
                                       part, full});
        b.val.entries.push_back({"v" + std::to_string(k), part, full});
    }
    return b;
}

std::filesystem::path fresh_dir(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("network input packing and its inverse") {
    SUBCASE("all-unsearched map") {
        TernaryMap m(64, 64);
        const nn::Tensor x = pack_input(m, 64);
        for (int r = 0; r < 64; ++r)
            for (int c = 0; c < 64; ++c) {
                REQUIRE(x.at(0, 0, r, c) == 0.5);
                REQUIRE(x.at(0, 1, r, c) == 1.0);
            }
    }
    SUBCASE("fully searched map has an empty mask channel") {
        TernaryMap m(64, 64);
        std::fill(m.values.begin(), m.values.end(), 0.0);
        m.at(3, 7) = 1.0;
        const nn::Tensor x = pack_input(m, 64);
        for (int r = 0; r < 64; ++r)
            for (int c = 0; c < 64; ++c) REQUIRE(x.at(0, 1, r, c) == 0.0);
        CHECK(x.at(0, 0, 7, 3) == 1.0);
    }
    SUBCASE("wrong size throws") {
        CHECK_THROWS_AS(pack_input(TernaryMap(32, 32), 64), std::invalid_argument);
        CHECK_THROWS_AS(pack_input(TernaryMap(64, 32), 64), std::invalid_argument);
    }
    SUBCASE("pack then discretize is the identity on legal maps") {
        Rng rng(0xABCDu);
        for (int trial = 0; trial < 20; ++trial) {
            TernaryMap m = random_ternary(64, rng);
            m.resolution = 0.07;
            m.origin = {1.0, -2.0, 0.0};
            const nn::Tensor x = pack_input(m, 64);
            const TernaryMap back = unpack_output(x, 0, m);
            CHECK(back == m);
        }
    }
}

TEST_CASE("generator output is a legal ternary map and deterministic mode is pure") {
    GeneratorConfig gc;
    gc.size = 32;
    gc.base = 8;
    Generator g(gc);
    Rng init(42);
    g.init(init);

    Rng mr(7);
    TernaryMap m = random_ternary(32, mr);
    m.resolution = 0.1;
    m.origin = {0.5, 0.25, 0.0};

    Rng r1(1), r2(1), r3(2), r4(3);
    const TernaryMap a = generate(g, m, r1, false);
    const TernaryMap b = generate(g, m, r2, false);
    CHECK(a == b);
    CHECK(grid::is_legal_ternary(a));
    CHECK(a.width == 32);
    CHECK(a.resolution == 0.1);
    CHECK(a.origin == m.origin);

    const TernaryMap s1 = generate(g, m, r3, true);
    const TernaryMap s2 = generate(g, m, r4, true);
    CHECK(grid::is_legal_ternary(s1));
    CHECK(grid::is_legal_ternary(s2));
}

TEST_CASE("mean squared error loss") {
    SUBCASE("identical tensors score zero") {
        Rng rng(5);
        nn::Tensor t = nn::randn(2, 2, 4, 4, rng, 1.0);
        const L2Loss l = l2_loss(t, t);
        CHECK(l.value == 0.0);
        for (double g : l.grad.data) CHECK(g == 0.0);
    }
    SUBCASE("constant offset") {
        Rng rng(6);
        nn::Tensor t = nn::randn(1, 2, 8, 8, rng, 1.0);
        nn::Tensor p = t;
        for (auto& v : p.data) v += 0.1;
        const L2Loss l = l2_loss(p, t);
        CHECK(l.value == doctest::Approx(0.01).epsilon(1e-12));
    }
    SUBCASE("shape mismatch throws") {
        nn::Tensor a(1, 2, 4, 4), b(1, 2, 4, 5);
        CHECK_THROWS_AS(l2_loss(a, b), std::invalid_argument);
    }
    SUBCASE("gradient matches finite differences") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            Rng rng(mix_seed(0xE11, seed));
            nn::Tensor p = nn::randn(2, 2, 3, 5, rng, 1.0);
            nn::Tensor t = nn::randn(2, 2, 3, 5, rng, 1.0);
            const L2Loss l = l2_loss(p, t);
            const double eps = 1e-5;
            for (int probe = 0; probe < 5; ++probe) {
                const std::size_t i =
                    std::size_t(rng.uniform_int(0, std::int64_t(p.data.size()) - 1));
                nn::Tensor up = p, dn = p;
                up.data[i] += eps;
                dn.data[i] -= eps;
                const double fd =
                    (l2_loss(up, t).value - l2_loss(dn, t).value) / (2 * eps);
                CHECK(rel_err(fd, l.grad.data[i]) < 1e-4);
            }
        }
    }
}

TEST_CASE("adversarial step values") {
    GanEnv env = make_gan_env(0x60D, true);

    SUBCASE("a critic stuck at one half yields the distribution-equality loss") {
        /* zero weights stay zero under normalization, so every logit is 0 */
        for (auto& r : env.d.param_refs())
            if (!r.name.ends_with(".sn_u"))
                std::fill(r.data->begin(), r.data->end(), 0.0);
        const GanStepResult res = env.run();
        CHECK(std::abs(res.d_loss - 2.0 * std::log(2.0)) < 1e-12);
        CHECK(std::abs(res.g_adv - std::log(2.0)) < 1e-12);
    }

    SUBCASE("lambda scales only the reconstruction term") {
        const auto snap_g = snapshot(env.g.param_refs());
        const auto snap_d = snapshot(env.d.param_refs());

        env.lambda = 0.0;
        const GanStepResult r0 = env.run();
        CHECK(r0.g_loss == r0.g_adv);
        CHECK(r0.l2 > 0.0);

        restore(env.g.param_refs(), snap_g);
        restore(env.d.param_refs(), snap_d);
        env.lambda = 5.0;
        const GanStepResult r5 = env.run();
        CHECK(r5.l2 == r0.l2);
        CHECK(r5.g_adv == r0.g_adv);
        CHECK(std::abs(r5.g_loss - (r5.g_adv + 5.0 * r5.l2)) < 1e-12);
    }

    SUBCASE("input validation") {
        nn::Tensor bad(1, 2, 16, 8);
        Rng rng(1);
        CHECK_THROWS_AS(gan_losses(env.g, env.d, bad, env.real, 1.0, rng),
                        std::invalid_argument);
        CHECK_THROWS_AS(gan_losses(env.g, env.d, env.cond, env.real, -1.0, rng),
                        std::invalid_argument);
    }
}

TEST_CASE("adversarial gradients match finite differences") {
    SUBCASE("generator parameters, raw weights") {
        GanEnv env = make_gan_env(0xFD01, false);
        Rng pick(0xFD02);
        check_gan_fd(env, true, 12, pick);
    }
    SUBCASE("generator parameters, normalized weights") {
        GanEnv env = make_gan_env(0xFD03, true);
        converge_all(env.g.param_refs());
        converge_all(env.d.param_refs());
        Rng pick(0xFD04);
        check_gan_fd(env, true, 12, pick);
    }
    SUBCASE("critic parameters") {
        GanEnv env = make_gan_env(0xFD05, false);
        converge_all(env.d.param_refs());
        Rng pick(0xFD06);
        check_gan_fd(env, false, 12, pick);
    }
}

TEST_CASE("reconstruction-mode gradients match finite differences") {
    GeneratorConfig gc;
    gc.size = 16;
    gc.base = 4;
    gc.spectral_norm = false;
    Generator g(gc);
    Rng init(0xBEE);
    g.init(init);
    lift_biases(g.param_refs(), 0.05);
    Rng mi(0xBEF);
    nn::Tensor cond(1, 2, 16, 16), real(1, 2, 16, 16);
    for (auto& v : cond.data) v = mi.uniform() < 0.5 ? 0.0 : 1.0;
    for (auto& v : real.data) v = mi.uniform() < 0.5 ? 0.0 : 1.0;

    auto loss_of = [&]() {
        Rng rng(0xC0FFEE);
        GenCache cache;
        const nn::Tensor fake = g.forward_train(cond, rng, cache);
        return l2_loss(fake, real);
    };

    const auto snap = snapshot(g.param_refs());
    Rng rng(0xC0FFEE);
    GenCache cache;
    const nn::Tensor fake = g.forward_train(cond, rng, cache);
    const L2Loss base = l2_loss(fake, real);
    GenGrads grads;
    g.backward(base.grad, cache, grads);

    std::vector<std::vector<double>*> blobs = trainable_blobs(g.param_refs());
    std::vector<const std::vector<double>*> gptr;
    for (const auto& l : grads.layers) {
        gptr.push_back(&l.kernel.data);
        gptr.push_back(&l.bias);
    }
    REQUIRE(blobs.size() == gptr.size());

    Rng pick(0xD00D);
    const double eps = 1e-5;
    for (int s = 0; s < 15; ++s) {
        const std::size_t bi = std::size_t(pick.uniform_int(0, std::int64_t(blobs.size()) - 1));
        if (blobs[bi]->empty()) continue;
        const std::size_t ei =
            std::size_t(pick.uniform_int(0, std::int64_t(blobs[bi]->size()) - 1));
        restore(g.param_refs(), snap);
        (*blobs[bi])[ei] += eps;
        const double up = loss_of().value;
        restore(g.param_refs(), snap);
        (*blobs[bi])[ei] -= eps;
        const double dn = loss_of().value;
        const double fd = (up - dn) / (2 * eps);
        INFO("blob " << bi << " elem " << ei);
        CHECK(rel_err(fd, (*gptr[bi])[ei]) < 1e-4);
    }
}

TEST_CASE("crop window selection and round trip") {
    SUBCASE("interior searched blob, crop/paste is the identity") {
        TernaryMap m(100, 80);
        for (int r = 10; r <= 20; ++r)
            for (int c = 70; c <= 75; ++c) m.at(c, r) = (r + c) % 2 ? 0.0 : 1.0;
        const CropWindow win = compute_crop_window(m, 64);
        CHECK(win.size == 64);
        CHECK(win.col0 >= 0);
        CHECK(win.col0 + 64 <= 100);
        CHECK(win.row0 >= 0);
        CHECK(win.row0 + 64 <= 80);
        CHECK(win.col0 <= 70);
        CHECK(win.col0 + 64 > 75);
        CHECK(win.row0 <= 10);
        CHECK(win.row0 + 64 > 20);
        const TernaryMap crop = crop_to_window(m, win);
        CHECK(paste_from_window(m, crop, win) == m);
    }
    SUBCASE("map smaller than the field pads with unsearched") {
        TernaryMap m(20, 20);
        std::fill(m.values.begin(), m.values.end(), 0.0);
        m.at(5, 5) = 1.0;
        const CropWindow win = compute_crop_window(m, 64);
        const TernaryMap crop = crop_to_window(m, win);
        CHECK(crop.width == 64);
        CHECK(crop.at(0, 0) == 0.5);   /* overhang */
        CHECK(paste_from_window(m, crop, win) == m);
    }
    SUBCASE("nothing searched centers the window without throwing") {
        TernaryMap m(128, 128);
        const CropWindow win = compute_crop_window(m, 64);
        CHECK(win.col0 >= 0);
        CHECK(win.col0 + 64 <= 128);
        CHECK(win.col0 <= 64);
        CHECK(win.col0 + 64 > 64);
        CHECK(win.row0 <= 64);
        CHECK(win.row0 + 64 > 64);
    }
    SUBCASE("searched region wider than the field throws") {
        TernaryMap m(100, 80);
        for (int c = 10; c < 90; ++c) m.at(c, 40) = 1.0;
        CHECK_THROWS_WITH_AS(compute_crop_window(m, 64),
                             doctest::Contains("multiple crops"), std::runtime_error);
    }
    SUBCASE("window clamps to the map edge") {
        TernaryMap m(100, 100);
        m.at(99, 50) = 1.0;
        const CropWindow win = compute_crop_window(m, 64);
        CHECK(win.col0 == 36);
    }
}

TEST_CASE("full-grid completion keeps cells outside the crop") {
    GeneratorConfig gc;
    gc.size = 64;
    gc.base = 4;
    Generator g(gc);
    Rng init(0x11);
    g.init(init);

    grid::OccupancyGrid occ(96, 72, 0.1, {0.0, 0.0, 0.0});
    for (int r = 20; r < 40; ++r)
        for (int c = 30; c < 60; ++c)
            occ.add_log_odds(c, r, (r * 31 + c) % 3 == 0 ? 2.0 : -2.0);

    Rng rng(0x12);
    const TernaryMap out = complete_map(g, occ, rng, false);
    CHECK(out.width == 96);
    CHECK(out.height == 72);
    CHECK(grid::is_legal_ternary(out));
    CHECK(out.resolution == 0.1);

    const TernaryMap in = grid::to_ternary(occ);
    const CropWindow win = compute_crop_window(in, 64);
    for (int r = 0; r < 72; ++r)
        for (int c = 0; c < 96; ++c) {
            const bool inside = c >= win.col0 && c < win.col0 + 64 && r >= win.row0 &&
                                r < win.row0 + 64;
            if (!inside) REQUIRE(out.at(c, r) == in.at(c, r));
        }
}

TEST_CASE("training runs are reproducible and learn") {
    const sim::DatasetBundle data = make_learnable_dataset(32, 8, 3);

    TrainConfig cfg;
    cfg.mode = TrainMode::l2;
    cfg.epochs = 50;
    cfg.batch = 8;
    cfg.lr = 1e-3;
    cfg.seed = 7;
    cfg.checkpoint_every = 20;
    cfg.net_size = 32;
    cfg.g_base = 8;

    const auto dir1 = fresh_dir("mcslam_train_a");
    const auto dir2 = fresh_dir("mcslam_train_b");

    cfg.out_dir = dir1.string();
    const TrainResult r1 = train(data, cfg);
    REQUIRE_FALSE(r1.diverged);
    REQUIRE(r1.log.size() == 50);
    CHECK(r1.log.back().train_l2 < 0.25 * r1.log.front().train_l2);
    CHECK(r1.log.back().val_f > r1.log.front().val_f);
    CHECK(std::filesystem::exists(dir1 / "g_epoch20.ckpt"));
    CHECK(std::filesystem::exists(dir1 / "g_epoch40.ckpt"));
    CHECK(std::filesystem::exists(dir1 / "g_final.ckpt"));
    CHECK(std::filesystem::exists(dir1 / "metrics.jsonl"));

    cfg.out_dir = dir2.string();
    const TrainResult r2 = train(data, cfg);
    CHECK(slurp(dir1 / "g_final.ckpt") == slurp(dir2 / "g_final.ckpt"));
    CHECK(slurp(dir1 / "metrics.jsonl") == slurp(dir2 / "metrics.jsonl"));

    SUBCASE("an empty training split is rejected") {
        sim::DatasetBundle empty;
        CHECK_THROWS_AS(train(empty, cfg), std::invalid_argument);
    }
}

TEST_CASE("adversarial training keeps the critic loss in band") {
    const sim::DatasetBundle data = make_learnable_dataset(16, 4, 3);

    TrainConfig cfg;
    cfg.mode = TrainMode::gan;
    cfg.epochs = 4;
    cfg.batch = 4;
    cfg.lambda = 10.0;
    cfg.seed = 3;
    cfg.checkpoint_every = 0;
    cfg.net_size = 16;
    cfg.g_base = 4;
    cfg.d_base = 4;

    const auto dir1 = fresh_dir("mcslam_gan_a");
    const auto dir2 = fresh_dir("mcslam_gan_b");

    cfg.out_dir = dir1.string();
    const TrainResult r1 = train(data, cfg);
    REQUIRE_FALSE(r1.diverged);
    REQUIRE(r1.log.size() == 4);
    for (const auto& e : r1.log) {
        CHECK(e.d_loss > 0.0);
        CHECK(e.d_loss < 4.0 * std::log(2.0) + 1.0);
    }
    CHECK(std::filesystem::exists(dir1 / "g_final.ckpt"));
    CHECK(std::filesystem::exists(dir1 / "d_final.ckpt"));

    cfg.out_dir = dir2.string();
    train(data, cfg);
    CHECK(slurp(dir1 / "d_final.ckpt") == slurp(dir2 / "d_final.ckpt"));
    CHECK(slurp(dir1 / "g_final.ckpt") == slurp(dir2 / "g_final.ckpt"));
}

TEST_CASE("divergence rolls back to the last finite epoch") {
    const sim::DatasetBundle data = make_learnable_dataset(16, 2, 2);

    TrainConfig cfg;
    cfg.mode = TrainMode::l2;
    cfg.epochs = 4;
    cfg.batch = 4;
    cfg.lr = 1e200;   /* guarantees overflow on the second epoch's forward */
    cfg.seed = 11;
    cfg.net_size = 16;
    cfg.g_base = 4;
    cfg.spectral_norm = false;
    cfg.out_dir = fresh_dir("mcslam_diverge").string();

    const TrainResult r = train(data, cfg);
    CHECK(r.diverged);
    CHECK(r.last_good_epoch <= 1);
    CHECK(r.log.size() == std::size_t(r.last_good_epoch));
    CHECK(r.divergence_message.find("epoch") != std::string::npos);
    CHECK(r.divergence_message.find("rolled back") != std::string::npos);

    Generator g = r.g;
    for (auto& ref : g.param_refs())
        for (double v : *ref.data) REQUIRE(std::isfinite(v));
}
