#include "mcslam/completion/pipeline.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mcslam::completion {

nn::Tensor pack_input(const grid::TernaryMap& m, int expected_size) {
    if (m.width != expected_size || m.height != expected_size)
        throw std::invalid_argument("pack_input: map is " + std::to_string(m.width) + "x" +
                                    std::to_string(m.height) + ", network expects " +
                                    std::to_string(expected_size) + " square");
    nn::Tensor x(1, 2, m.height, m.width);
    for (int r = 0; r < m.height; ++r) {
        for (int c = 0; c < m.width; ++c) {
            const double v = m.at(c, r);
            x.at(0, 0, r, c) = v;
            x.at(0, 1, r, c) = v == 0.5 ? 1.0 : 0.0;
        }
    }
    return x;
}

grid::TernaryMap unpack_output(const nn::Tensor& y, int n, const grid::TernaryMap& like) {
    if (y.c != 2 || n < 0 || n >= y.n)
        throw std::invalid_argument("unpack_output: tensor is not a 2-channel batch element");
    std::vector<double> image(std::size_t(y.h) * y.w);
    std::vector<double> mask(std::size_t(y.h) * y.w);
    for (int r = 0; r < y.h; ++r) {
        for (int c = 0; c < y.w; ++c) {
            image[std::size_t(r) * y.w + c] = y.at(n, 0, r, c);
            mask[std::size_t(r) * y.w + c] = y.at(n, 1, r, c);
        }
    }
    grid::TernaryMap out = grid::discretize_output(image, mask, y.w, y.h);
    out.resolution = like.resolution;
    out.origin = like.origin;
    return out;
}

grid::TernaryMap generate(Generator& g, const grid::TernaryMap& m_t, Rng& rng,
                          bool stochastic) {
    const nn::Tensor x = pack_input(m_t, g.config().size);
    const nn::Tensor y = g.forward(x, rng, stochastic);
    return unpack_output(y, 0, m_t);
}

CropWindow compute_crop_window(const grid::TernaryMap& m, int net_size) {
    int minc = m.width, maxc = -1, minr = m.height, maxr = -1;
    for (int r = 0; r < m.height; ++r) {
        for (int c = 0; c < m.width; ++c) {
            if (m.at(c, r) != 0.5) {
                minc = std::min(minc, c);
                maxc = std::max(maxc, c);
                minr = std::min(minr, r);
                maxr = std::max(maxr, r);
            }
        }
    }
    if (maxc < 0) {   /* nothing searched: center on the map */
        minc = maxc = m.width / 2;
        minr = maxr = m.height / 2;
    }
    const int bw = maxc - minc + 1;
    const int bh = maxr - minr + 1;
    if (bw > net_size || bh > net_size)
        throw std::runtime_error(
            "complete_map: searched region (" + std::to_string(bw) + "x" + std::to_string(bh) +
            " cells) exceeds the " + std::to_string(net_size) +
            "-cell network field; split the map into multiple crops");

    CropWindow win;
    win.size = net_size;
    win.col0 = minc - (net_size - bw) / 2;
    win.row0 = minr - (net_size - bh) / 2;
    if (m.width >= net_size)
        win.col0 = std::clamp(win.col0, 0, m.width - net_size);
    else
        win.col0 = (m.width - net_size) / 2;   /* centered overhang */
    if (m.height >= net_size)
        win.row0 = std::clamp(win.row0, 0, m.height - net_size);
    else
        win.row0 = (m.height - net_size) / 2;
    return win;
}

grid::TernaryMap crop_to_window(const grid::TernaryMap& m, const CropWindow& win) {
    grid::Pose2D org = m.origin;
    org.x += win.col0 * m.resolution;
    org.y += win.row0 * m.resolution;
    grid::TernaryMap out(win.size, win.size, m.resolution, org);
    for (int r = 0; r < win.size; ++r) {
        for (int c = 0; c < win.size; ++c) {
            const int mc = win.col0 + c;
            const int mr = win.row0 + r;
            if (mc >= 0 && mc < m.width && mr >= 0 && mr < m.height)
                out.at(c, r) = m.at(mc, mr);
        }
    }
    return out;
}

grid::TernaryMap paste_from_window(const grid::TernaryMap& base,
                                   const grid::TernaryMap& patch, const CropWindow& win) {
    if (patch.width != win.size || patch.height != win.size)
        throw std::invalid_argument("paste_from_window: patch does not match the window");
    grid::TernaryMap out = base;
    for (int r = 0; r < win.size; ++r) {
        for (int c = 0; c < win.size; ++c) {
            const int mc = win.col0 + c;
            const int mr = win.row0 + r;
            if (mc >= 0 && mc < base.width && mr >= 0 && mr < base.height)
                out.at(mc, mr) = patch.at(c, r);
        }
    }
    return out;
}

grid::TernaryMap complete_map(Generator& g, const grid::OccupancyGrid& occ, Rng& rng,
                              bool stochastic) {
    return complete_map(g, grid::to_ternary(occ), rng, stochastic);
}

grid::TernaryMap complete_map(Generator& g, const grid::TernaryMap& m_t, Rng& rng,
                              bool stochastic) {
    const CropWindow win = compute_crop_window(m_t, g.config().size);
    const grid::TernaryMap crop = crop_to_window(m_t, win);
    const grid::TernaryMap gen = generate(g, crop, rng, stochastic);
    return paste_from_window(m_t, gen, win);
}

Generator load_generator(const std::string& checkpoint, const GeneratorConfig& cfg) {
    Generator g(cfg);
    Rng rng(0);
    g.init(rng);   /* sizes the blobs; the load overwrites them */
    nn::load_checkpoint(checkpoint, g.arch_hash(), g.param_refs());
    return g;
}

}  // namespace mcslam::completion
