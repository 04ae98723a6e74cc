#include "mcslam/slam/likelihood_field.hpp"

#include <cmath>
#include <limits>

namespace mcslam::slam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/* 1D squared-distance transform (lower envelope of parabolas). Sources with
   infinite f are skipped. */
void dt1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
          std::vector<double>& z, int n) {
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[std::size_t(q)] == kInf) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        double s;
        while (true) {
            int p = v[std::size_t(k)];
            s = ((f[std::size_t(q)] + double(q) * q) - (f[std::size_t(p)] + double(p) * p)) /
                (2.0 * q - 2.0 * p);
            if (s <= z[std::size_t(k)]) {
                --k;
                if (k < 0) break;
            } else {
                break;
            }
        }
        ++k;
        v[std::size_t(k)] = q;
        z[std::size_t(k)] = k == 0 ? -kInf : s;
        z[std::size_t(k) + 1] = kInf;
    }
    if (k < 0) {
        for (int q = 0; q < n; ++q) d[std::size_t(q)] = kInf;
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[std::size_t(j) + 1] < q) ++j;
        int p = v[std::size_t(j)];
        d[std::size_t(q)] = double(q - p) * (q - p) + f[std::size_t(p)];
    }
}

}  // namespace

LikelihoodField build_likelihood_field(const grid::OccupancyGrid& map) {
    LikelihoodField field;
    field.width = map.width();
    field.height = map.height();
    field.resolution = map.resolution();
    field.origin = map.origin();
    const int w = field.width, h = field.height;
    field.dist.assign(std::size_t(w) * h, kInf);
    field.searched.assign(std::size_t(w) * h, 0);

    std::vector<double> sq(std::size_t(w) * h);
    for (int row = 0; row < h; ++row)
        for (int col = 0; col < w; ++col) {
            double lo = map.log_odds(col, row);
            sq[field.index(col, row)] = lo > 0.0 ? 0.0 : kInf;
            field.searched[field.index(col, row)] = lo != 0.0 ? 1 : 0;
        }

    const auto n = std::size_t(std::max(w, h));
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);
    for (int col = 0; col < w; ++col) {
        for (int row = 0; row < h; ++row) f[std::size_t(row)] = sq[field.index(col, row)];
        dt1d(f, d, v, z, h);
        for (int row = 0; row < h; ++row) sq[field.index(col, row)] = d[std::size_t(row)];
    }
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) f[std::size_t(col)] = sq[field.index(col, row)];
        dt1d(f, d, v, z, w);
        for (int col = 0; col < w; ++col)
            field.dist[field.index(col, row)] =
                d[std::size_t(col)] == kInf ? kInf : std::sqrt(d[std::size_t(col)]) * field.resolution;
    }
    return field;
}

double measurement_likelihood(const sim::Scan& scan, const grid::Pose2D& pose,
                              const LikelihoodField& field, const SensorModel& model) {
    const double uniform = model.z_rand / model.max_range;
    const double norm = 1.0 / (model.hit_sigma * std::sqrt(2.0 * 3.14159265358979323846));
    const double inv_two_sq = 1.0 / (2.0 * model.hit_sigma * model.hit_sigma);
    double total = 0.0;
    for (int i = 0; i < int(scan.ranges.size()); ++i) {
        double r = scan.ranges[std::size_t(i)] + kEndpointCellNudge * field.resolution;
        double angle = pose.theta + sim::beam_bearing(scan, i);
        double ex = pose.x + r * std::cos(angle);
        double ey = pose.y + r * std::sin(angle);
        int col = int(std::floor((ex - field.origin.x) / field.resolution));
        int row = int(std::floor((ey - field.origin.y) / field.resolution));
        if (!field.in_bounds(col, row) || !field.searched[field.index(col, row)] ||
            field.dist[field.index(col, row)] == kInf) {
            total += std::log(uniform);
            continue;
        }
        double d = field.dist[field.index(col, row)];
        total += std::log(model.z_hit * norm * std::exp(-d * d * inv_two_sq) + uniform);
    }
    return total;
}

double measurement_likelihood(const sim::Scan& scan, const grid::Pose2D& pose,
                              const grid::OccupancyGrid& map, const SensorModel& model) {
    return measurement_likelihood(scan, pose, build_likelihood_field(map), model);
}

}  // namespace mcslam::slam
