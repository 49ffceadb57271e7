#include "leafpick/reference.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace leafpick::reference {

std::vector<std::uint32_t> radius_neighbors_bruteforce(const PointCloud& cloud,
                                                       const Vec3& q, double r) {
    std::vector<std::uint32_t> out;
    if (r < 0.0) return out;
    double r2 = r * r;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        if ((cloud.points[i] - q).squaredNorm() <= r2)
            out.push_back(static_cast<std::uint32_t>(i));
    return out;
}

PointCloud remove_statistical_outliers_serial(const PointCloud& cloud,
                                              std::size_t k, double std_ratio) {
    const std::size_t n = cloud.size();
    if (n <= k) return cloud;

    std::vector<double> mean_dist(n);
    std::vector<double> dists(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            dists[j] = (cloud.points[j] - cloud.points[i]).norm();
        dists[i] = std::numeric_limits<double>::infinity();  // exclude self
        std::vector<double> copy = dists;
        std::nth_element(copy.begin(), copy.begin() + static_cast<long>(k - 1),
                         copy.end());
        double kth = copy[k - 1];
        double sum = 0.0;
        std::size_t cnt = 0;
        for (std::size_t j = 0; j < n && cnt < k; ++j)
            if (dists[j] <= kth && j != i) {
                sum += dists[j];
                ++cnt;
            }
        mean_dist[i] = sum / static_cast<double>(cnt);
    }

    double mean = 0.0;
    for (double d : mean_dist) mean += d;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double d : mean_dist) var += (d - mean) * (d - mean);
    var /= static_cast<double>(n);
    double cutoff = mean + std_ratio * std::sqrt(var);

    PointCloud out;
    out.frame_id = cloud.frame_id;
    bool rgb = cloud.has_colors();
    for (std::size_t i = 0; i < n; ++i)
        if (mean_dist[i] <= cutoff) {
            out.points.push_back(cloud.points[i]);
            if (rgb) out.colors.push_back(cloud.colors[i]);
        }
    return out;
}

ClusterLabels dbscan_quadratic(const PointCloud& cloud,
                               const ClusteringParams& params) {
    const std::size_t n = cloud.size();
    ClusterLabels result;
    result.labels.assign(n, kNoise);
    if (n == 0) return result;

    auto neighbors = [&](std::uint32_t i) {
        return radius_neighbors_bruteforce(cloud, cloud.points[i], params.eps);
    };

    constexpr std::int32_t kUnvisited = -2;
    std::vector<std::int32_t> label(n, kUnvisited);
    std::int32_t next_cluster = 0;

    for (std::uint32_t seed = 0; seed < n; ++seed) {
        if (label[seed] != kUnvisited) continue;
        auto nb = neighbors(seed);
        if (nb.size() < params.min_points) {
            label[seed] = kNoise;
            continue;
        }
        std::int32_t cid = next_cluster++;
        label[seed] = cid;
        std::deque<std::uint32_t> frontier(nb.begin(), nb.end());
        while (!frontier.empty()) {
            std::uint32_t p = frontier.front();
            frontier.pop_front();
            if (label[p] == kNoise) label[p] = cid;
            if (label[p] != kUnvisited) continue;
            label[p] = cid;
            auto pnb = neighbors(p);
            if (pnb.size() >= params.min_points)
                frontier.insert(frontier.end(), pnb.begin(), pnb.end());
        }
    }

    result.labels.assign(label.begin(), label.end());
    result.n_clusters = next_cluster;
    return result;
}

}  // namespace leafpick::reference
