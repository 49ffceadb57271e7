#include "leafpick/dbscan.hpp"

#include <deque>

#include "leafpick/kdtree.hpp"

namespace leafpick {

std::vector<std::vector<std::uint32_t>> ClusterLabels::cluster_indices() const {
    std::vector<std::vector<std::uint32_t>> out(n_clusters);
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= 0) out[labels[i]].push_back(static_cast<std::uint32_t>(i));
    return out;
}

ClusterLabels dbscan(const PointCloud& cloud, const ClusteringParams& params) {
    const std::size_t n = cloud.size();
    ClusterLabels result;
    result.labels.assign(n, kNoise);
    if (n == 0) return result;

    KdTree tree(cloud);
    constexpr std::int32_t kUnvisited = -2;
    std::vector<std::int32_t> label(n, kUnvisited);
    std::int32_t next_cluster = 0;

    for (std::uint32_t seed = 0; seed < n; ++seed) {
        if (label[seed] != kUnvisited) continue;
        auto nb = tree.radius_neighbors(cloud.points[seed], params.eps);
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
            if (label[p] == kNoise) label[p] = cid;  // border point
            if (label[p] != kUnvisited) continue;
            label[p] = cid;
            auto pnb = tree.radius_neighbors(cloud.points[p], params.eps);
            if (pnb.size() >= params.min_points)
                frontier.insert(frontier.end(), pnb.begin(), pnb.end());
        }
    }

    result.labels.assign(label.begin(), label.end());
    result.n_clusters = next_cluster;
    return result;
}

}  // namespace leafpick
