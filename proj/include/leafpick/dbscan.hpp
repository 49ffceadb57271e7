#pragma once

#include <cstdint>
#include <vector>

#include "leafpick/cloud.hpp"

namespace leafpick {

struct ClusteringParams {
    double eps = 0.012;          // neighbor radius, meters (closed ball)
    std::size_t min_points = 8;  // neighbors (self included) to be a core point

    bool valid() const { return eps > 0.0 && min_points >= 1; }
};

constexpr std::int32_t kNoise = -1;

/// One label per input point: cluster id >= 0 or kNoise. Cluster ids are
/// contiguous from 0 in order of first seed expansion.
struct ClusterLabels {
    std::vector<std::int32_t> labels;
    std::int32_t n_clusters = 0;

    std::vector<std::vector<std::uint32_t>> cluster_indices() const;
};

/// Classic DBSCAN over a kd-tree index. Core point: at least min_points
/// neighbors within eps, the point itself included. Seeds are expanded in
/// ascending index order with FIFO growth, so border-point ties are
/// reproducible.
ClusterLabels dbscan(const PointCloud& cloud, const ClusteringParams& params);

}  // namespace leafpick
