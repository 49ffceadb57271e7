#pragma once

#include <cstdint>
#include <vector>

#include "leafpick/cloud.hpp"
#include "leafpick/dbscan.hpp"

namespace leafpick::reference {

/// Serial brute-force kernels. These are the oracles the fast paths are
/// tested against and the baselines in the benchmark target; none of them
/// use the kd-tree.

/// O(n) closed-ball scan.
std::vector<std::uint32_t> radius_neighbors_bruteforce(const PointCloud& cloud,
                                                       const Vec3& q, double r);

/// O(n^2) statistical outlier removal, single-threaded.
PointCloud remove_statistical_outliers_serial(const PointCloud& cloud,
                                              std::size_t k, double std_ratio);

/// O(n^2) DBSCAN with the same deterministic labeling contract as the
/// kd-tree implementation.
ClusterLabels dbscan_quadratic(const PointCloud& cloud,
                               const ClusteringParams& params);

}  // namespace leafpick::reference
