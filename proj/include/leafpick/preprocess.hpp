#pragma once

#include "leafpick/cloud.hpp"

namespace leafpick {

struct PreprocessConfig {
    double min_range = 0.15;       // meters, radial from sensor origin
    double max_range = 0.45;
    std::size_t outlier_k = 20;    // k-NN neighborhood for outlier statistic
    double outlier_std_ratio = 2.0;
    double voxel_size = 0.005;     // meters

    bool valid() const {
        return min_range >= 0.0 && min_range < max_range && outlier_k >= 1 &&
               outlier_std_ratio > 0.0 && voxel_size > 0.0;
    }
};

/// Retains exactly the points with min_range <= |p| <= max_range.
/// Order preserved, colors carried along.
PointCloud crop_by_distance(const PointCloud& cloud, double min_range,
                            double max_range);

/// Removes points whose mean distance to their k nearest neighbors exceeds
/// global_mean + std_ratio * global_std of that statistic. Clouds with k or
/// fewer points are returned unchanged. The per-point statistic is computed
/// in parallel; results are independent of thread count.
PointCloud remove_statistical_outliers(const PointCloud& cloud, std::size_t k,
                                       double std_ratio);

/// One output point per occupied voxel at the centroid of that voxel's
/// points. Grid origin is fixed at (0,0,0); voxel index is floor(p/size).
/// Output order follows first occupancy in input order.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size);

PointCloud preprocess(const PointCloud& cloud, const PreprocessConfig& cfg);

}  // namespace leafpick
