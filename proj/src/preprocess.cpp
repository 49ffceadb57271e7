#include "leafpick/preprocess.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "leafpick/kdtree.hpp"

namespace leafpick {

namespace {

struct VoxelKey {
    std::int64_t i, j, k;
    bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
    std::size_t operator()(const VoxelKey& v) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (std::int64_t c : {v.i, v.j, v.k}) {
            h ^= static_cast<std::uint64_t>(c);
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

}  // namespace

PointCloud crop_by_distance(const PointCloud& cloud, double min_range,
                            double max_range) {
    PointCloud out;
    out.frame_id = cloud.frame_id;
    bool rgb = cloud.has_colors();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        double d = cloud.points[i].norm();
        if (d >= min_range && d <= max_range) {
            out.points.push_back(cloud.points[i]);
            if (rgb) out.colors.push_back(cloud.colors[i]);
        }
    }
    return out;
}

PointCloud remove_statistical_outliers(const PointCloud& cloud, std::size_t k,
                                       double std_ratio) {
    const std::size_t n = cloud.size();
    if (n <= k) return cloud;

    KdTree tree(cloud);
    std::vector<double> mean_dist(n);

#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        // k+1 nearest includes the point itself at distance 0; skip it.
        auto nb = tree.knn(cloud.points[i], k + 1);
        double sum = 0.0;
        std::size_t cnt = 0;
        for (std::uint32_t j : nb) {
            if (j == static_cast<std::uint32_t>(i)) continue;
            sum += (cloud.points[j] - cloud.points[i]).norm();
            if (++cnt == k) break;
        }
        mean_dist[i] = cnt > 0 ? sum / static_cast<double>(cnt) : 0.0;
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
    for (std::size_t i = 0; i < n; ++i) {
        if (mean_dist[i] <= cutoff) {
            out.points.push_back(cloud.points[i]);
            if (rgb) out.colors.push_back(cloud.colors[i]);
        }
    }
    return out;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size) {
    struct Acc {
        Vec3 sum{Vec3::Zero()};
        Eigen::Vector3d color_sum{Eigen::Vector3d::Zero()};
        std::size_t count = 0;
        std::size_t order = 0;  // first-occupancy rank, for stable output
    };
    std::unordered_map<VoxelKey, Acc, VoxelKeyHash> bins;
    bins.reserve(cloud.size());
    bool rgb = cloud.has_colors();

    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud.points[i];
        VoxelKey key{static_cast<std::int64_t>(std::floor(p.x() / voxel_size)),
                     static_cast<std::int64_t>(std::floor(p.y() / voxel_size)),
                     static_cast<std::int64_t>(std::floor(p.z() / voxel_size))};
        auto [it, inserted] = bins.try_emplace(key);
        if (inserted) it->second.order = bins.size() - 1;
        it->second.sum += p;
        if (rgb)
            it->second.color_sum += Eigen::Vector3d(cloud.colors[i][0],
                                                    cloud.colors[i][1],
                                                    cloud.colors[i][2]);
        ++it->second.count;
    }

    PointCloud out;
    out.frame_id = cloud.frame_id;
    out.points.resize(bins.size());
    if (rgb) out.colors.resize(bins.size());
    for (const auto& [key, acc] : bins) {
        out.points[acc.order] = acc.sum / static_cast<double>(acc.count);
        if (rgb) {
            Eigen::Vector3d c = acc.color_sum / static_cast<double>(acc.count);
            out.colors[acc.order] = Rgb{static_cast<std::uint8_t>(std::lround(c.x())),
                                        static_cast<std::uint8_t>(std::lround(c.y())),
                                        static_cast<std::uint8_t>(std::lround(c.z()))};
        }
    }
    return out;
}

PointCloud preprocess(const PointCloud& cloud, const PreprocessConfig& cfg) {
    PointCloud c = crop_by_distance(cloud, cfg.min_range, cfg.max_range);
    c = remove_statistical_outliers(c, cfg.outlier_k, cfg.outlier_std_ratio);
    return voxel_downsample(c, cfg.voxel_size);
}

}  // namespace leafpick
