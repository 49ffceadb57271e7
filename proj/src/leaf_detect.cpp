#include "leafpick/leaf_detect.hpp"

#include <algorithm>

namespace leafpick {

bool geometric_filter(std::size_t n_points, double volume, double leaf_ratio,
                      const LeafFilterConfig& cfg) {
    if (!std::isfinite(volume) || !std::isfinite(leaf_ratio)) return false;
    return n_points >= cfg.min_cluster_points &&
           volume >= cfg.volume_min && volume <= cfg.volume_max &&
           leaf_ratio >= cfg.ratio_min && leaf_ratio <= cfg.ratio_max;
}

std::vector<LeafCandidate> detect_leaves(const PointCloud& cloud,
                                         const PreprocessConfig& pre,
                                         const ClusteringParams& clus,
                                         const LeafFilterConfig& filt,
                                         DetectionStageCounts* counts) {
    DetectionStageCounts local;
    local.input = cloud.size();

    PointCloud c = crop_by_distance(cloud, pre.min_range, pre.max_range);
    local.after_crop = c.size();
    c = remove_statistical_outliers(c, pre.outlier_k, pre.outlier_std_ratio);
    local.after_outlier_removal = c.size();
    c = voxel_downsample(c, pre.voxel_size);
    local.after_downsample = c.size();

    std::vector<LeafCandidate> out;
    if (!c.empty()) {
        ClusterLabels labels = dbscan(c, clus);
        auto clusters = labels.cluster_indices();
        local.clusters = clusters.size();

        std::vector<LeafCandidate> fitted(clusters.size());
        std::vector<char> keep(clusters.size(), 0);

#pragma omp parallel for schedule(dynamic)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(clusters.size()); ++i) {
            const auto& idx = clusters[i];
            std::vector<Vec3> pts;
            pts.reserve(idx.size());
            for (std::uint32_t j : idx) pts.push_back(c.points[j]);
            OrientedBoundingBox box = fit_obb(pts);
            double ratio = box.dims.y() > 0.0 ? box.leaf_ratio()
                                              : std::numeric_limits<double>::infinity();
            if (!geometric_filter(idx.size(), box.volume(), ratio, filt)) continue;
            LeafCandidate cand;
            cand.obb = box;
            cand.pose = {box.center, box.rotation};
            cand.n_points = idx.size();
            cand.volume = box.volume();
            cand.leaf_ratio = ratio;
            fitted[i] = cand;
            keep[i] = 1;
        }

        for (std::size_t i = 0; i < fitted.size(); ++i)
            if (keep[i]) out.push_back(fitted[i]);
    }

    // Nearest-first ranking; stable so equal ranges keep cluster order.
    std::stable_sort(out.begin(), out.end(),
                     [](const LeafCandidate& a, const LeafCandidate& b) {
                         return a.obb.center.norm() < b.obb.center.norm();
                     });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i;
    local.candidates = out.size();
    if (counts) *counts = local;
    return out;
}

}  // namespace leafpick
