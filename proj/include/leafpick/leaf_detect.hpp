#pragma once

#include <vector>

#include "leafpick/cloud.hpp"
#include "leafpick/dbscan.hpp"
#include "leafpick/obb.hpp"
#include "leafpick/preprocess.hpp"

namespace leafpick {

struct LeafFilterConfig {
    std::size_t min_cluster_points = 30;
    double volume_min = 2e-6;   // m^3
    double volume_max = 2e-4;
    double ratio_min = 1.0;     // h/w
    double ratio_max = 4.0;

    bool valid() const {
        return volume_min > 0.0 && volume_min <= volume_max && ratio_min > 0.0 &&
               ratio_min <= ratio_max;
    }
};

struct LeafCandidate {
    OrientedBoundingBox obb;
    Pose6D pose;            // translation == obb.center, rotation == obb.rotation
    std::size_t n_points = 0;
    double volume = 0.0;    // h*w*d, m^3
    double leaf_ratio = 0.0;
    std::size_t rank = 0;   // queue position, nearest first
};

/// True iff the cluster passes all three box-feature gates: point count,
/// volume, and leaf ratio (closed intervals).
bool geometric_filter(std::size_t n_points, double volume, double leaf_ratio,
                      const LeafFilterConfig& cfg);

struct DetectionStageCounts {
    std::size_t input = 0;
    std::size_t after_crop = 0;
    std::size_t after_outlier_removal = 0;
    std::size_t after_downsample = 0;
    std::size_t clusters = 0;
    std::size_t candidates = 0;
};

/// Full perception pass: crop -> outlier removal -> downsample -> DBSCAN
/// -> per-cluster box fit -> geometric filter. Survivors are ranked
/// ascending by range from the sensor origin (nearest first). Deterministic
/// for a fixed input. Per-cluster fits run in parallel.
std::vector<LeafCandidate> detect_leaves(const PointCloud& cloud,
                                         const PreprocessConfig& pre,
                                         const ClusteringParams& clus,
                                         const LeafFilterConfig& filt,
                                         DetectionStageCounts* counts = nullptr);

/// FIFO over rank; pop returns the next-nearest unattempted candidate.
class CandidateQueue {
public:
    explicit CandidateQueue(std::vector<LeafCandidate> ranked)
        : candidates_(std::move(ranked)) {}

    bool empty() const { return next_ >= candidates_.size(); }
    std::size_t remaining() const { return candidates_.size() - next_; }
    const LeafCandidate& pop() { return candidates_[next_++]; }

private:
    std::vector<LeafCandidate> candidates_;
    std::size_t next_ = 0;
};

}  // namespace leafpick
