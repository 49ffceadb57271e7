#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "leafpick/canopy_synth.hpp"
#include "leafpick/leaf_detect.hpp"

namespace leafpick {

struct MatchResult {
    struct Pair {
        std::size_t truth_id;
        std::size_t candidate_rank;
        double center_distance;  // meters
    };
    std::vector<Pair> pairs;
    std::vector<std::size_t> missed_truth;
    std::vector<std::size_t> unmatched_candidates;

    double detection_rate(std::size_t total_truth) const {
        return total_truth == 0 ? 0.0
                                : static_cast<double>(pairs.size()) /
                                      static_cast<double>(total_truth);
    }
};

/// Per-axis absolute translation error (millimeters) and rotation angle
/// (degrees, symmetry-reduced).
struct PoseError {
    double dx_mm = 0.0;
    double dy_mm = 0.0;
    double dz_mm = 0.0;
    double angle_deg = 0.0;
};

struct EmptyStatsError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Greedy globally-nearest matching: repeatedly pair the closest
/// (truth, candidate) pair under the threshold until none remain.
MatchResult match_detections(const GroundTruth& truth,
                             const std::vector<LeafCandidate>& candidates,
                             double threshold);

/// Default match threshold: half the mean ground-truth leaf length.
double default_match_threshold(const GroundTruth& truth);

/// Angle = 2*acos(|q_t . q_e|) degrees, minimized over the leaf's 180-degree
/// in-plane symmetry (half-turn about the d-axis). Non-unit quaternions are
/// normalized.
PoseError pose_error(const Pose6D& truth_pose, const Pose6D& est_pose);

struct PoseErrorSummary {
    PoseError mean;
    PoseError stddev;  // population std per column
    std::size_t n = 0;
};

PoseErrorSummary aggregate_pose_errors(const std::vector<PoseError>& errors);

struct TimingStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double median = 0.0;  // even-length lists: midpoint average
    double stddev = 0.0;  // population
};

TimingStats timing_summary(const std::vector<double>& samples_s);

/// CSV emitters mirroring the report tables.
std::string detection_table_csv(const std::string& row_label,
                                std::size_t n_clouds, std::size_t total_leaves,
                                double mean_detected, double percentage);
std::string pose_error_table_csv(const PoseErrorSummary& summary);
std::string timing_table_csv(const TimingStats& perception,
                             const TimingStats& actuation,
                             const TimingStats& total);

}  // namespace leafpick
