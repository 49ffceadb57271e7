#pragma once

#include <optional>
#include <string>
#include <vector>

#include "leafpick/canopy_synth.hpp"
#include "leafpick/eval_metrics.hpp"
#include "leafpick/leaf_detect.hpp"

namespace leafpick {

/// Arm workspace modeled as a spherical shell around the base.
struct WorkspaceSpec {
    Vec3 base{Vec3(0.0, 0.0, -0.1)};
    double reach_min = 0.15;  // meters
    double reach_max = 0.9;

    bool contains(const Vec3& p) const {
        double d = (p - base).norm();
        return d >= reach_min && d <= reach_max;
    }
};

/// Capture chamber cross-section and depth.
struct ChamberSpec {
    double opening_w = 0.110;  // meters, along the leaf w-axis
    double opening_h = 0.045;  // along the leaf d-axis
    double depth = 0.185;
};

enum class RetrievalStage {
    not_candidate,   // outside workspace
    not_viable,      // no in-workspace approach path
    capture_failed,
    cut_failed,      // captured, gates closed on nothing
    cut_mid,         // lamina cut beyond the near-miss band
    near_miss,       // lamina cut close to the stem junction
    clean_cut,       // cut intersects the stem segment
};

const char* to_string(RetrievalStage stage);

struct RetrievalOutcome {
    RetrievalStage stage = RetrievalStage::capture_failed;
    double cut_offset_m = 0.0;  // distance from stem junction, any cut
};

struct SimParams {
    double near_miss_band = 0.015;     // meters from the stem junction
    double path_step = 0.01;           // viability sampling step, meters
    double approach_speed = 0.1;       // m/s, simulated actuation
    double actuation_overhead_s = 3.0; // per-attempt fixed cost
    double perception_rate_pts_per_s = 20000.0;  // simulated perception clock
};

/// Keeps candidates whose center lies in the workspace shell (closed bounds).
std::vector<LeafCandidate> filter_candidates(
    const std::vector<LeafCandidate>& candidates, const WorkspaceSpec& ws);

struct ApproachPath {
    Vec3 start{Vec3::Zero()};  // offset position, one leaf length out
    Vec3 end{Vec3::Zero()};    // leaf center
    double length() const { return (end - start).norm(); }
};

/// Approach pose: candidate center offset backward along the leaf h-axis by
/// the leaf length. Viable iff the straight segment from the approach point
/// to the center stays in the workspace shell, sampled at path_step.
std::optional<ApproachPath> check_viability(const LeafCandidate& candidate,
                                            const WorkspaceSpec& ws,
                                            double path_step = 0.01);

/// Places the chamber at the end of the approach path oriented by the
/// candidate pose and classifies the cut against the matched ground-truth
/// leaf. All failure modes are outcomes, not errors.
RetrievalOutcome simulate_capture(const LeafCandidate& candidate,
                                  const TruthLeaf& truth,
                                  const ChamberSpec& chamber,
                                  const SimParams& params = {});

struct FunnelCounts {
    std::size_t potential = 0;
    std::size_t candidate = 0;
    std::size_t viable = 0;
    std::size_t captured = 0;
    std::size_t cut = 0;
    std::size_t clean = 0;
    std::size_t near_miss = 0;

    bool monotone() const {
        return potential >= candidate && candidate >= viable &&
               viable >= captured && captured >= cut && cut >= clean;
    }
};

struct TrialReport {
    FunnelCounts counts;
    std::vector<double> perception_s;  // one sample per trial
    std::vector<double> actuation_s;
    std::vector<double> total_s;
    std::size_t n_trials = 0;
    static constexpr std::uint32_t schema_version = 1;

    /// Stage-over-previous-stage rates, in funnel order
    /// (candidate/potential, viable/candidate, captured/viable,
    /// cut/captured, clean/cut, near_miss/cut).
    std::vector<double> stage_rates() const;
};

struct TrialConfig {
    PreprocessConfig preprocess;
    ClusteringParams clustering;
    LeafFilterConfig filter;
    WorkspaceSpec workspace;
    ChamberSpec chamber;
    SimParams sim;
};

/// Queue-driven retrieval over generated scenes: detect, enqueue, attempt
/// until a successful cut or queue exhaustion. One trial per scene.
/// Perception time is simulated (points / rate) so reports are
/// deterministic for a given seed.
TrialReport run_trials(const std::vector<SceneSpec>& scenes,
                       const TrialConfig& config);

std::string trial_report_to_json(const TrialReport& report);
std::string trial_report_to_csv(const TrialReport& report);

}  // namespace leafpick
