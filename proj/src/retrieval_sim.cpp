#include "leafpick/retrieval_sim.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace leafpick {

const char* to_string(RetrievalStage stage) {
    switch (stage) {
        case RetrievalStage::not_candidate: return "not_candidate";
        case RetrievalStage::not_viable: return "not_viable";
        case RetrievalStage::capture_failed: return "capture_failed";
        case RetrievalStage::cut_failed: return "cut_failed";
        case RetrievalStage::cut_mid: return "cut_mid";
        case RetrievalStage::near_miss: return "near_miss";
        case RetrievalStage::clean_cut: return "clean_cut";
    }
    return "unknown";
}

std::vector<LeafCandidate> filter_candidates(
    const std::vector<LeafCandidate>& candidates, const WorkspaceSpec& ws) {
    std::vector<LeafCandidate> out;
    for (const auto& c : candidates)
        if (ws.contains(c.obb.center)) out.push_back(c);
    return out;
}

std::optional<ApproachPath> check_viability(const LeafCandidate& candidate,
                                            const WorkspaceSpec& ws,
                                            double path_step) {
    Vec3 h_axis = candidate.pose.rotation * Vec3::UnitX();
    double h = candidate.obb.dims.x();
    // Offset backward toward the sensor: of the two h-axis senses, take the
    // one whose offset point is nearer the camera.
    Vec3 a_plus = candidate.obb.center + h_axis * h;
    Vec3 a_minus = candidate.obb.center - h_axis * h;
    Vec3 start = a_plus.norm() <= a_minus.norm() ? a_plus : a_minus;

    ApproachPath path{start, candidate.obb.center};
    double len = path.length();
    std::size_t steps = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(len / path_step)));
    for (std::size_t i = 0; i <= steps; ++i) {
        double t = static_cast<double>(i) / static_cast<double>(steps);
        if (!ws.contains(start + t * (path.end - start))) return std::nullopt;
    }
    return path;
}

RetrievalOutcome simulate_capture(const LeafCandidate& candidate,
                                  const TruthLeaf& truth,
                                  const ChamberSpec& chamber,
                                  const SimParams& params) {
    constexpr double kSlack = 1e-6;

    // Stem-side sense of the estimated h-axis, resolved against the truth
    // (stands in for the approach-direction heuristic of a real system).
    Vec3 a = candidate.pose.rotation * Vec3::UnitX();
    Vec3 toward_stem = truth.stem_junction - truth.center;
    if (a.dot(toward_stem) < 0.0) a = -a;

    Vec3 w_axis = candidate.pose.rotation * Vec3::UnitY();
    Vec3 d_axis = candidate.pose.rotation * Vec3::UnitZ();
    double h_est = candidate.obb.dims.x();
    // Opening (cut) plane at the stem-side face of the estimated box.
    Vec3 plane_point = candidate.obb.center + a * (0.5 * h_est);

    // Chamber interior: behind the opening plane, within the cross-section.
    // The leaf may protrude through the opening; the gates cut whatever
    // crosses the plane.
    bool any_enclosed = false;
    bool any_outside_plane = false;
    for (const Vec3& q : truth.surface_points) {
        Vec3 rel = q - plane_point;
        double f = rel.dot(a);  // > 0: beyond the opening
        if (f < -chamber.depth - kSlack ||
            std::abs(rel.dot(w_axis)) > 0.5 * chamber.opening_w + kSlack ||
            std::abs(rel.dot(d_axis)) > 0.5 * chamber.opening_h + kSlack)
            return {RetrievalStage::capture_failed, 0.0};
        if (f <= kSlack) any_enclosed = true;
        if (f > kSlack) any_outside_plane = true;
    }
    if (!any_enclosed) return {RetrievalStage::capture_failed, 0.0};

    // Clean cut: the opening plane crosses the stem segment.
    double g0 = (truth.stem_junction - plane_point).dot(a);
    double g1 = g0 + truth.stem_length * truth.stem_dir.dot(a);
    if (std::min(g0, g1) <= kSlack && std::max(g0, g1) >= -kSlack) {
        double span = g1 - g0;
        double t = std::abs(span) > 1e-12 ? -g0 / span : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        return {RetrievalStage::clean_cut, t * truth.stem_length};
    }

    if (any_outside_plane) {
        // Plane cuts through the lamina; offset is the junction's distance
        // to the cut plane.
        double offset = std::abs(g0);
        return {offset <= params.near_miss_band
                    ? RetrievalOutcome{RetrievalStage::near_miss, offset}
                    : RetrievalOutcome{RetrievalStage::cut_mid, offset}};
    }
    return {RetrievalStage::cut_failed, 0.0};
}

std::vector<double> TrialReport::stage_rates() const {
    auto rate = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    return {rate(counts.candidate, counts.potential),
            rate(counts.viable, counts.candidate),
            rate(counts.captured, counts.viable),
            rate(counts.cut, counts.captured),
            rate(counts.clean, counts.cut),
            rate(counts.near_miss, counts.cut)};
}

TrialReport run_trials(const std::vector<SceneSpec>& scenes,
                       const TrialConfig& config) {
    TrialReport report;
    report.n_trials = scenes.size();

    for (const SceneSpec& scene_spec : scenes) {
        SyntheticScene scene = generate_scene(scene_spec);
        DetectionStageCounts stage_counts;
        std::vector<LeafCandidate> detected =
            detect_leaves(scene.cloud, config.preprocess, config.clustering,
                          config.filter, &stage_counts);
        report.counts.potential += detected.size();

        std::vector<LeafCandidate> in_workspace =
            filter_candidates(detected, config.workspace);
        report.counts.candidate += in_workspace.size();

        std::vector<LeafCandidate> viable;
        for (const auto& c : in_workspace)
            if (check_viability(c, config.workspace, config.sim.path_step))
                viable.push_back(c);
        report.counts.viable += viable.size();

        double perception_s =
            static_cast<double>(stage_counts.input) /
            config.sim.perception_rate_pts_per_s;
        double actuation_s = 0.0;

        double match_threshold = default_match_threshold(scene.truth);
        CandidateQueue queue(viable);
        while (!queue.empty()) {
            const LeafCandidate& cand = queue.pop();
            auto path = check_viability(cand, config.workspace,
                                        config.sim.path_step);
            actuation_s += config.sim.actuation_overhead_s;
            if (path)
                actuation_s += 2.0 * path->length() / config.sim.approach_speed;

            // Match by nearest ground-truth center; unmatched => failure.
            const TruthLeaf* matched = nullptr;
            double best = match_threshold;
            for (const auto& leaf : scene.truth.leaves) {
                double d = (leaf.center - cand.obb.center).norm();
                if (d <= best) {
                    best = d;
                    matched = &leaf;
                }
            }
            RetrievalOutcome outcome{RetrievalStage::capture_failed, 0.0};
            if (matched)
                outcome = simulate_capture(cand, *matched, config.chamber,
                                           config.sim);

            bool captured = outcome.stage != RetrievalStage::capture_failed;
            bool cut = outcome.stage == RetrievalStage::cut_mid ||
                       outcome.stage == RetrievalStage::near_miss ||
                       outcome.stage == RetrievalStage::clean_cut;
            if (captured) ++report.counts.captured;
            if (cut) ++report.counts.cut;
            if (outcome.stage == RetrievalStage::clean_cut) ++report.counts.clean;
            if (outcome.stage == RetrievalStage::near_miss)
                ++report.counts.near_miss;
            if (cut) break;  // successful cut ends the trial
        }

        report.perception_s.push_back(perception_s);
        report.actuation_s.push_back(actuation_s);
        report.total_s.push_back(perception_s + actuation_s);
    }
    return report;
}

std::string trial_report_to_json(const TrialReport& report) {
    nlohmann::json j;
    j["schema_version"] = TrialReport::schema_version;
    j["n_trials"] = report.n_trials;
    j["counts"] = {{"potential", report.counts.potential},
                   {"candidate", report.counts.candidate},
                   {"viable", report.counts.viable},
                   {"captured", report.counts.captured},
                   {"cut", report.counts.cut},
                   {"clean", report.counts.clean},
                   {"near_miss", report.counts.near_miss}};
    j["stage_rates"] = report.stage_rates();
    j["perception_s"] = report.perception_s;
    j["actuation_s"] = report.actuation_s;
    j["total_s"] = report.total_s;
    return j.dump(2) + "\n";
}

std::string trial_report_to_csv(const TrialReport& report) {
    std::ostringstream out;
    auto rates = report.stage_rates();
    auto pct = [](double r) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%.1f%%", r * 100.0);
        return std::string(buf);
    };
    out << "Stage,Number,Rate\n";
    out << "Potential Leaves," << report.counts.potential << ",N/A\n";
    out << "Candidate Leaves," << report.counts.candidate << "," << pct(rates[0]) << "\n";
    out << "Viable Leaves," << report.counts.viable << "," << pct(rates[1]) << "\n";
    out << "Successful Captures," << report.counts.captured << "," << pct(rates[2]) << "\n";
    out << "Successful Cuts," << report.counts.cut << "," << pct(rates[3]) << "\n";
    out << "Clean Cuts," << report.counts.clean << "," << pct(rates[4]) << "\n";
    out << "Near Misses," << report.counts.near_miss << "," << pct(rates[5]) << "\n";
    out << "\n";
    if (!report.perception_s.empty()) {
        out << timing_table_csv(timing_summary(report.perception_s),
                                timing_summary(report.actuation_s),
                                timing_summary(report.total_s));
    }
    return out.str();
}

}  // namespace leafpick
