#include "leafpick/eval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace leafpick {

MatchResult match_detections(const GroundTruth& truth,
                             const std::vector<LeafCandidate>& candidates,
                             double threshold) {
    MatchResult res;
    std::vector<char> truth_used(truth.leaves.size(), 0);
    std::vector<char> cand_used(candidates.size(), 0);

    while (true) {
        double best = threshold;
        std::size_t bt = truth.leaves.size(), bc = candidates.size();
        for (std::size_t t = 0; t < truth.leaves.size(); ++t) {
            if (truth_used[t]) continue;
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                if (cand_used[c]) continue;
                double d = (truth.leaves[t].center - candidates[c].obb.center).norm();
                if (d <= best) {
                    best = d;
                    bt = t;
                    bc = c;
                }
            }
        }
        if (bt == truth.leaves.size()) break;
        truth_used[bt] = 1;
        cand_used[bc] = 1;
        res.pairs.push_back({bt, candidates[bc].rank, best});
    }

    for (std::size_t t = 0; t < truth.leaves.size(); ++t)
        if (!truth_used[t]) res.missed_truth.push_back(t);
    for (std::size_t c = 0; c < candidates.size(); ++c)
        if (!cand_used[c]) res.unmatched_candidates.push_back(c);
    return res;
}

double default_match_threshold(const GroundTruth& truth) {
    if (truth.leaves.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& l : truth.leaves) sum += l.spec.length;
    return 0.5 * sum / static_cast<double>(truth.leaves.size());
}

PoseError pose_error(const Pose6D& truth_pose, const Pose6D& est_pose) {
    Quat qt = truth_pose.rotation.normalized();
    Quat qe = est_pose.rotation.normalized();

    auto angle_between = [](const Quat& a, const Quat& b) {
        double dot = std::abs(a.dot(b));  // handles the double cover
        dot = std::min(dot, 1.0);
        return 2.0 * std::acos(dot);
    };

    // Half-turn about the box d-axis (local z): the leaf's tip/stem
    // ambiguity that PCA cannot resolve.
    Quat half_turn(Eigen::AngleAxisd(M_PI, Vec3::UnitZ()));
    double angle = std::min(angle_between(qt, qe),
                            angle_between(qt, qe * half_turn));

    Vec3 dt = truth_pose.translation - est_pose.translation;
    PoseError e;
    e.dx_mm = std::abs(dt.x()) * 1000.0;
    e.dy_mm = std::abs(dt.y()) * 1000.0;
    e.dz_mm = std::abs(dt.z()) * 1000.0;
    e.angle_deg = rad_to_deg(angle);
    return e;
}

PoseErrorSummary aggregate_pose_errors(const std::vector<PoseError>& errors) {
    if (errors.empty()) throw EmptyStatsError("aggregate_pose_errors: empty list");
    PoseErrorSummary s;
    s.n = errors.size();
    double n = static_cast<double>(errors.size());
    for (const auto& e : errors) {
        s.mean.dx_mm += e.dx_mm;
        s.mean.dy_mm += e.dy_mm;
        s.mean.dz_mm += e.dz_mm;
        s.mean.angle_deg += e.angle_deg;
    }
    s.mean.dx_mm /= n;
    s.mean.dy_mm /= n;
    s.mean.dz_mm /= n;
    s.mean.angle_deg /= n;
    for (const auto& e : errors) {
        s.stddev.dx_mm += (e.dx_mm - s.mean.dx_mm) * (e.dx_mm - s.mean.dx_mm);
        s.stddev.dy_mm += (e.dy_mm - s.mean.dy_mm) * (e.dy_mm - s.mean.dy_mm);
        s.stddev.dz_mm += (e.dz_mm - s.mean.dz_mm) * (e.dz_mm - s.mean.dz_mm);
        s.stddev.angle_deg +=
            (e.angle_deg - s.mean.angle_deg) * (e.angle_deg - s.mean.angle_deg);
    }
    s.stddev.dx_mm = std::sqrt(s.stddev.dx_mm / n);
    s.stddev.dy_mm = std::sqrt(s.stddev.dy_mm / n);
    s.stddev.dz_mm = std::sqrt(s.stddev.dz_mm / n);
    s.stddev.angle_deg = std::sqrt(s.stddev.angle_deg / n);
    return s;
}

TimingStats timing_summary(const std::vector<double>& samples_s) {
    if (samples_s.empty()) throw EmptyStatsError("timing_summary: empty list");
    TimingStats t;
    std::vector<double> sorted = samples_s;
    std::sort(sorted.begin(), sorted.end());
    t.min = sorted.front();
    t.max = sorted.back();
    double n = static_cast<double>(sorted.size());
    for (double v : sorted) t.mean += v;
    t.mean /= n;
    std::size_t m = sorted.size() / 2;
    t.median = sorted.size() % 2 == 1 ? sorted[m]
                                      : 0.5 * (sorted[m - 1] + sorted[m]);
    for (double v : sorted) t.stddev += (v - t.mean) * (v - t.mean);
    t.stddev = std::sqrt(t.stddev / n);
    return t;
}

namespace {
std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}
}  // namespace

std::string detection_table_csv(const std::string& row_label,
                                std::size_t n_clouds, std::size_t total_leaves,
                                double mean_detected, double percentage) {
    std::ostringstream out;
    out << ",Point Clouds,Total # Leaves,Average Detection,Percentage\n";
    out << row_label << "," << n_clouds << "," << total_leaves << ","
        << fmt(mean_detected) << "," << fmt(percentage * 100.0) << "%\n";
    return out.str();
}

std::string pose_error_table_csv(const PoseErrorSummary& summary) {
    std::ostringstream out;
    out << "Error,dx (mm),dy (mm),dz (mm),Orientation (deg)\n";
    out << "Mean," << fmt(summary.mean.dx_mm) << "," << fmt(summary.mean.dy_mm)
        << "," << fmt(summary.mean.dz_mm) << "," << fmt(summary.mean.angle_deg)
        << "\n";
    out << "Std dev," << fmt(summary.stddev.dx_mm) << ","
        << fmt(summary.stddev.dy_mm) << "," << fmt(summary.stddev.dz_mm) << ","
        << fmt(summary.stddev.angle_deg) << "\n";
    return out.str();
}

std::string timing_table_csv(const TimingStats& perception,
                             const TimingStats& actuation,
                             const TimingStats& total) {
    std::ostringstream out;
    out << "Metric,Perception Part,Actuation Part,Overall Retrieval\n";
    auto row = [&](const char* name, double p, double a, double t) {
        out << name << "," << fmt(p) << "," << fmt(a) << "," << fmt(t) << "\n";
    };
    row("Min", perception.min, actuation.min, total.min);
    row("Max", perception.max, actuation.max, total.max);
    row("Mean", perception.mean, actuation.mean, total.mean);
    row("Median", perception.median, actuation.median, total.median);
    row("Std dev", perception.stddev, actuation.stddev, total.stddev);
    return out.str();
}

}  // namespace leafpick
