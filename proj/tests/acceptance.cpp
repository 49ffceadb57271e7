// Acceptance checks for the full pipeline. Each check prints one PASS/FAIL
// line; the process exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "leafpick/candidate_io.hpp"
#include "leafpick/canopy_synth.hpp"
#include "leafpick/cloud_io.hpp"
#include "leafpick/config.hpp"
#include "leafpick/eval_metrics.hpp"
#include "leafpick/leaf_detect.hpp"
#include "leafpick/reference.hpp"
#include "leafpick/retrieval_sim.hpp"
#include "leafpick/rng.hpp"

using namespace leafpick;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool ok, double seconds,
            const std::string& detail) {
    std::printf("[%s] %d. %-38s (%6.2f s)%s%s\n", ok ? "PASS" : "FAIL", id,
                name, seconds, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

PointCloud random_cloud(std::size_t n, Rng& rng, double span) {
    PointCloud c;
    c.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        c.points.emplace_back(rng.uniform(-span, span), rng.uniform(-span, span),
                              rng.uniform(-span, span));
    return c;
}

// 1. kd-tree DBSCAN equals the quadratic reference on seeded clouds.
void check_dbscan_oracle() {
    double t0 = now_s();
    bool ok = true;
    std::string detail;
    Rng meta(1001);
    for (int i = 0; i < 50 && ok; ++i) {
        std::size_t n = 50 + meta.uniform_index(451);  // up to 500
        Rng rng(2000 + i);
        PointCloud c = random_cloud(n, rng, 0.05);
        ClusteringParams params{meta.uniform(0.004, 0.02),
                                1 + meta.uniform_index(10)};
        auto fast = dbscan(c, params);
        auto slow = reference::dbscan_quadratic(c, params);
        if (fast.labels != slow.labels || fast.n_clusters != slow.n_clusters) {
            ok = false;
            detail = "mismatch on cloud " + std::to_string(i);
        }
    }
    double dt = now_s() - t0;
    if (ok && dt >= 10.0) {
        ok = false;
        detail = "took too long";
    }
    report(1, "dbscan matches quadratic oracle", ok, dt, detail);
}

// 2. Box fits of noise-free flat leaves recover pose and dimensions.
void check_obb_fidelity() {
    double t0 = now_s();
    bool ok = true;
    std::string detail;
    Rng rng(3001);
    for (int i = 0; i < 100 && ok; ++i) {
        LeafSpec leaf;
        leaf.length = rng.uniform(0.054, 0.150);
        leaf.width = std::clamp(leaf.length * rng.uniform(0.42, 0.75), 0.024, 0.086);
        leaf.curvature = 0.0;  // flat
        Vec3 axis(rng.gaussian(), rng.gaussian(), rng.gaussian());
        leaf.pose = {Vec3(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1),
                          rng.uniform(0.2, 0.4)),
                     Quat(Eigen::AngleAxisd(rng.uniform(0.0, 3.1),
                                            axis.normalized()))};
        auto pts = sample_leaf_surface(leaf, 2.5e6);
        auto box = fit_obb(pts);

        double center_err = (box.center - leaf.pose.translation).norm();
        double h_err = std::abs(box.dims.x() - leaf.length) / leaf.length;
        double w_err = std::abs(box.dims.y() - leaf.width) / leaf.width;
        Mat3 rt = leaf.pose.rotation.toRotationMatrix();
        Mat3 re = box.rotation.toRotationMatrix();
        double worst_axis = 0.0;
        for (int col = 0; col < 3; ++col) {
            double c = std::clamp(std::abs(rt.col(col).dot(re.col(col))), 0.0, 1.0);
            worst_axis = std::max(worst_axis, rad_to_deg(std::acos(c)));
        }
        if (center_err >= 0.001 || h_err >= 0.05 || w_err >= 0.05 ||
            worst_axis >= 2.0) {
            ok = false;
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "leaf %d: center %.2f mm, h %.1f%%, w %.1f%%, axis %.2f deg",
                          i, center_err * 1000, h_err * 100, w_err * 100,
                          worst_axis);
            detail = buf;
        }
    }
    report(2, "box fit fidelity on flat leaves", ok, now_s() - t0, detail);
}

// 3. Detection rate over a 10-scene indoor benchmark (20 leaves).
void check_detection_rate() {
    double t0 = now_s();
    PipelineConfig cfg = default_config(Profile::indoor);
    std::size_t detected = 0, total = 0;
    for (int i = 0; i < 10; ++i) {
        SceneSpec spec;
        spec.n_leaves = 2;
        spec.seed = 5000 + i;
        spec.noise_sigma_coeff = 0.0028;
        auto scene = generate_scene(spec);
        auto cands = detect_leaves(scene.cloud, cfg.preprocess, cfg.clustering,
                                   cfg.filter);
        auto match = match_detections(scene.truth, cands,
                                      default_match_threshold(scene.truth));
        detected += match.pairs.size();
        total += scene.truth.leaves.size();
    }
    double rate = static_cast<double>(detected) / static_cast<double>(total);
    double dt = now_s() - t0;
    bool ok = total == 20 && rate >= 0.75 && dt < 60.0;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%zu/%zu detected (%.1f%%)", detected,
                  total, rate * 100.0);
    report(3, "detection rate on indoor benchmark", ok, dt, buf);
}

// 4. Pose accuracy on 12 matched leaves with realistic noise.
void check_pose_accuracy() {
    double t0 = now_s();
    PipelineConfig cfg = default_config(Profile::indoor);
    std::vector<PoseError> errors;
    for (int i = 0; i < 20 && errors.size() < 12; ++i) {
        SceneSpec spec;
        spec.n_leaves = 2;
        spec.seed = 9000 + i;
        spec.noise_sigma_coeff = 0.0028;
        auto scene = generate_scene(spec);
        auto cands = detect_leaves(scene.cloud, cfg.preprocess, cfg.clustering,
                                   cfg.filter);
        auto match = match_detections(scene.truth, cands,
                                      default_match_threshold(scene.truth));
        for (const auto& pair : match.pairs) {
            if (errors.size() >= 12) break;
            const LeafCandidate* cand = nullptr;
            for (const auto& c : cands)
                if (c.rank == pair.candidate_rank) cand = &c;
            errors.push_back(pose_error(
                scene.truth.leaves[pair.truth_id].canonical_pose, cand->pose));
        }
    }
    bool ok = errors.size() == 12;
    std::string detail = "insufficient matches";
    if (ok) {
        auto s = aggregate_pose_errors(errors);
        ok = s.mean.dx_mm <= 16.0 && s.mean.dy_mm <= 16.0 &&
             s.mean.dz_mm <= 16.0 && s.mean.angle_deg <= 10.0;
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "mean dx %.2f dy %.2f dz %.2f mm, %.2f deg",
                      s.mean.dx_mm, s.mean.dy_mm, s.mean.dz_mm,
                      s.mean.angle_deg);
        detail = buf;
    }
    report(4, "pose accuracy on matched leaves", ok, now_s() - t0, detail);
}

// 5. Funnel monotonicity and exact rate recomputation over 46 trials.
void check_funnel_invariant() {
    double t0 = now_s();
    std::vector<SceneSpec> scenes;
    for (int i = 0; i < 46; ++i) {
        SceneSpec spec;
        spec.n_leaves = 2;
        spec.seed = 7000 + i;
        spec.noise_sigma_coeff = 0.0028;
        scenes.push_back(spec);
    }
    TrialConfig config = default_config(Profile::indoor).trial_config();
    TrialReport r = run_trials(scenes, config);

    bool ok = r.n_trials == 46 && r.counts.monotone();
    std::string detail;
    auto rates = r.stage_rates();
    auto expect = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0
                        : static_cast<double>(num) / static_cast<double>(den);
    };
    double recomputed[6] = {expect(r.counts.candidate, r.counts.potential),
                            expect(r.counts.viable, r.counts.candidate),
                            expect(r.counts.captured, r.counts.viable),
                            expect(r.counts.cut, r.counts.captured),
                            expect(r.counts.clean, r.counts.cut),
                            expect(r.counts.near_miss, r.counts.cut)};
    for (int i = 0; i < 6; ++i)
        if (rates[i] != recomputed[i]) ok = false;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "potential %zu >= candidate %zu >= viable %zu >= captured %zu "
                  ">= cut %zu >= clean %zu",
                  r.counts.potential, r.counts.candidate, r.counts.viable,
                  r.counts.captured, r.counts.cut, r.counts.clean);
    report(5, "funnel invariant over 46 trials", ok, now_s() - t0, buf);
}

// 6. Ideal geometry always yields a clean cut.
void check_ideal_clean_cut() {
    double t0 = now_s();
    bool ok = true;
    std::string detail;
    Rng rng(6001);
    for (int i = 0; i < 100 && ok; ++i) {
        LeafSpec leaf;
        leaf.length = rng.uniform(0.054, 0.150);
        leaf.width = std::clamp(leaf.length * rng.uniform(0.42, 0.75), 0.024, 0.086);
        leaf.curvature = rng.uniform(0.0, 0.040);
        leaf.stem_length = rng.uniform(0.010, 0.020);
        Vec3 axis(rng.gaussian(), rng.gaussian(), rng.gaussian());
        leaf.pose = {Vec3(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1),
                          rng.uniform(0.2, 0.4)),
                     Quat(Eigen::AngleAxisd(rng.uniform(0.0, 6.28),
                                            axis.normalized()))};

        TruthLeaf truth;
        truth.spec = leaf;
        truth.stem_junction = leaf.stem_junction_sensor();
        truth.stem_dir = leaf.stem_dir_sensor();
        truth.stem_length = leaf.stem_length;
        truth.surface_points = sample_leaf_surface(leaf, 2e5);
        Vec3 centroid = Vec3::Zero();
        for (const Vec3& p : truth.surface_points) centroid += p;
        centroid /= static_cast<double>(truth.surface_points.size());
        truth.center = centroid;

        // Zero-error estimate: the true leaf box.
        LeafCandidate cand;
        cand.obb.dims = Vec3(leaf.length, leaf.width, 0.25 * leaf.curvature);
        cand.obb.center = leaf.pose.apply(Vec3(0, 0, 0.125 * leaf.curvature));
        cand.obb.rotation = leaf.pose.rotation;
        cand.pose = {cand.obb.center, cand.obb.rotation};

        auto outcome = simulate_capture(cand, truth, ChamberSpec{});
        if (outcome.stage != RetrievalStage::clean_cut) {
            ok = false;
            detail = std::string("config ") + std::to_string(i) + " gave " +
                     to_string(outcome.stage);
        }
    }
    report(6, "ideal geometry guarantees clean cut", ok, now_s() - t0, detail);
}

// 7. File format roundtrips.
void check_format_roundtrip() {
    double t0 = now_s();
    bool ok = true;
    std::string detail;
    Rng rng(7001);
    PointCloud cloud;
    for (int i = 0; i < 1000; ++i)
        cloud.points.emplace_back(static_cast<float>(rng.uniform(-2, 2)),
                                  static_cast<float>(rng.uniform(-2, 2)),
                                  static_cast<float>(rng.uniform(-2, 2)));

    for (CloudFormat fmt : {CloudFormat::pcd_binary, CloudFormat::ply_binary}) {
        auto back = parse_cloud(write_cloud(cloud, fmt)).cloud;
        if (back.size() != cloud.size()) ok = false;
        for (std::size_t i = 0; ok && i < cloud.size(); ++i)
            if (back.points[i] != cloud.points[i]) {
                ok = false;
                detail = "binary roundtrip not bit-exact";
            }
    }
    for (CloudFormat fmt : {CloudFormat::pcd_ascii, CloudFormat::ply_ascii}) {
        auto back = parse_cloud(write_cloud(cloud, fmt)).cloud;
        if (back.size() != cloud.size()) ok = false;
        for (std::size_t i = 0; ok && i < cloud.size(); ++i)
            if ((back.points[i] - cloud.points[i]).cwiseAbs().maxCoeff() > 1e-6) {
                ok = false;
                detail = "ascii roundtrip beyond 1e-6";
            }
    }
    report(7, "format roundtrips", ok, now_s() - t0, detail);
}

// 8. Full pipeline on a 100k-point cloud, mean over 5 runs.
void check_performance() {
    SceneSpec spec;
    spec.n_leaves = 4;
    spec.seed = 8001;
    spec.noise_sigma_coeff = 0.0028;
    spec.background_density_factor = 0.05;
    auto scene = generate_scene(spec);
    PointCloud cloud = scene.cloud;
    // Pin the size at exactly 100k points.
    Rng rng(8002);
    while (cloud.size() < 100000) {
        const Vec3& p = cloud.points[rng.uniform_index(cloud.size())];
        cloud.points.push_back(p + Vec3(rng.gaussian(), rng.gaussian(),
                                        rng.gaussian()) *
                                       0.0005);
    }
    cloud.points.resize(100000);

    PipelineConfig cfg = default_config(Profile::indoor);
    double total = 0.0;
    std::size_t n_cands = 0;
    for (int run = 0; run < 5; ++run) {
        double t0 = now_s();
        auto cands = detect_leaves(cloud, cfg.preprocess, cfg.clustering,
                                   cfg.filter);
        total += now_s() - t0;
        n_cands = cands.size();
    }
    double mean = total / 5.0;
    bool ok = mean < 11.0;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "mean %.2f s over 5 runs, %zu candidates",
                  mean, n_cands);
    report(8, "100k-point pipeline under 11 s", ok, total, buf);
}

// 9. Byte-identical artifacts across two runs.
void check_determinism() {
    double t0 = now_s();
    bool ok = true;
    std::string detail;

    SceneSpec spec;
    spec.n_leaves = 3;
    spec.seed = 9901;
    spec.noise_sigma_coeff = 0.0028;

    auto scene_a = generate_scene(spec);
    auto scene_b = generate_scene(spec);
    if (write_cloud(scene_a.cloud, CloudFormat::pcd_binary) !=
        write_cloud(scene_b.cloud, CloudFormat::pcd_binary)) {
        ok = false;
        detail = "scene files differ";
    }
    if (ground_truth_to_json(scene_a.truth) !=
        ground_truth_to_json(scene_b.truth)) {
        ok = false;
        detail = "ground truth sidecars differ";
    }

    PipelineConfig cfg = default_config(Profile::indoor);
    DetectionStageCounts counts_a, counts_b;
    auto cands_a = detect_leaves(scene_a.cloud, cfg.preprocess, cfg.clustering,
                                 cfg.filter, &counts_a);
    auto cands_b = detect_leaves(scene_b.cloud, cfg.preprocess, cfg.clustering,
                                 cfg.filter, &counts_b);
    if (candidates_to_json(cands_a, counts_a) !=
        candidates_to_json(cands_b, counts_b)) {
        ok = false;
        detail = "candidate JSON differs";
    }

    std::vector<SceneSpec> scenes;
    for (int i = 0; i < 3; ++i) {
        SceneSpec s = spec;
        s.seed = 9950 + i;
        scenes.push_back(s);
    }
    TrialReport ra = run_trials(scenes, cfg.trial_config());
    TrialReport rb = run_trials(scenes, cfg.trial_config());
    if (trial_report_to_json(ra) != trial_report_to_json(rb) ||
        trial_report_to_csv(ra) != trial_report_to_csv(rb)) {
        ok = false;
        detail = "trial reports differ";
    }
    report(9, "byte-identical artifacts across runs", ok, now_s() - t0, detail);
}

}  // namespace

int main() {
    check_dbscan_oracle();
    check_obb_fidelity();
    check_detection_rate();
    check_pose_accuracy();
    check_funnel_invariant();
    check_ideal_clean_cut();
    check_format_roundtrip();
    check_performance();
    check_determinism();
    if (g_failures == 0) {
        std::printf("all acceptance checks passed\n");
        return 0;
    }
    std::printf("%d acceptance check(s) failed\n", g_failures);
    return 1;
}
