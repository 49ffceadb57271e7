#include <doctest.h>

#include <cmath>

#include "leafpick/canopy_synth.hpp"
#include "leafpick/leaf_detect.hpp"
#include "leafpick/rng.hpp"

using namespace leafpick;

namespace {

// Points filling an axis-aligned box, randomly rotated/translated by pose.
std::vector<Vec3> box_points(const Vec3& dims, const Pose6D& pose, int n,
                             std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vec3> pts;
    pts.reserve(n + 8);
    // Corners pin the extents exactly.
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1})
                pts.push_back(pose.apply(Vec3(sx * dims.x() / 2,
                                              sy * dims.y() / 2,
                                              sz * dims.z() / 2)));
    for (int i = 0; i < n; ++i)
        pts.push_back(pose.apply(Vec3(rng.uniform(-dims.x() / 2, dims.x() / 2),
                                      rng.uniform(-dims.y() / 2, dims.y() / 2),
                                      rng.uniform(-dims.z() / 2, dims.z() / 2))));
    return pts;
}

double axis_angle_deg(const Quat& a, const Quat& b, int col) {
    Vec3 va = a.toRotationMatrix().col(col);
    Vec3 vb = b.toRotationMatrix().col(col);
    double c = std::clamp(std::abs(va.dot(vb)), 0.0, 1.0);
    return rad_to_deg(std::acos(c));
}

}  // namespace

TEST_CASE("fit_obb throws on empty input") {
    std::vector<Vec3> none;
    CHECK_THROWS_AS(fit_obb(none), EmptyInputError);
}

TEST_CASE("single point gives zero-dims box at the point") {
    std::vector<Vec3> one{Vec3(0.1, 0.2, 0.3)};
    auto box = fit_obb(one);
    CHECK((box.center - one[0]).norm() < 1e-12);
    CHECK(box.dims.norm() < 1e-12);
    CHECK(std::abs(std::abs(box.rotation.dot(Quat::Identity())) - 1.0) < 1e-12);
}

TEST_CASE("axis-aligned box recovers dims sorted descending") {
    auto pts = box_points(Vec3(0.09, 0.05, 0.004), Pose6D::identity(), 300, 2);
    auto box = fit_obb(pts);
    CHECK(box.dims.x() == doctest::Approx(0.09).epsilon(0.02));
    CHECK(box.dims.y() == doctest::Approx(0.05).epsilon(0.02));
    CHECK(box.dims.z() == doctest::Approx(0.004).epsilon(0.05));
    CHECK(box.dims.x() >= box.dims.y());
    CHECK(box.dims.y() >= box.dims.z());
    CHECK(box.center.norm() < 1e-3);
}

TEST_CASE("rotated box recovers pose up to box symmetry") {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        Vec3 axis(rng.gaussian(), rng.gaussian(), rng.gaussian());
        Pose6D pose{Vec3(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2),
                         rng.uniform(0.2, 0.4)),
                    Quat(Eigen::AngleAxisd(rng.uniform(0, 3), axis.normalized()))};
        Vec3 dims(0.10, 0.05, 0.006);
        auto pts = box_points(dims, pose, 5000, 100 + trial);
        auto box = fit_obb(pts);
        CHECK((box.center - pose.translation).norm() < 1e-3);
        CHECK(axis_angle_deg(box.rotation, pose.rotation, 0) < 2.0);
        CHECK(axis_angle_deg(box.rotation, pose.rotation, 1) < 2.0);
        CHECK(axis_angle_deg(box.rotation, pose.rotation, 2) < 2.0);
    }
}

TEST_CASE("every input point lies inside the fitted box") {
    Rng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Vec3> pts;
        int n = 20 + static_cast<int>(rng.uniform_index(200));
        for (int i = 0; i < n; ++i)
            pts.emplace_back(rng.uniform(-0.1, 0.1), rng.uniform(-0.05, 0.05),
                             rng.uniform(0.2, 0.25));
        auto box = fit_obb(pts);
        Mat3 r = box.rotation.toRotationMatrix();
        for (const auto& p : pts) {
            Vec3 local = r.transpose() * (p - box.center);
            CHECK(std::abs(local.x()) <= box.dims.x() / 2 + 1e-9);
            CHECK(std::abs(local.y()) <= box.dims.y() / 2 + 1e-9);
            CHECK(std::abs(local.z()) <= box.dims.z() / 2 + 1e-9);
        }
    }
}

TEST_CASE("rotation is always proper and canonically signed") {
    Rng rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        auto pts = box_points(
            Vec3(0.08, 0.04, 0.005),
            Pose6D{Vec3(0, 0, 0.3),
                   Quat(Eigen::AngleAxisd(
                       rng.uniform(0, 6.28),
                       Vec3(rng.gaussian(), rng.gaussian(), rng.gaussian())
                           .normalized()))},
            200, 500 + trial);
        auto box = fit_obb(pts);
        Mat3 r = box.rotation.toRotationMatrix();
        CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r.col(0).dot(Vec3::UnitZ()) >= -1e-12);
        CHECK(r.col(1).dot(Vec3::UnitZ()) >= -1e-12);
        CHECK((r.col(0).cross(r.col(1)) - r.col(2)).norm() < 1e-9);
        CHECK(is_unit_quaternion(box.rotation));
        CHECK(std::abs(box.rotation.norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("canonicalize_box_rotation is idempotent and matches fit convention") {
    Rng rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        Quat q(Eigen::AngleAxisd(
            rng.uniform(0, 6.28),
            Vec3(rng.gaussian(), rng.gaussian(), rng.gaussian()).normalized()));
        Quat c = canonicalize_box_rotation(q);
        Quat cc = canonicalize_box_rotation(c);
        CHECK(std::abs(c.dot(cc) - 1.0) < 1e-12);
        Mat3 r = c.toRotationMatrix();
        CHECK(r.col(0).dot(Vec3::UnitZ()) >= -1e-12);
        CHECK(r.col(1).dot(Vec3::UnitZ()) >= -1e-12);
        CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-9));
        // Same box frame: columns equal up to the sign flips applied.
        Mat3 orig = q.toRotationMatrix();
        for (int col = 0; col < 3; ++col)
            CHECK(std::abs(std::abs(r.col(col).dot(orig.col(col))) - 1.0) < 1e-9);
    }
}

TEST_CASE("geometric filter gates count, volume, and ratio") {
    LeafFilterConfig cfg;  // defaults: >=30 pts, vol [2e-6, 2e-4], ratio [1, 4]
    CHECK(geometric_filter(50, 5e-5, 2.0, cfg));
    CHECK_FALSE(geometric_filter(29, 5e-5, 2.0, cfg));
    CHECK_FALSE(geometric_filter(50, 1e-6, 2.0, cfg));
    CHECK_FALSE(geometric_filter(50, 3e-4, 2.0, cfg));
    CHECK_FALSE(geometric_filter(50, 5e-5, 0.9, cfg));
    CHECK_FALSE(geometric_filter(50, 5e-5, 4.1, cfg));
    // Closed interval endpoints pass.
    CHECK(geometric_filter(30, 2e-6, 1.0, cfg));
    CHECK(geometric_filter(30, 2e-4, 4.0, cfg));
}

TEST_CASE("detect_leaves finds synthetic leaves and ranks nearest first") {
    SceneSpec spec;
    spec.n_leaves = 3;
    spec.seed = 4;
    spec.branch_count = 0;
    spec.noise_sigma_coeff = 0.001;
    auto scene = generate_scene(spec);

    PreprocessConfig pre;
    ClusteringParams clus{0.012, 8};
    LeafFilterConfig filt;
    DetectionStageCounts counts;
    auto cands = detect_leaves(scene.cloud, pre, clus, filt, &counts);

    CHECK(counts.input == scene.cloud.size());
    CHECK(counts.after_crop <= counts.input);
    CHECK(counts.after_outlier_removal <= counts.after_crop);
    CHECK(counts.after_downsample <= counts.after_outlier_removal);
    CHECK(counts.candidates == cands.size());
    CHECK(cands.size() >= 2);

    for (std::size_t i = 0; i < cands.size(); ++i) {
        CHECK(cands[i].rank == i);
        CHECK(cands[i].volume == doctest::Approx(cands[i].obb.volume()));
        CHECK(cands[i].leaf_ratio >= filt.ratio_min);
        CHECK(cands[i].leaf_ratio <= filt.ratio_max);
        CHECK(cands[i].n_points >= filt.min_cluster_points);
        if (i > 0)
            CHECK(cands[i].obb.center.norm() >= cands[i - 1].obb.center.norm());
    }
}

TEST_CASE("detect_leaves is deterministic") {
    SceneSpec spec;
    spec.n_leaves = 2;
    spec.seed = 6;
    auto scene = generate_scene(spec);
    PreprocessConfig pre;
    ClusteringParams clus{0.012, 8};
    LeafFilterConfig filt;
    auto a = detect_leaves(scene.cloud, pre, clus, filt);
    auto b = detect_leaves(scene.cloud, pre, clus, filt);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].obb.center == b[i].obb.center);
        CHECK(a[i].obb.dims == b[i].obb.dims);
        CHECK(a[i].obb.rotation.coeffs() == b[i].obb.rotation.coeffs());
        CHECK(a[i].n_points == b[i].n_points);
    }
}

TEST_CASE("empty cloud produces no candidates") {
    PointCloud empty;
    auto cands = detect_leaves(empty, PreprocessConfig{}, ClusteringParams{},
                               LeafFilterConfig{});
    CHECK(cands.empty());
}

TEST_CASE("candidate queue pops in rank order") {
    std::vector<LeafCandidate> v(3);
    for (std::size_t i = 0; i < 3; ++i) v[i].rank = i;
    CandidateQueue q(std::move(v));
    CHECK(q.remaining() == 3);
    CHECK(q.pop().rank == 0);
    CHECK(q.pop().rank == 1);
    CHECK(q.remaining() == 1);
    CHECK(q.pop().rank == 2);
    CHECK(q.empty());
}
