#include "leafpick/canopy_synth.hpp"

#include <cmath>

#include <json.hpp>

#include "leafpick/obb.hpp"
#include "leafpick/rng.hpp"

namespace leafpick {

namespace {

constexpr double kPlanformExponent = 0.7;
constexpr int kQuadratureSteps = 512;
constexpr std::size_t kMaxTruthSurfacePoints = 400;
constexpr int kPlacementRetries = 2000;

double planform(double t) {
    return std::pow(std::sin(M_PI * t), kPlanformExponent);
}

// Integral of planform(t) over [0,1], composite Simpson.
double planform_integral() {
    static const double value = [] {
        double h = 1.0 / kQuadratureSteps;
        double sum = planform(0.0) + planform(1.0);
        for (int i = 1; i < kQuadratureSteps; ++i)
            sum += planform(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
        return sum * h / 3.0;
    }();
    return value;
}

// Inverse CDF of the planform weight, for area-uniform sampling along t.
double planform_inv_cdf(double u) {
    static const std::vector<double> cdf = [] {
        std::vector<double> c(1025);
        double acc = 0.0;
        c[0] = 0.0;
        for (int i = 1; i <= 1024; ++i) {
            acc += planform((i - 0.5) / 1024.0);
            c[i] = acc;
        }
        for (double& v : c) v /= acc;
        return c;
    }();
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    std::size_t hi = std::min<std::size_t>(it - cdf.begin(), 1024);
    if (hi == 0) hi = 1;
    double c0 = cdf[hi - 1], c1 = cdf[hi];
    double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
    return (static_cast<double>(hi - 1) + frac) / 1024.0;
}

Vec3 leaf_local_point(const LeafSpec& spec, double t, double s) {
    double x = (t - 0.5) * spec.length;
    double y = s * spec.half_width_at(t);
    double z = spec.curvature * (t - 0.5) * (t - 0.5);
    return {x, y, z};
}

Mat3 random_leaf_rotation(Rng& rng) {
    // Surface normal within 40 degrees of the camera-facing direction (-z),
    // in-plane orientation uniform.
    double phi = rng.uniform(0.0, deg_to_rad(40.0));
    double psi = rng.uniform(0.0, 2.0 * M_PI);
    double gamma = rng.uniform(0.0, 2.0 * M_PI);
    Vec3 n(std::sin(phi) * std::cos(psi), std::sin(phi) * std::sin(psi),
           -std::cos(phi));
    Vec3 u = n.cross(Vec3::UnitZ());
    if (u.norm() < 1e-9) u = Vec3::UnitX();
    u.normalize();
    Vec3 v = n.cross(u);
    Vec3 h = std::cos(gamma) * u + std::sin(gamma) * v;
    Vec3 w = n.cross(h);
    Mat3 r;
    r.col(0) = h;
    r.col(1) = w;
    r.col(2) = n;
    return r;
}

}  // namespace

double LeafSpec::half_width_at(double t) const {
    return 0.5 * width * planform(t);
}

double LeafSpec::area() const {
    return length * width * planform_integral();
}

Vec3 LeafSpec::stem_junction_sensor() const {
    return pose.apply(leaf_local_point(*this, 0.0, 0.0));
}

Vec3 LeafSpec::stem_dir_sensor() const {
    return pose.rotation * -Vec3::UnitX();
}

std::vector<Vec3> sample_leaf_surface(const LeafSpec& spec, double density) {
    std::size_t n = static_cast<std::size_t>(std::llround(spec.area() * density));
    std::vector<Vec3> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = planform_inv_cdf(radical_inverse(i + 1, 2));
        double s = 2.0 * radical_inverse(i + 1, 3) - 1.0;
        out.push_back(spec.pose.apply(leaf_local_point(spec, t, s)));
    }
    return out;
}

SyntheticScene generate_scene(const SceneSpec& spec) {
    Rng rng(spec.seed);
    SyntheticScene scene;
    PointCloud& cloud = scene.cloud;
    GroundTruth& truth = scene.truth;

    const double z_mid = 0.5 * (spec.camera_range_min + spec.camera_range_max);
    const double lateral = 0.5 * z_mid;

    // Place leaves with rejection sampling; centers of leaves i and j stay
    // at least 0.6 * (length_i + length_j) apart, which keeps surface gaps
    // above the clustering radius.
    std::vector<Vec3> placed_centers;
    std::vector<double> placed_lengths;
    for (std::size_t i = 0; i < spec.n_leaves; ++i) {
        LeafSpec leaf;
        leaf.length = rng.uniform(0.054, 0.150);
        leaf.width = std::clamp(leaf.length * rng.uniform(0.42, 0.75), 0.024, 0.086);
        leaf.curvature = rng.uniform(0.012, 0.040);
        leaf.stem_length = rng.uniform(0.010, 0.020);
        Mat3 rot = random_leaf_rotation(rng);

        bool placed = false;
        for (int attempt = 0; attempt < kPlacementRetries && !placed; ++attempt) {
            // Widen the lateral window (up to 2x) as attempts fail, so dense
            // scenes spread out instead of aborting.
            double lat = lateral *
                         (1.0 + static_cast<double>(attempt) / kPlacementRetries);
            Vec3 c(rng.uniform(-lat, lat), rng.uniform(-lat, lat),
                   rng.uniform(spec.camera_range_min, spec.camera_range_max));
            bool ok = true;
            for (std::size_t j = 0; j < placed_centers.size(); ++j) {
                double min_sep = 0.6 * (leaf.length + placed_lengths[j]);
                if ((c - placed_centers[j]).norm() < min_sep) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            leaf.pose = {c, Quat(rot)};
            placed_centers.push_back(c);
            placed_lengths.push_back(leaf.length);
            placed = true;
        }
        if (!placed) throw PlacementError(i);

        double z = leaf.pose.translation.z();
        double density = spec.density_ref / (z * z);
        std::vector<Vec3> surface = sample_leaf_surface(leaf, density);

        TruthLeaf tl;
        tl.spec = leaf;
        Vec3 centroid = Vec3::Zero();
        for (const Vec3& p : surface) centroid += p;
        if (!surface.empty()) centroid /= static_cast<double>(surface.size());
        tl.center = centroid;
        tl.canonical_pose = {centroid, canonicalize_box_rotation(leaf.pose.rotation)};
        tl.stem_junction = leaf.stem_junction_sensor();
        tl.stem_dir = leaf.stem_dir_sensor();
        tl.stem_length = leaf.stem_length;
        std::size_t stride = std::max<std::size_t>(1, surface.size() / kMaxTruthSurfacePoints);
        for (std::size_t k = 0; k < surface.size(); k += stride)
            tl.surface_points.push_back(surface[k]);
        truth.leaves.push_back(std::move(tl));

        cloud.points.insert(cloud.points.end(), surface.begin(), surface.end());
        truth.labels.insert(truth.labels.end(), surface.size(),
                            static_cast<std::int32_t>(i));
    }

    // Occlusion: cull a lateral half-plane of points from selected leaves.
    std::size_t n_occluded = static_cast<std::size_t>(
        std::llround(spec.occlusion_fraction * static_cast<double>(spec.n_leaves)));
    if (n_occluded > 0) {
        std::vector<char> occluded(spec.n_leaves, 0);
        std::size_t marked = 0;
        while (marked < n_occluded) {
            std::size_t id = rng.uniform_index(spec.n_leaves);
            if (!occluded[id]) {
                occluded[id] = 1;
                ++marked;
            }
        }
        std::vector<Vec3> kept_points;
        std::vector<std::int32_t> kept_labels;
        std::vector<Vec3> cut_dir(spec.n_leaves);
        std::vector<double> cut_off(spec.n_leaves);
        for (std::size_t i = 0; i < spec.n_leaves; ++i) {
            double ang = rng.uniform(0.0, 2.0 * M_PI);
            cut_dir[i] = Vec3(std::cos(ang), std::sin(ang), 0.0);
            cut_off[i] = rng.uniform(0.05, 0.25) * truth.leaves[i].spec.length;
        }
        for (std::size_t k = 0; k < cloud.points.size(); ++k) {
            std::int32_t lbl = truth.labels[k];
            if (lbl >= 0 && occluded[lbl]) {
                const Vec3& c = truth.leaves[lbl].center;
                if ((cloud.points[k] - c).dot(cut_dir[lbl]) > cut_off[lbl]) continue;
            }
            kept_points.push_back(cloud.points[k]);
            kept_labels.push_back(lbl);
        }
        cloud.points = std::move(kept_points);
        truth.labels = std::move(kept_labels);
    }

    // Branch cylinders, kept clear of leaf centers.
    for (std::size_t b = 0; b < spec.branch_count; ++b) {
        double radius = rng.uniform(0.004, 0.0075);
        double blen = rng.uniform(0.08, 0.15);
        Vec3 axis(rng.gaussian(), rng.gaussian(), rng.gaussian());
        if (axis.norm() < 1e-9) axis = Vec3::UnitY();
        axis.normalize();
        bool placed = false;
        Vec3 c = Vec3::Zero();
        for (int attempt = 0; attempt < kPlacementRetries && !placed; ++attempt) {
            c = Vec3(rng.uniform(-lateral, lateral), rng.uniform(-lateral, lateral),
                     rng.uniform(spec.camera_range_min, spec.camera_range_max));
            bool ok = true;
            for (const auto& leaf : truth.leaves)
                if ((c - leaf.center).norm() < 0.6 * leaf.spec.length + 0.5 * blen) {
                    ok = false;
                    break;
                }
            placed = ok;
        }
        if (!placed) continue;  // branches are scenery, skip on crowding

        Vec3 u = axis.cross(Vec3::UnitZ());
        if (u.norm() < 1e-9) u = axis.cross(Vec3::UnitX());
        u.normalize();
        Vec3 v = axis.cross(u);
        double density = spec.density_ref / (c.z() * c.z());
        std::size_t n = static_cast<std::size_t>(
            std::llround(2.0 * M_PI * radius * blen * density));
        for (std::size_t i = 0; i < n; ++i) {
            double s = (radical_inverse(i + 1, 2) - 0.5) * blen;
            double a = 2.0 * M_PI * radical_inverse(i + 1, 3);
            Vec3 p = c + axis * s + radius * (std::cos(a) * u + std::sin(a) * v);
            cloud.points.push_back(p);
            truth.labels.push_back(kLabelBranch);
        }
    }

    // Background plane beyond the far crop range.
    {
        double zb = spec.camera_range_max * 1.8;
        double half = 0.5 * zb;
        double density =
            spec.density_ref / (zb * zb) * spec.background_density_factor;
        std::size_t n = static_cast<std::size_t>(
            std::llround(4.0 * half * half * density));
        for (std::size_t i = 0; i < n; ++i) {
            double x = (radical_inverse(i + 1, 2) - 0.5) * 2.0 * half;
            double y = (radical_inverse(i + 1, 3) - 0.5) * 2.0 * half;
            cloud.points.push_back(Vec3(x, y, zb));
            truth.labels.push_back(kLabelBackground);
        }
    }

    // Depth noise along the view ray: sigma(z) = coeff * z^2.
    if (spec.noise_sigma_coeff > 0.0) {
        for (Vec3& p : cloud.points) {
            double z = p.z();
            double sigma = spec.noise_sigma_coeff * z * z;
            Vec3 ray = p.norm() > 1e-12 ? p.normalized() : Vec3::UnitZ();
            p += ray * (sigma * rng.gaussian());
        }
    }

    cloud.frame_id = "sensor";
    return scene;
}

namespace {

nlohmann::json vec3_json(const Vec3& v) {
    return nlohmann::json::array({v.x(), v.y(), v.z()});
}

Vec3 vec3_from(const nlohmann::json& j) {
    return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

nlohmann::json pose_json(const Pose6D& p) {
    return {{"translation", vec3_json(p.translation)},
            {"quaternion", {p.rotation.w(), p.rotation.x(), p.rotation.y(),
                            p.rotation.z()}}};
}

Pose6D pose_from(const nlohmann::json& j) {
    const auto& q = j.at("quaternion");
    return {vec3_from(j.at("translation")),
            Quat(q.at(0).get<double>(), q.at(1).get<double>(),
                 q.at(2).get<double>(), q.at(3).get<double>())};
}

}  // namespace

std::string ground_truth_to_json(const GroundTruth& truth) {
    nlohmann::json j;
    j["schema_version"] = GroundTruth::schema_version;
    j["leaves"] = nlohmann::json::array();
    for (const auto& leaf : truth.leaves) {
        nlohmann::json l;
        l["length"] = leaf.spec.length;
        l["width"] = leaf.spec.width;
        l["curvature"] = leaf.spec.curvature;
        l["stem_length"] = leaf.stem_length;
        l["pose"] = pose_json(leaf.spec.pose);
        l["center"] = vec3_json(leaf.center);
        l["canonical_pose"] = pose_json(leaf.canonical_pose);
        l["stem_junction"] = vec3_json(leaf.stem_junction);
        l["stem_dir"] = vec3_json(leaf.stem_dir);
        nlohmann::json pts = nlohmann::json::array();
        for (const Vec3& p : leaf.surface_points) pts.push_back(vec3_json(p));
        l["surface_points"] = std::move(pts);
        j["leaves"].push_back(std::move(l));
    }
    j["labels"] = truth.labels;
    return j.dump(2) + "\n";
}

GroundTruth ground_truth_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("schema_version") ||
        j["schema_version"].get<std::uint32_t>() != GroundTruth::schema_version)
        throw SchemaMismatchError("ground truth schema version mismatch");
    GroundTruth truth;
    for (const auto& l : j.at("leaves")) {
        TruthLeaf leaf;
        leaf.spec.length = l.at("length").get<double>();
        leaf.spec.width = l.at("width").get<double>();
        leaf.spec.curvature = l.at("curvature").get<double>();
        leaf.spec.stem_length = l.at("stem_length").get<double>();
        leaf.spec.pose = pose_from(l.at("pose"));
        leaf.center = vec3_from(l.at("center"));
        leaf.canonical_pose = pose_from(l.at("canonical_pose"));
        leaf.stem_junction = vec3_from(l.at("stem_junction"));
        leaf.stem_dir = vec3_from(l.at("stem_dir"));
        leaf.stem_length = leaf.spec.stem_length;
        for (const auto& p : l.at("surface_points"))
            leaf.surface_points.push_back(vec3_from(p));
        truth.leaves.push_back(std::move(leaf));
    }
    truth.labels = j.at("labels").get<std::vector<std::int32_t>>();
    return truth;
}

}  // namespace leafpick
