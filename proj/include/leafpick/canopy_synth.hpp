#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "leafpick/cloud.hpp"

namespace leafpick {

/// Geometry of one synthetic leaf. Leaf frame: h-axis (x) runs from the
/// stem junction to the tip, w-axis (y) spans the width, d-axis (z) is the
/// surface normal. pose maps leaf-frame coordinates into the sensor frame.
struct LeafSpec {
    double length = 0.091;   // meters, along h
    double width = 0.048;    // meters, along w
    double curvature = 0.0;  // bend lift in meters at the leaf ends
    Pose6D pose;
    double stem_length = 0.015;  // junction outward, meters

    /// Planform half-width at t in [0,1] along the length axis.
    double half_width_at(double t) const;
    /// Surface area of the planform (numeric quadrature).
    double area() const;
    /// Stem junction in the sensor frame (leaf boundary at the -h end).
    Vec3 stem_junction_sensor() const;
    /// Unit direction of the stem in the sensor frame, pointing away
    /// from the leaf.
    Vec3 stem_dir_sensor() const;
};

enum class Profile { indoor, outdoor };

struct SceneSpec {
    std::size_t n_leaves = 2;
    double camera_range_min = 0.2;  // meters
    double camera_range_max = 0.3;
    Profile profile = Profile::indoor;
    double noise_sigma_coeff = 0.0028;  // sigma(z) = coeff * z^2
    std::size_t branch_count = 2;
    double occlusion_fraction = 0.0;
    std::uint64_t seed = 1;
    double density_ref = 3.0e5;            // pts/m^2 at 1 m, scaled by 1/z^2
    double background_density_factor = 0.02;
};

constexpr std::int32_t kLabelBranch = -2;
constexpr std::int32_t kLabelBackground = -3;

struct TruthLeaf {
    LeafSpec spec;
    Vec3 center{Vec3::Zero()};   // centroid of the noise-free surface
    Pose6D canonical_pose;       // center + axis-sign-canonicalized rotation
    Vec3 stem_junction{Vec3::Zero()};
    Vec3 stem_dir{Vec3::UnitX()};
    double stem_length = 0.0;
    std::vector<Vec3> surface_points;  // noise-free subset for capture checks
};

struct GroundTruth {
    std::vector<TruthLeaf> leaves;
    std::vector<std::int32_t> labels;  // per cloud point: leaf id or kLabel*
    static constexpr std::uint32_t schema_version = 1;
};

struct PlacementError : std::runtime_error {
    PlacementError(std::size_t leaf_index)
        : std::runtime_error("cannot place leaf " + std::to_string(leaf_index) +
                             " after bounded retries"),
          leaf(leaf_index) {}
    std::size_t leaf;
};

/// Points on the parametric leaf surface at the given area density,
/// in the sensor frame. Deterministic (Halton sequence); point count is
/// round(area * density).
std::vector<Vec3> sample_leaf_surface(const LeafSpec& spec, double density);

struct SyntheticScene {
    PointCloud cloud;
    GroundTruth truth;
};

/// Deterministic scene generation: identical specs give byte-identical
/// output. Throws PlacementError when a leaf cannot be placed.
SyntheticScene generate_scene(const SceneSpec& spec);

/// Ground-truth sidecar (JSON) serialization.
std::string ground_truth_to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const std::string& text);

struct SchemaMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace leafpick
