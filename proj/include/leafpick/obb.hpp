#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "leafpick/geometry.hpp"

namespace leafpick {

/// Oriented bounding box of a point cluster. dims = [h, w, d] sorted
/// descending; the rotation's columns map the (h, w, d) box axes into the
/// sensor frame and form a proper rotation (det +1).
struct OrientedBoundingBox {
    Vec3 center{Vec3::Zero()};
    Vec3 dims{Vec3::Zero()};  // h >= w >= d, meters
    Quat rotation{Quat::Identity()};

    double volume() const { return dims.x() * dims.y() * dims.z(); }
    double leaf_ratio() const { return dims.x() / dims.y(); }  // h / w
};

struct EmptyInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// PCA box fit. Axes are the principal components of the centered point
/// set ordered by descending extent; center is the midpoint of the extents
/// mapped back to the sensor frame. Every input point lies inside the box
/// within 1e-9 slack. Axis signs are canonical: the h and w axes are
/// flipped so their dot product with sensor +z is non-negative, the d axis
/// then follows from right-handedness. Throws EmptyInputError on an empty
/// set; a single point yields a zero-dims box with identity rotation.
OrientedBoundingBox fit_obb(std::span<const Vec3> points);

/// Applies the same axis-sign canonicalization to an arbitrary box-frame
/// rotation so externally supplied poses compare against fitted ones.
Quat canonicalize_box_rotation(const Quat& q);

}  // namespace leafpick
