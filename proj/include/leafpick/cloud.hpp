#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "leafpick/geometry.hpp"

namespace leafpick {

using Rgb = std::array<std::uint8_t, 3>;

/// 3D point cloud in the sensor (camera) frame, coordinates in meters.
/// +z points away from the camera along the optical axis. Colors, when
/// present, have exactly one entry per point.
struct PointCloud {
    std::vector<Vec3> points;
    std::vector<Rgb> colors;  // empty or same length as points
    std::string frame_id{"sensor"};

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_colors() const { return !colors.empty(); }

    void reserve(std::size_t n) {
        points.reserve(n);
    }
};

/// Maps every point p to R*p + t. Colors carried along unchanged.
PointCloud transform_cloud(const PointCloud& cloud, const Pose6D& pose);

}  // namespace leafpick
