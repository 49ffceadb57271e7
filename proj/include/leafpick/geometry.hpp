#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace leafpick {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

/// Rigid transform: translation in meters, rotation as a unit quaternion.
/// Euler angles, when requested, use intrinsic Z-Y-X order (yaw, pitch, roll).
struct Pose6D {
    Vec3 translation{Vec3::Zero()};
    Quat rotation{Quat::Identity()};

    static Pose6D identity() { return {}; }

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

    Pose6D inverse() const {
        Quat ri = rotation.conjugate();
        return {ri * -translation, ri};
    }

    Pose6D compose(const Pose6D& other) const {
        return {rotation * other.translation + translation, rotation * other.rotation};
    }
};

inline bool is_unit_quaternion(const Quat& q, double tol = 1e-9) {
    return std::abs(q.norm() - 1.0) <= tol;
}

/// Z-Y-X intrinsic Euler angles (radians) from a unit quaternion.
inline Vec3 quat_to_euler_zyx(const Quat& q) {
    return q.toRotationMatrix().eulerAngles(2, 1, 0);
}

inline Quat euler_zyx_to_quat(double yaw, double pitch, double roll) {
    return Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                Eigen::AngleAxisd(roll, Vec3::UnitX()));
}

inline constexpr double rad_to_deg(double r) { return r * 180.0 / EIGEN_PI; }
inline constexpr double deg_to_rad(double d) { return d * EIGEN_PI / 180.0; }

}  // namespace leafpick
