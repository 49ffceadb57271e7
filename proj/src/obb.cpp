#include "leafpick/obb.hpp"

#include <algorithm>
#include <array>

namespace leafpick {

namespace {

// Fixes the quaternion double cover so equal rotations serialize equally.
Quat canonical_sign(Quat q) {
    q.normalize();
    std::array<double, 4> c{q.w(), q.x(), q.y(), q.z()};
    for (double v : c) {
        if (v > 0.0) return q;
        if (v < 0.0) return Quat(-q.w(), -q.x(), -q.y(), -q.z());
    }
    return q;
}

Mat3 canonicalize_axes(Mat3 axes) {
    for (int i = 0; i < 2; ++i)
        if (axes.col(i).z() < 0.0) axes.col(i) = -axes.col(i);
    axes.col(2) = axes.col(0).cross(axes.col(1));
    return axes;
}

}  // namespace

Quat canonicalize_box_rotation(const Quat& q) {
    return canonical_sign(Quat(canonicalize_axes(q.toRotationMatrix())));
}

OrientedBoundingBox fit_obb(std::span<const Vec3> points) {
    if (points.empty())
        throw EmptyInputError("fit_obb: empty point set");

    const double n = static_cast<double>(points.size());
    Vec3 mean = Vec3::Zero();
    for (const Vec3& p : points) mean += p;
    mean /= n;

    Mat3 cov = Mat3::Zero();
    for (const Vec3& p : points) {
        Vec3 d = p - mean;
        cov += d * d.transpose();
    }
    cov /= n;

    if (cov.trace() <= 0.0) {  // all points coincide
        OrientedBoundingBox box;
        box.center = mean;
        return box;
    }

    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    // Eigen returns ascending eigenvalues; we want descending.
    Mat3 axes;
    axes.col(0) = eig.eigenvectors().col(2);
    axes.col(1) = eig.eigenvectors().col(1);
    axes.col(2) = eig.eigenvectors().col(0);

    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const Vec3& p : points) {
        Vec3 q = axes.transpose() * (p - mean);
        lo = lo.cwiseMin(q);
        hi = hi.cwiseMax(q);
    }
    Vec3 extent = hi - lo;
    Vec3 mid = 0.5 * (hi + lo);

    // Eigenvalue order usually matches extent order; enforce it regardless.
    std::array<int, 3> idx{0, 1, 2};
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return extent[a] > extent[b]; });
    Mat3 sorted_axes;
    Vec3 dims, sorted_mid;
    for (int i = 0; i < 3; ++i) {
        sorted_axes.col(i) = axes.col(idx[i]);
        dims[i] = extent[idx[i]];
        sorted_mid[i] = mid[idx[i]];
    }

    Vec3 center = mean + sorted_axes * sorted_mid;
    sorted_axes = canonicalize_axes(sorted_axes);

    OrientedBoundingBox box;
    box.center = center;
    box.dims = dims;
    box.rotation = canonical_sign(Quat(sorted_axes));
    return box;
}

}  // namespace leafpick
