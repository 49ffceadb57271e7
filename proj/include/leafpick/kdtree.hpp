#pragma once

#include <cstdint>
#include <vector>

#include "leafpick/cloud.hpp"

namespace leafpick {

/// Balanced 3-d tree over the point indices of an immutable cloud.
/// Build is deterministic for a fixed input order: median split on the
/// widest axis, ties broken by lower index. Immutable after construction
/// and safe for concurrent queries.
class KdTree {
public:
    KdTree() = default;
    explicit KdTree(const PointCloud& cloud);

    /// Exact closed-ball query: {i : |p_i - q| <= r}, ascending index order.
    std::vector<std::uint32_t> radius_neighbors(const Vec3& q, double r) const;

    /// Indices of the k nearest points to q (excluding none; the query
    /// point's own index appears if q coincides with a stored point).
    /// Returns fewer than k when the cloud is smaller.
    std::vector<std::uint32_t> knn(const Vec3& q, std::size_t k) const;

    std::size_t size() const { return points_.size(); }

private:
    struct Node {
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::uint32_t point = 0;  // index into the source cloud
        std::uint8_t axis = 0;
    };

    std::int32_t build(std::uint32_t* begin, std::uint32_t* end);
    void radius_search(std::int32_t node, const Vec3& q, double r2,
                       std::vector<std::uint32_t>& out) const;

    std::vector<Vec3> points_;
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

}  // namespace leafpick
