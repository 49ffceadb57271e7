#include "leafpick/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace leafpick {

KdTree::KdTree(const PointCloud& cloud) : points_(cloud.points) {
    if (points_.empty()) return;
    nodes_.reserve(points_.size());
    std::vector<std::uint32_t> order(points_.size());
    std::iota(order.begin(), order.end(), 0u);
    root_ = build(order.data(), order.data() + order.size());
}

std::int32_t KdTree::build(std::uint32_t* begin, std::uint32_t* end) {
    if (begin == end) return -1;

    Vec3 lo = points_[*begin], hi = points_[*begin];
    for (std::uint32_t* it = begin; it != end; ++it) {
        lo = lo.cwiseMin(points_[*it]);
        hi = hi.cwiseMax(points_[*it]);
    }
    Vec3 extent = hi - lo;
    std::uint8_t axis = 0;
    if (extent.y() > extent.x()) axis = 1;
    if (extent.z() > extent[axis]) axis = 2;

    std::uint32_t* mid = begin + (end - begin) / 2;
    std::nth_element(begin, mid, end, [&](std::uint32_t a, std::uint32_t b) {
        double ca = points_[a][axis], cb = points_[b][axis];
        return ca < cb || (ca == cb && a < b);
    });

    Node node;
    node.point = *mid;
    node.axis = axis;
    std::int32_t id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(node);
    std::int32_t l = build(begin, mid);
    std::int32_t r = build(mid + 1, end);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
}

void KdTree::radius_search(std::int32_t node, const Vec3& q, double r2,
                           std::vector<std::uint32_t>& out) const {
    if (node < 0) return;
    const Node& n = nodes_[node];
    const Vec3& p = points_[n.point];
    if ((p - q).squaredNorm() <= r2) out.push_back(n.point);
    double diff = q[n.axis] - p[n.axis];
    if (diff <= 0.0 || diff * diff <= r2) radius_search(n.left, q, r2, out);
    if (diff >= 0.0 || diff * diff <= r2) radius_search(n.right, q, r2, out);
}

std::vector<std::uint32_t> KdTree::radius_neighbors(const Vec3& q, double r) const {
    std::vector<std::uint32_t> out;
    if (r < 0.0) return out;
    radius_search(root_, q, r * r, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::uint32_t> KdTree::knn(const Vec3& q, std::size_t k) const {
    std::vector<std::uint32_t> out;
    if (k == 0 || points_.empty()) return out;

    // Max-heap of (distance^2, index); ties on distance resolved by
    // keeping the lower index so results are deterministic.
    using Entry = std::pair<double, std::uint32_t>;
    std::priority_queue<Entry> heap;

    auto visit = [&](auto&& self, std::int32_t node) -> void {
        if (node < 0) return;
        const Node& n = nodes_[node];
        const Vec3& p = points_[n.point];
        double d2 = (p - q).squaredNorm();
        Entry e{d2, n.point};
        if (heap.size() < k) {
            heap.push(e);
        } else if (e < heap.top()) {
            heap.pop();
            heap.push(e);
        }
        double diff = q[n.axis] - p[n.axis];
        std::int32_t near = diff <= 0.0 ? n.left : n.right;
        std::int32_t far = diff <= 0.0 ? n.right : n.left;
        self(self, near);
        if (heap.size() < k || diff * diff <= heap.top().first)
            self(self, far);
    };
    visit(visit, root_);

    out.reserve(heap.size());
    while (!heap.empty()) {
        out.push_back(heap.top().second);
        heap.pop();
    }
    std::reverse(out.begin(), out.end());  // nearest first
    return out;
}

}  // namespace leafpick
