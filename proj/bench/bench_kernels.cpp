// Compares the kd-tree/OpenMP kernels against the serial brute-force
// references on seeded synthetic clouds.

#include <chrono>
#include <cstdio>

#include "leafpick/canopy_synth.hpp"
#include "leafpick/dbscan.hpp"
#include "leafpick/kdtree.hpp"
#include "leafpick/preprocess.hpp"
#include "leafpick/reference.hpp"
#include "leafpick/rng.hpp"

using namespace leafpick;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    PointCloud cloud;
    cloud.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        cloud.points.emplace_back(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2),
                                  rng.uniform(0.15, 0.45));
    return cloud;
}

}  // namespace

int main() {
    std::printf("%-34s %10s %10s %8s\n", "kernel", "fast (s)", "serial (s)",
                "speedup");

    for (std::size_t n : {2000u, 10000u, 40000u}) {
        PointCloud cloud = random_cloud(n, 42 + n);

        // Radius queries: kd-tree vs linear scan.
        {
            KdTree tree(cloud);
            Rng rng(7);
            std::vector<Vec3> queries;
            for (int i = 0; i < 200; ++i)
                queries.emplace_back(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2),
                                     rng.uniform(0.15, 0.45));
            auto t0 = std::chrono::steady_clock::now();
            std::size_t hits_fast = 0;
            for (const Vec3& q : queries)
                hits_fast += tree.radius_neighbors(q, 0.02).size();
            double fast = seconds_since(t0);

            t0 = std::chrono::steady_clock::now();
            std::size_t hits_ref = 0;
            for (const Vec3& q : queries)
                hits_ref += reference::radius_neighbors_bruteforce(cloud, q, 0.02).size();
            double ref = seconds_since(t0);
            if (hits_fast != hits_ref) {
                std::fprintf(stderr, "radius query mismatch at n=%zu\n", n);
                return 1;
            }
            std::printf("radius_neighbors n=%-8zu          %10.4f %10.4f %7.1fx\n",
                        n, fast, ref, ref / fast);
        }

        // Statistical outlier removal: parallel kd vs serial quadratic.
        {
            auto t0 = std::chrono::steady_clock::now();
            PointCloud fast_out = remove_statistical_outliers(cloud, 10, 2.0);
            double fast = seconds_since(t0);
            t0 = std::chrono::steady_clock::now();
            PointCloud ref_out =
                reference::remove_statistical_outliers_serial(cloud, 10, 2.0);
            double ref = seconds_since(t0);
            if (fast_out.size() != ref_out.size()) {
                std::fprintf(stderr, "outlier removal mismatch at n=%zu\n", n);
                return 1;
            }
            std::printf("outlier_removal n=%-8zu           %10.4f %10.4f %7.1fx\n",
                        n, fast, ref, ref / fast);
        }

        // DBSCAN: kd-tree vs quadratic reference.
        {
            ClusteringParams params{0.015, 6};
            auto t0 = std::chrono::steady_clock::now();
            ClusterLabels fast_labels = dbscan(cloud, params);
            double fast = seconds_since(t0);
            t0 = std::chrono::steady_clock::now();
            ClusterLabels ref_labels = reference::dbscan_quadratic(cloud, params);
            double ref = seconds_since(t0);
            if (fast_labels.labels != ref_labels.labels) {
                std::fprintf(stderr, "dbscan mismatch at n=%zu\n", n);
                return 1;
            }
            std::printf("dbscan n=%-8zu                    %10.4f %10.4f %7.1fx\n",
                        n, fast, ref, ref / fast);
        }
    }
    return 0;
}
