#include <doctest.h>

#include "leafpick/cloud_io.hpp"
#include "leafpick/rng.hpp"

using namespace leafpick;

namespace {

std::vector<std::byte> to_bytes(const std::string& s) {
    std::vector<std::byte> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        out[i] = std::byte(static_cast<unsigned char>(s[i]));
    return out;
}

PointCloud random_cloud(std::size_t n, std::uint64_t seed, bool colors = false) {
    Rng rng(seed);
    PointCloud cloud;
    for (std::size_t i = 0; i < n; ++i) {
        // Quantize to float32 so binary roundtrips are bit-exact by value.
        cloud.points.emplace_back(static_cast<float>(rng.uniform(-2, 2)),
                                  static_cast<float>(rng.uniform(-2, 2)),
                                  static_cast<float>(rng.uniform(-2, 2)));
        if (colors)
            cloud.colors.push_back(Rgb{static_cast<std::uint8_t>(rng.uniform_index(256)),
                                       static_cast<std::uint8_t>(rng.uniform_index(256)),
                                       static_cast<std::uint8_t>(rng.uniform_index(256))});
    }
    return cloud;
}

}  // namespace

TEST_CASE("empty ascii pcd parses to empty cloud") {
    std::string pcd =
        "VERSION 0.7\nFIELDS x y z\nSIZE 4 4 4\nTYPE F F F\nCOUNT 1 1 1\n"
        "WIDTH 0\nHEIGHT 1\nVIEWPOINT 0 0 0 1 0 0 0\nPOINTS 0\nDATA ascii\n";
    auto res = parse_cloud(to_bytes(pcd), FormatHint::pcd);
    CHECK(res.cloud.size() == 0);
    CHECK(res.dropped_non_finite == 0);
}

TEST_CASE("single-vertex ascii ply") {
    std::string ply =
        "ply\nformat ascii 1.0\nelement vertex 1\n"
        "property float x\nproperty float y\nproperty float z\nend_header\n"
        "0.1 0.2 0.3\n";
    auto res = parse_cloud(to_bytes(ply), FormatHint::auto_detect);
    REQUIRE(res.cloud.size() == 1);
    CHECK(res.cloud.points[0].x() == doctest::Approx(0.1));
    CHECK(res.cloud.points[0].y() == doctest::Approx(0.2));
    CHECK(res.cloud.points[0].z() == doctest::Approx(0.3));
}

TEST_CASE("binary pcd roundtrip is bit-exact for 1000 random points") {
    PointCloud cloud = random_cloud(1000, 123);
    auto bytes = write_cloud(cloud, CloudFormat::pcd_binary);
    auto res = parse_cloud(bytes, FormatHint::pcd);
    REQUIRE(res.cloud.size() == cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        CHECK(res.cloud.points[i] == cloud.points[i]);
}

TEST_CASE("roundtrip across all formats") {
    PointCloud cloud = random_cloud(200, 7, true);
    for (CloudFormat fmt : {CloudFormat::pcd_ascii, CloudFormat::pcd_binary,
                            CloudFormat::ply_ascii, CloudFormat::ply_binary}) {
        CAPTURE(static_cast<int>(fmt));
        auto res = parse_cloud(write_cloud(cloud, fmt));
        REQUIRE(res.cloud.size() == cloud.size());
        REQUIRE(res.cloud.colors.size() == cloud.colors.size());
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            CHECK((res.cloud.points[i] - cloud.points[i]).norm() < 1e-6);
            CHECK(res.cloud.colors[i] == cloud.colors[i]);
        }
    }
}

TEST_CASE("binary roundtrips are bit-exact, ascii within 1e-6") {
    PointCloud cloud = random_cloud(100, 99);
    auto bin = parse_cloud(write_cloud(cloud, CloudFormat::ply_binary));
    for (std::size_t i = 0; i < cloud.size(); ++i)
        CHECK(bin.cloud.points[i] == cloud.points[i]);
    auto asc = parse_cloud(write_cloud(cloud, CloudFormat::pcd_ascii));
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        CHECK(std::abs(asc.cloud.points[i].x() - cloud.points[i].x()) < 1e-6);
        CHECK(std::abs(asc.cloud.points[i].y() - cloud.points[i].y()) < 1e-6);
        CHECK(std::abs(asc.cloud.points[i].z() - cloud.points[i].z()) < 1e-6);
    }
}

TEST_CASE("empty cloud writes valid POINTS 0 header") {
    PointCloud empty;
    auto bytes = write_cloud(empty, CloudFormat::pcd_ascii);
    std::string text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    CHECK(text.find("POINTS 0") != std::string::npos);
    CHECK(parse_cloud(bytes).cloud.size() == 0);
}

TEST_CASE("nan points are dropped and counted") {
    std::string pcd =
        "VERSION 0.7\nFIELDS x y z\nSIZE 4 4 4\nTYPE F F F\nCOUNT 1 1 1\n"
        "WIDTH 3\nHEIGHT 1\nVIEWPOINT 0 0 0 1 0 0 0\nPOINTS 3\nDATA ascii\n"
        "1 2 3\nnan 0 0\n4 5 6\n";
    auto res = parse_cloud(to_bytes(pcd));
    CHECK(res.cloud.size() == 2);
    CHECK(res.dropped_non_finite == 1);
    for (const auto& p : res.cloud.points) {
        CHECK(std::isfinite(p.x()));
        CHECK(std::isfinite(p.y()));
        CHECK(std::isfinite(p.z()));
    }
}

TEST_CASE("malformed header reports byte offset") {
    std::string pcd = "VERSION 0.7\nGARBAGE here\n";
    try {
        parse_cloud(to_bytes(pcd), FormatHint::pcd);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.byte_offset == 12);
    }
}

TEST_CASE("unsupported encodings rejected") {
    std::string pcd =
        "VERSION 0.7\nFIELDS x y z\nSIZE 4 4 4\nTYPE F F F\nCOUNT 1 1 1\n"
        "WIDTH 1\nHEIGHT 1\nVIEWPOINT 0 0 0 1 0 0 0\nPOINTS 1\nDATA binary_compressed\n";
    CHECK_THROWS_AS(parse_cloud(to_bytes(pcd)), UnsupportedFormatError);

    std::string ply = "ply\nformat binary_big_endian 1.0\nelement vertex 0\n"
                      "property float x\nproperty float y\nproperty float z\nend_header\n";
    CHECK_THROWS_AS(parse_cloud(to_bytes(ply)), UnsupportedFormatError);
}

TEST_CASE("truncated body reports expected vs found") {
    PointCloud cloud = random_cloud(10, 1);
    auto bytes = write_cloud(cloud, CloudFormat::pcd_binary);
    bytes.resize(bytes.size() - 12);  // drop one point
    try {
        parse_cloud(bytes);
        FAIL("expected TruncationError");
    } catch (const TruncationError& e) {
        CHECK(e.expected == 10);
        CHECK(e.found == 9);
    }
}

TEST_CASE("transform_cloud basics") {
    PointCloud c;
    c.points = {Vec3(0, 0, 0), Vec3(1, 0, 0)};

    SUBCASE("identity") {
        auto out = transform_cloud(c, Pose6D::identity());
        CHECK(out.points[0] == c.points[0]);
        CHECK(out.points[1] == c.points[1]);
    }
    SUBCASE("pure translation") {
        Pose6D t{Vec3(1, 0, 0), Quat::Identity()};
        auto out = transform_cloud(c, t);
        CHECK(out.points[0] == Vec3(1, 0, 0));
    }
    SUBCASE("90 degree z rotation") {
        Pose6D r{Vec3::Zero(), Quat(Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()))};
        auto out = transform_cloud(c, r);
        CHECK((out.points[1] - Vec3(0, 1, 0)).norm() < 1e-12);
    }
}

TEST_CASE("transform then inverse recovers the cloud") {
    PointCloud cloud = random_cloud(50, 5);
    Rng rng(11);
    Pose6D pose{Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)),
                Quat(Eigen::AngleAxisd(rng.uniform(0, 3),
                                       Vec3(rng.gaussian(), rng.gaussian(),
                                            rng.gaussian()).normalized()))};
    auto back = transform_cloud(transform_cloud(cloud, pose), pose.inverse());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        CHECK((back.points[i] - cloud.points[i]).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("euler conversion roundtrip") {
    Quat q = euler_zyx_to_quat(0.3, -0.5, 1.1);
    CHECK(is_unit_quaternion(q));
    Vec3 e = quat_to_euler_zyx(q);
    Quat q2 = euler_zyx_to_quat(e[0], e[1], e[2]);
    CHECK(std::abs(std::abs(q.dot(q2)) - 1.0) < 1e-9);
}
