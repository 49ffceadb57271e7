#include "leafpick/candidate_io.hpp"

#include <json.hpp>

#include "leafpick/canopy_synth.hpp"  // SchemaMismatchError

namespace leafpick {

std::string candidates_to_json(const std::vector<LeafCandidate>& candidates,
                               const DetectionStageCounts& counts) {
    nlohmann::json j;
    j["schema_version"] = kCandidateSchemaVersion;
    j["stage_counts"] = {{"input", counts.input},
                         {"after_crop", counts.after_crop},
                         {"after_outlier_removal", counts.after_outlier_removal},
                         {"after_downsample", counts.after_downsample},
                         {"clusters", counts.clusters},
                         {"candidates", counts.candidates}};
    j["candidates"] = nlohmann::json::array();
    for (const auto& c : candidates) {
        const Quat& q = c.pose.rotation;
        Vec3 euler = quat_to_euler_zyx(q);
        nlohmann::json e;
        e["rank"] = c.rank;
        e["center_mm"] = {c.obb.center.x() * 1000.0, c.obb.center.y() * 1000.0,
                          c.obb.center.z() * 1000.0};
        e["dims_mm"] = {c.obb.dims.x() * 1000.0, c.obb.dims.y() * 1000.0,
                        c.obb.dims.z() * 1000.0};
        e["quaternion"] = {q.w(), q.x(), q.y(), q.z()};
        e["euler_zyx_deg"] = {rad_to_deg(euler[0]), rad_to_deg(euler[1]),
                              rad_to_deg(euler[2])};
        e["n_points"] = c.n_points;
        e["volume_mm3"] = c.volume * 1e9;
        e["leaf_ratio"] = c.leaf_ratio;
        j["candidates"].push_back(std::move(e));
    }
    return j.dump(2) + "\n";
}

std::vector<LeafCandidate> candidates_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.contains("schema_version") ||
        j["schema_version"].get<std::uint32_t>() != kCandidateSchemaVersion)
        throw SchemaMismatchError("candidate schema version mismatch");
    std::vector<LeafCandidate> out;
    for (const auto& e : j.at("candidates")) {
        LeafCandidate c;
        c.rank = e.at("rank").get<std::size_t>();
        const auto& ctr = e.at("center_mm");
        c.obb.center = Vec3(ctr.at(0).get<double>(), ctr.at(1).get<double>(),
                            ctr.at(2).get<double>()) / 1000.0;
        const auto& dm = e.at("dims_mm");
        c.obb.dims = Vec3(dm.at(0).get<double>(), dm.at(1).get<double>(),
                          dm.at(2).get<double>()) / 1000.0;
        const auto& q = e.at("quaternion");
        c.obb.rotation = Quat(q.at(0).get<double>(), q.at(1).get<double>(),
                              q.at(2).get<double>(), q.at(3).get<double>());
        c.pose = {c.obb.center, c.obb.rotation};
        c.n_points = e.at("n_points").get<std::size_t>();
        c.volume = e.at("volume_mm3").get<double>() / 1e9;
        c.leaf_ratio = e.at("leaf_ratio").get<double>();
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace leafpick
