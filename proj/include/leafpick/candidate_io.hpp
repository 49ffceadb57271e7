#pragma once

#include <string>
#include <vector>

#include "leafpick/leaf_detect.hpp"

namespace leafpick {

constexpr std::uint32_t kCandidateSchemaVersion = 1;

/// Candidate records in report units: center and dims in millimeters,
/// volume in cubic millimeters, quaternion plus Z-Y-X Euler angles in
/// degrees. Deterministic output for identical candidates.
std::string candidates_to_json(const std::vector<LeafCandidate>& candidates,
                               const DetectionStageCounts& counts);

std::vector<LeafCandidate> candidates_from_json(const std::string& text);

}  // namespace leafpick
