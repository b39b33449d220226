#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "drlsim/roadnet.hpp"

namespace drlsim::roadnet {

/// Fixture document: {"version":1,"lanes":[...],"successors":{...}}.
/// Geometry is tagged by "kind": "straight" | "arc"; meters and radians.
nlohmann::json network_to_json(const RoadNetwork& network);
RoadNetwork network_from_json(const nlohmann::json& doc);

RoadNetwork load_network_file(const std::string& path);
void save_network_file(const RoadNetwork& network, const std::string& path);

/// Content fingerprint (FNV-1a 64, hex) of the canonical serialization; used
/// for run-manifest provenance, not security.
std::string network_fingerprint(const RoadNetwork& network);
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace drlsim::roadnet
