#include "drlsim/roadnet_json.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "drlsim/errors.hpp"

namespace drlsim::roadnet {

using nlohmann::json;

namespace {

json geometry_to_json(const LaneGeometry& g) {
    if (const auto* seg = std::get_if<StraightSegment>(&g)) {
        return json{{"kind", "straight"},
                    {"start", {seg->start.x, seg->start.y}},
                    {"end", {seg->end.x, seg->end.y}}};
    }
    const auto& arc = std::get<CircularArc>(g);
    return json{{"kind", "arc"},
                {"center", {arc.center.x, arc.center.y}},
                {"radius", arc.radius},
                {"start_angle", arc.start_angle},
                {"end_angle", arc.end_angle},
                {"turn", arc.turn == TurnDirection::ccw ? "ccw" : "cw"}};
}

Vec2 vec_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

LaneGeometry geometry_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "straight") return StraightSegment{vec_from(j.at("start")), vec_from(j.at("end"))};
    if (kind == "arc") {
        CircularArc arc;
        arc.center = vec_from(j.at("center"));
        arc.radius = j.at("radius").get<double>();
        arc.start_angle = j.at("start_angle").get<double>();
        arc.end_angle = j.at("end_angle").get<double>();
        const std::string turn = j.at("turn").get<std::string>();
        if (turn != "ccw" && turn != "cw")
            throw std::invalid_argument("bad turn direction '" + turn + "'");
        arc.turn = turn == "ccw" ? TurnDirection::ccw : TurnDirection::cw;
        return arc;
    }
    throw std::invalid_argument("unknown lane geometry kind '" + kind + "'");
}

}  // namespace

json network_to_json(const RoadNetwork& network) {
    json lanes = json::array();
    for (const Lane& lane : network.lanes()) {
        json entry = geometry_to_json(lane.geometry());
        entry["id"] = lane.id();
        entry["width"] = lane.width();
        entry["speed_limit"] = lane.speed_limit();
        lanes.push_back(std::move(entry));
    }
    json successors = json::object();
    for (const auto& [from, tos] : network.successors()) {
        successors[from] = json::array();
        for (const auto& to : tos) successors[from].push_back(to);
    }
    return json{{"version", 1}, {"lanes", std::move(lanes)}, {"successors", std::move(successors)}};
}

RoadNetwork network_from_json(const json& doc) {
    if (doc.value("version", 0) != 1)
        throw std::invalid_argument("unsupported road network fixture version");
    std::vector<Lane> lanes;
    for (const auto& entry : doc.at("lanes")) {
        lanes.emplace_back(entry.at("id").get<std::string>(), geometry_from_json(entry),
                           entry.value("width", 4.0), entry.value("speed_limit", 15.0));
    }
    SuccessorMap successors;
    if (doc.contains("successors")) {
        for (const auto& [from, tos] : doc.at("successors").items()) {
            for (const auto& to : tos) successors[from].insert(to.get<std::string>());
        }
    }
    return RoadNetwork(std::move(lanes), std::move(successors));
}

RoadNetwork load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open road network fixture '" + path + "'");
    json doc;
    in >> doc;
    return network_from_json(doc);
}

void save_network_file(const RoadNetwork& network, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write road network fixture '" + path + "'");
    out << network_to_json(network).dump(2) << '\n';
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string network_fingerprint(const RoadNetwork& network) {
    std::ostringstream hex;
    hex << std::hex << std::setfill('0') << std::setw(16)
        << fnv1a64(network_to_json(network).dump());
    return hex.str();
}

}  // namespace drlsim::roadnet
