#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "drlsim/geom.hpp"

namespace drlsim::roadnet {

using geom::Vec2;

/// A sampled point on a lane centerline. Heading is the travel tangent,
/// normalized to (-pi, pi]; arc_length is measured from the lane start.
struct LanePoint {
    Vec2 position;
    double heading = 0.0;
    double arc_length = 0.0;
};

struct StraightSegment {
    Vec2 start;
    Vec2 end;
};

enum class TurnDirection { ccw, cw };

/// Circular arc traversed from start_angle to end_angle in `turn` direction.
/// Angles are positions on the circle (not headings); the swept span is
/// normalized into (0, 2*pi].
struct CircularArc {
    Vec2 center;
    double radius = 1.0;
    double start_angle = 0.0;
    double end_angle = 0.0;
    TurnDirection turn = TurnDirection::ccw;

    double span() const;  // swept angle, in (0, 2*pi]
};

using LaneGeometry = std::variant<StraightSegment, CircularArc>;

class Lane {
public:
    Lane(std::string id, LaneGeometry geometry, double width = 4.0, double speed_limit = 15.0);

    const std::string& id() const { return id_; }
    const LaneGeometry& geometry() const { return geometry_; }
    double width() const { return width_; }
    double speed_limit() const { return speed_limit_; }
    double length() const { return length_; }

    /// Centerline point at arc length s (clamped to [0, length]).
    LanePoint point_at(double s) const;

    /// Analytic closest centerline point to `p`.
    LanePoint project(Vec2 p) const;

    LanePoint start_point() const { return point_at(0.0); }
    LanePoint end_point() const;

    /// Axis-aligned bounds of the centerline (for spatial indexing).
    void bounds(Vec2& lo, Vec2& hi) const;

private:
    std::string id_;
    LaneGeometry geometry_;
    double width_;
    double speed_limit_;
    double length_;
};

/// Uniform-grid index over lane centerline bounds. Queries return a superset
/// of the lanes whose bounds intersect a cell.
class SpatialIndex {
public:
    SpatialIndex() = default;
    SpatialIndex(const std::vector<Lane>& lanes, double cell_size);

    /// Indices (into the lane vector) of candidate lanes for the cell at `p`.
    const std::vector<std::size_t>& cell_candidates(Vec2 p) const;

    /// Indices of lanes within `ring` cells of the cell containing `p`.
    std::vector<std::size_t> ring_candidates(Vec2 p, int ring) const;

    double cell_size() const { return cell_; }
    int rings_to_cover_all() const { return std::max(nx_, ny_); }

private:
    std::size_t cell_of(int cx, int cy) const;
    double cell_ = 10.0;
    Vec2 origin_;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<std::size_t>> cells_;
    std::vector<std::size_t> empty_;
};

using SuccessorMap = std::map<std::string, std::set<std::string>>;

/// The per-step geometric summary of a vehicle against one lane.
struct LaneRelation {
    std::string lane_id;
    LanePoint closest_point;
    double signed_distance = 0.0;  // positive left of the lane tangent
    double lhd = 0.0;              // lane heading difference, in (-pi, pi]
    bool onlane = false;           // |signed_distance| <= width/2
};

/// Immutable collection of lanes plus their drivable-continuation graph.
/// Construction validates G0 continuity of every successor pair (<= 0.5 m)
/// and builds a 10 m uniform grid index. Safe to share read-only.
class RoadNetwork {
public:
    RoadNetwork(std::vector<Lane> lanes, SuccessorMap successors);

    bool empty() const { return lanes_.empty(); }
    std::size_t size() const { return lanes_.size(); }

    /// Lanes in ascending id order.
    const std::vector<Lane>& lanes() const { return lanes_; }
    const Lane& lane(const std::string& id) const;       // throws NotFoundError
    bool has_lane(const std::string& id) const;
    const SuccessorMap& successors() const { return successors_; }
    const std::set<std::string>& successors_of(const std::string& id) const;

    /// Ids of (at most) k nearest lanes by analytic centerline distance,
    /// gathered through the spatial index.
    std::vector<std::string> nearest_lanes(Vec2 p, std::size_t k) const;

    const SpatialIndex& spatial_index() const { return index_; }

private:
    std::vector<Lane> lanes_;
    std::map<std::string, std::size_t> by_id_;
    SuccessorMap successors_;
    SpatialIndex index_;
    std::set<std::string> no_successors_;
};

/// Evenly spaced centerline samples, endpoints included; consecutive samples
/// are at most `resolution` apart. Throws std::invalid_argument if
/// resolution <= 0.
std::vector<LanePoint> sample_lane(const Lane& lane, double resolution);

struct ClosestHit {
    std::string lane_id;
    LanePoint point;
    double distance = 0.0;
};

/// Closest centerline point over all lanes (analytic projection per lane);
/// distance ties broken by lowest lane id. Throws NotFoundError on an empty
/// network.
ClosestHit closest_lane_point(const RoadNetwork& network, Vec2 position);

/// +1 if `position` lies strictly left of the tangent line through
/// `lane_point` (in heading direction); -1 otherwise, including on the line.
int orientation(Vec2 position, const LanePoint& lane_point);

/// Orientation-signed distance from `position` to the named lane: positive
/// left of the lane, negative right. Throws NotFoundError for unknown ids.
double signed_distance(Vec2 position, const RoadNetwork& network, const std::string& lane_id);

/// Wrapped difference lane_heading - car_heading mapped into (-pi, pi] by
/// the three-branch rule: +2*pi if the raw difference is below -pi, -2*pi if
/// above +pi, unchanged otherwise. Inputs must already lie in (-pi, pi].
double lane_heading_difference(double lane_heading, double car_heading);

/// Heading-aware current-lane choice: among the (up to) 4 nearest candidate
/// lanes, minimizes |signed_distance| + 2.0 * |LHD|; a previous lane within
/// 0.1 of the best cost is retained.
std::string current_lane(const RoadNetwork& network, Vec2 position, double heading,
                         const std::optional<std::string>& previous_lane = std::nullopt);

/// Full geometric summary against one lane (composition of the above).
LaneRelation lane_relation(const RoadNetwork& network, Vec2 position, double heading,
                           const std::string& lane_id);

}  // namespace drlsim::roadnet
