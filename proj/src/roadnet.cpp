#include "drlsim/roadnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "drlsim/errors.hpp"

namespace drlsim::roadnet {

using geom::kPi;
using geom::kTwoPi;
using geom::wrap_angle;
using geom::wrap_positive;

double CircularArc::span() const {
    const double raw = turn == TurnDirection::ccw ? end_angle - start_angle
                                                  : start_angle - end_angle;
    const double s = wrap_positive(raw);
    return s == 0.0 ? kTwoPi : s;
}

namespace {

double geometry_length(const LaneGeometry& g) {
    if (const auto* seg = std::get_if<StraightSegment>(&g))
        return geom::distance(seg->start, seg->end);
    const auto& arc = std::get<CircularArc>(g);
    return arc.radius * arc.span();
}

// Heading of travel at circle angle `ang`.
double arc_heading(const CircularArc& arc, double ang) {
    const double offset = arc.turn == TurnDirection::ccw ? kPi / 2.0 : -kPi / 2.0;
    return wrap_angle(ang + offset);
}

Vec2 arc_position(const CircularArc& arc, double ang) {
    return arc.center + arc.radius * geom::unit(ang);
}

// Circle angle after traveling arc length s from the start.
double arc_angle_at(const CircularArc& arc, double s) {
    const double dir = arc.turn == TurnDirection::ccw ? 1.0 : -1.0;
    return arc.start_angle + dir * (s / arc.radius);
}

}  // namespace

Lane::Lane(std::string id, LaneGeometry geometry, double width, double speed_limit)
    : id_(std::move(id)),
      geometry_(std::move(geometry)),
      width_(width),
      speed_limit_(speed_limit),
      length_(geometry_length(geometry_)) {
    if (width_ <= 0.0) throw std::invalid_argument("lane width must be > 0");
    if (speed_limit_ <= 0.0) throw std::invalid_argument("lane speed limit must be > 0");
    if (length_ <= 0.0) throw std::invalid_argument("lane '" + id_ + "' has zero length");
    if (const auto* arc = std::get_if<CircularArc>(&geometry_)) {
        if (arc->radius <= 0.0) throw std::invalid_argument("arc radius must be > 0");
    }
}

LanePoint Lane::point_at(double s) const {
    s = std::clamp(s, 0.0, length_);
    if (const auto* seg = std::get_if<StraightSegment>(&geometry_)) {
        const Vec2 d = seg->end - seg->start;
        const double heading = std::atan2(d.y, d.x);
        const double t = s / length_;
        return {seg->start + t * d, wrap_angle(heading), s};
    }
    const auto& arc = std::get<CircularArc>(geometry_);
    const double ang = arc_angle_at(arc, s);
    return {arc_position(arc, ang), arc_heading(arc, ang), s};
}

LanePoint Lane::end_point() const { return point_at(length_); }

LanePoint Lane::project(Vec2 p) const {
    if (const auto* seg = std::get_if<StraightSegment>(&geometry_)) {
        const Vec2 d = seg->end - seg->start;
        const double t = std::clamp((p - seg->start).dot(d) / d.squared_norm(), 0.0, 1.0);
        return point_at(t * length_);
    }
    const auto& arc = std::get<CircularArc>(geometry_);
    const Vec2 rel = p - arc.center;
    if (rel.squared_norm() < 1e-18) return point_at(0.0);  // center: degenerate, take start
    const double ang = std::atan2(rel.y, rel.x);
    const double offset = arc.turn == TurnDirection::ccw
                              ? wrap_positive(ang - arc.start_angle)
                              : wrap_positive(arc.start_angle - ang);
    if (offset <= arc.span()) return point_at(offset * arc.radius);
    // Off the swept sector: nearer endpoint wins.
    const LanePoint a = point_at(0.0), b = point_at(length_);
    return geom::distance(p, a.position) <= geom::distance(p, b.position) ? a : b;
}

void Lane::bounds(Vec2& lo, Vec2& hi) const {
    if (const auto* seg = std::get_if<StraightSegment>(&geometry_)) {
        lo = {std::min(seg->start.x, seg->end.x), std::min(seg->start.y, seg->end.y)};
        hi = {std::max(seg->start.x, seg->end.x), std::max(seg->start.y, seg->end.y)};
        return;
    }
    // Conservative arc bounds: the full circle box.
    const auto& arc = std::get<CircularArc>(geometry_);
    lo = {arc.center.x - arc.radius, arc.center.y - arc.radius};
    hi = {arc.center.x + arc.radius, arc.center.y + arc.radius};
}

std::vector<LanePoint> sample_lane(const Lane& lane, double resolution) {
    if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be > 0");
    const double len = lane.length();
    const auto segments = static_cast<std::size_t>(std::max(1.0, std::ceil(len / resolution)));
    std::vector<LanePoint> points;
    points.reserve(segments + 1);
    for (std::size_t i = 0; i < segments; ++i)
        points.push_back(lane.point_at(static_cast<double>(i) * len / static_cast<double>(segments)));
    points.push_back(lane.point_at(len));  // exact far endpoint
    return points;
}

SpatialIndex::SpatialIndex(const std::vector<Lane>& lanes, double cell_size) : cell_(cell_size) {
    if (lanes.empty()) return;
    Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    Vec2 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
    std::vector<std::pair<Vec2, Vec2>> boxes(lanes.size());
    for (std::size_t i = 0; i < lanes.size(); ++i) {
        lanes[i].bounds(boxes[i].first, boxes[i].second);
        lo.x = std::min(lo.x, boxes[i].first.x);
        lo.y = std::min(lo.y, boxes[i].first.y);
        hi.x = std::max(hi.x, boxes[i].second.x);
        hi.y = std::max(hi.y, boxes[i].second.y);
    }
    origin_ = lo;
    nx_ = static_cast<int>((hi.x - lo.x) / cell_) + 1;
    ny_ = static_cast<int>((hi.y - lo.y) / cell_) + 1;
    cells_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), {});
    for (std::size_t i = 0; i < lanes.size(); ++i) {
        const int x0 = static_cast<int>((boxes[i].first.x - origin_.x) / cell_);
        const int x1 = static_cast<int>((boxes[i].second.x - origin_.x) / cell_);
        const int y0 = static_cast<int>((boxes[i].first.y - origin_.y) / cell_);
        const int y1 = static_cast<int>((boxes[i].second.y - origin_.y) / cell_);
        for (int cx = x0; cx <= x1; ++cx)
            for (int cy = y0; cy <= y1; ++cy) cells_[cell_of(cx, cy)].push_back(i);
    }
}

std::size_t SpatialIndex::cell_of(int cx, int cy) const {
    cx = std::clamp(cx, 0, nx_ - 1);
    cy = std::clamp(cy, 0, ny_ - 1);
    return static_cast<std::size_t>(cy) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(cx);
}

const std::vector<std::size_t>& SpatialIndex::cell_candidates(Vec2 p) const {
    if (cells_.empty()) return empty_;
    const int cx = static_cast<int>((p.x - origin_.x) / cell_);
    const int cy = static_cast<int>((p.y - origin_.y) / cell_);
    return cells_[cell_of(cx, cy)];
}

std::vector<std::size_t> SpatialIndex::ring_candidates(Vec2 p, int ring) const {
    std::vector<std::size_t> out;
    if (cells_.empty()) return out;
    const int cx = static_cast<int>((p.x - origin_.x) / cell_);
    const int cy = static_cast<int>((p.y - origin_.y) / cell_);
    for (int dx = -ring; dx <= ring; ++dx) {
        for (int dy = -ring; dy <= ring; ++dy) {
            const int x = std::clamp(cx + dx, 0, nx_ - 1);
            const int y = std::clamp(cy + dy, 0, ny_ - 1);
            const auto& cell = cells_[cell_of(x, y)];
            out.insert(out.end(), cell.begin(), cell.end());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

RoadNetwork::RoadNetwork(std::vector<Lane> lanes, SuccessorMap successors)
    : lanes_(std::move(lanes)), successors_(std::move(successors)) {
    std::sort(lanes_.begin(), lanes_.end(),
              [](const Lane& a, const Lane& b) { return a.id() < b.id(); });
    for (std::size_t i = 0; i < lanes_.size(); ++i) {
        if (!by_id_.emplace(lanes_[i].id(), i).second)
            throw std::invalid_argument("duplicate lane id '" + lanes_[i].id() + "'");
    }
    constexpr double kJunctionTolerance = 0.5;  // G0 continuity bound, meters
    for (const auto& [from, tos] : successors_) {
        const Lane& a = lane(from);
        for (const auto& to : tos) {
            const Lane& b = lane(to);
            const double gap = geom::distance(a.end_point().position, b.start_point().position);
            if (gap > kJunctionTolerance)
                throw std::invalid_argument("successor pair " + from + " -> " + to +
                                            " is discontinuous (" + std::to_string(gap) + " m)");
        }
    }
    index_ = SpatialIndex(lanes_, 10.0);
}

const Lane& RoadNetwork::lane(const std::string& id) const {
    const auto it = by_id_.find(id);
    if (it == by_id_.end()) throw NotFoundError("unknown lane id '" + id + "'");
    return lanes_[it->second];
}

bool RoadNetwork::has_lane(const std::string& id) const { return by_id_.count(id) > 0; }

const std::set<std::string>& RoadNetwork::successors_of(const std::string& id) const {
    if (!has_lane(id)) throw NotFoundError("unknown lane id '" + id + "'");
    const auto it = successors_.find(id);
    return it == successors_.end() ? no_successors_ : it->second;
}

std::vector<std::string> RoadNetwork::nearest_lanes(Vec2 p, std::size_t k) const {
    if (lanes_.empty()) throw NotFoundError("road network has no lanes");
    std::vector<std::pair<double, std::size_t>> scored;
    const int max_ring = index_.rings_to_cover_all();
    for (int ring = 1;; ++ring) {
        const auto candidates = index_.ring_candidates(p, ring);
        scored.clear();
        scored.reserve(candidates.size());
        for (const std::size_t i : candidates)
            scored.emplace_back(geom::distance(p, lanes_[i].project(p).position), i);
        std::sort(scored.begin(), scored.end(), [this](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return lanes_[a.second].id() < lanes_[b.second].id();
        });
        const bool exhausted = ring >= max_ring || candidates.size() == lanes_.size();
        if (scored.size() >= k) {
            // The ring block is guaranteed to contain the disk of radius
            // ring*cell around p, so once the k-th candidate is inside that
            // disk no closer lane can be hiding outside.
            const double kth = scored[k - 1].first;
            if (kth <= static_cast<double>(ring) * index_.cell_size() || exhausted) break;
        } else if (exhausted) {
            break;
        }
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < std::min(k, scored.size()); ++i)
        out.push_back(lanes_[scored[i].second].id());
    return out;
}

ClosestHit closest_lane_point(const RoadNetwork& network, Vec2 position) {
    if (network.empty()) throw NotFoundError("road network has no lanes");
    ClosestHit best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const Lane& lane : network.lanes()) {  // lanes are id-sorted: ties keep the lowest id
        const LanePoint lp = lane.project(position);
        const double d = geom::distance(position, lp.position);
        if (d < best_dist) {
            best = {lane.id(), lp, d};
            best_dist = d;
        }
    }
    return best;
}

int orientation(Vec2 position, const LanePoint& lane_point) {
    const Vec2 tangent = geom::unit(lane_point.heading);
    return tangent.cross(position - lane_point.position) > 0.0 ? 1 : -1;
}

double signed_distance(Vec2 position, const RoadNetwork& network, const std::string& lane_id) {
    const Lane& lane = network.lane(lane_id);
    const LanePoint lp = lane.project(position);
    return orientation(position, lp) * geom::distance(position, lp.position);
}

double lane_heading_difference(double lane_heading, double car_heading) {
    const auto in_range = [](double a) { return a > -kPi && a <= kPi; };
    if (!in_range(lane_heading) || !in_range(car_heading))
        throw std::invalid_argument("headings must lie in (-pi, pi]");
    const double raw = lane_heading - car_heading;
    if (raw < -kPi) return raw + kTwoPi;
    if (raw > kPi) return raw - kTwoPi;
    return raw;
}

namespace {

// current_lane cost; beta converts heading error to meters.
constexpr double kHeadingWeight = 2.0;    // m/rad
constexpr double kHysteresisMargin = 0.1;
constexpr std::size_t kCandidateCount = 4;

double lane_cost(const Lane& lane, Vec2 position, double heading) {
    const LanePoint lp = lane.project(position);
    const double dist = geom::distance(position, lp.position);
    const double lhd = lane_heading_difference(lp.heading, heading);
    return dist + kHeadingWeight * std::abs(lhd);
}

}  // namespace

std::string current_lane(const RoadNetwork& network, Vec2 position, double heading,
                         const std::optional<std::string>& previous_lane) {
    const std::vector<std::string> candidates = network.nearest_lanes(position, kCandidateCount);
    std::string best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (const auto& id : candidates) {
        const double cost = lane_cost(network.lane(id), position, heading);
        if (cost < best_cost) {  // candidates arrive distance-then-id sorted: ties keep the first
            best = id;
            best_cost = cost;
        }
    }
    if (previous_lane &&
        std::find(candidates.begin(), candidates.end(), *previous_lane) != candidates.end()) {
        const double prev_cost = lane_cost(network.lane(*previous_lane), position, heading);
        if (prev_cost <= best_cost + kHysteresisMargin) return *previous_lane;
    }
    return best;
}

LaneRelation lane_relation(const RoadNetwork& network, Vec2 position, double heading,
                           const std::string& lane_id) {
    const Lane& lane = network.lane(lane_id);
    const LanePoint lp = lane.project(position);
    const double dist = geom::distance(position, lp.position);
    LaneRelation rel;
    rel.lane_id = lane_id;
    rel.closest_point = lp;
    rel.signed_distance = orientation(position, lp) * dist;
    rel.lhd = lane_heading_difference(lp.heading, heading);
    rel.onlane = dist <= lane.width() / 2.0;
    return rel;
}

}  // namespace drlsim::roadnet
