#include <cmath>
#include <limits>
#include <stdexcept>

#include "drlsim/dynamics.hpp"

namespace drlsim::dynamics {

namespace {

// IDM free-road exponent.
constexpr double kIdmExponent = 4.0;

// Point `dist` meters ahead along the route centerline, crossing lane
// boundaries as needed; clamps at the end of the final route lane.
roadnet::LanePoint route_point_ahead(const roadnet::RoadNetwork& network,
                                     const std::vector<std::string>& route,
                                     std::size_t route_index, double s, double dist) {
    std::size_t idx = route_index;
    double target = s + dist;
    while (true) {
        const roadnet::Lane& lane = network.lane(route[idx]);
        if (target <= lane.length() || idx + 1 >= route.size()) {
            return lane.point_at(target);
        }
        target -= lane.length();
        ++idx;
    }
}

}  // namespace

TrafficStepResult traffic_step(const TrafficVehicle& vehicle,
                               const roadnet::RoadNetwork& network,
                               std::span<const VehicleState> others, double dt) {
    if (vehicle.route.empty()) throw std::invalid_argument("traffic vehicle has empty route");
    TrafficVehicle next = vehicle;
    const roadnet::Lane& lane = network.lane(next.current_lane());
    const roadnet::LanePoint my_point = lane.project(next.state.position);
    const double my_s = my_point.arc_length;
    const TrafficParams& p = next.params;

    // Nearest leader on the same lane: any vehicle projecting onto this lane
    // within its width, ahead of us along the centerline.
    double gap = std::numeric_limits<double>::infinity();
    double leader_speed = 0.0;
    for (const VehicleState& other : others) {
        const roadnet::LanePoint op = lane.project(other.position);
        if (geom::distance(other.position, op.position) > lane.width()) continue;
        const double ds = op.arc_length - my_s;
        if (ds <= 0.0) continue;
        const double bumper_gap = ds - (next.state.length + other.length) / 2.0;
        if (bumper_gap < gap) {
            gap = bumper_gap;
            leader_speed = other.speed;
        }
    }

    // IDM longitudinal law.
    const double v = std::max(0.0, next.state.speed);
    double accel = p.max_accel * (1.0 - std::pow(v / p.target_speed, kIdmExponent));
    if (std::isfinite(gap)) {
        const double approach = v - leader_speed;
        const double desired_gap =
            p.min_gap + std::max(0.0, v * p.time_headway +
                                          v * approach /
                                              (2.0 * std::sqrt(p.max_accel * p.comfort_decel)));
        const double safe_gap = std::max(gap, 0.1);
        accel -= p.max_accel * (desired_gap / safe_gap) * (desired_gap / safe_gap);
    }

    // Pure pursuit toward the route centerline.
    const roadnet::LanePoint target =
        route_point_ahead(network, next.route, next.route_index, my_s, p.lookahead);
    const Vec2 to_target = target.position - next.state.position;
    const double target_dist = std::max(to_target.norm(), 1e-9);
    const double angle_error =
        geom::wrap_angle(std::atan2(to_target.y, to_target.x) - next.state.heading);
    const double steering = std::atan(2.0 * next.state.length * std::sin(angle_error) / target_dist);

    next.state = bicycle_step(next.state, Action(steering, accel), dt);
    if (next.state.speed < 0.0) next.state.speed = 0.0;  // scripted traffic never reverses

    // Advance the route near the lane end.
    const double remaining = lane.length() - lane.project(next.state.position).arc_length;
    bool despawned = false;
    if (remaining < 2.0) {
        if (next.route_index + 1 < next.route.size()) {
            ++next.route_index;
        } else {
            despawned = true;
        }
    }
    return {std::move(next), despawned};
}

}  // namespace drlsim::dynamics
