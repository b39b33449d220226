#pragma once

#include <span>
#include <string>
#include <vector>

#include "drlsim/geom.hpp"
#include "drlsim/roadnet.hpp"

namespace drlsim::dynamics {

using geom::Vec2;

inline constexpr double kSteeringBound = geom::kPi / 2.0;  // rad
inline constexpr double kAccelBound = 5.0;                 // m/s^2
inline constexpr double kSpeedMin = -5.0;                  // m/s
inline constexpr double kSpeedMax = 40.0;                  // m/s

struct VehicleState {
    Vec2 position;
    double heading = 0.0;  // normalized to (-pi, pi]
    double speed = 0.0;    // m/s, may be negative
    bool crashed = false;  // latched; never reverts within an episode
    double length = 5.0;   // m
    double width = 2.0;    // m

    Vec2 velocity() const { return speed * geom::unit(heading); }
};

/// Control pair (front-wheel steering angle, acceleration). Components are
/// clamped into [-pi/2, pi/2] x [-5, 5] on construction.
struct Action {
    double steering = 0.0;
    double accel = 0.0;

    Action() = default;
    Action(double steering_rad, double accel_ms2);
};

/// Discrete steering x acceleration grid. Index layout is row-major over
/// steering levels, then acceleration levels.
class ActionGrid {
public:
    ActionGrid(std::vector<double> steering_levels, std::vector<double> accel_levels);

    static ActionGrid uniform(std::size_t n_steering, std::size_t m_accel,
                              double steering_span, double accel_span);

    std::size_t size() const { return steering_levels_.size() * accel_levels_.size(); }
    const std::vector<double>& steering_levels() const { return steering_levels_; }
    const std::vector<double>& accel_levels() const { return accel_levels_; }

    /// Action at grid index; throws std::invalid_argument out of range.
    Action discretize(std::size_t index) const;

    /// Index of the grid action nearest to `action` (per-axis nearest level).
    std::size_t nearest_index(const Action& action) const;

private:
    std::vector<double> steering_levels_;
    std::vector<double> accel_levels_;
};

/// One explicit-Euler step of the rear-axle kinematic bicycle with slip angle
/// beta = atan(0.5 tan delta). Speed is clamped to [-5, 40] m/s and heading
/// renormalized. Throws std::invalid_argument for dt <= 0.
VehicleState bicycle_step(const VehicleState& state, const Action& action, double dt);

/// Oriented-rectangle overlap via the separating-axis theorem; touching
/// edges count as overlap.
bool collision_check(const VehicleState& a, const VehicleState& b);

struct TrafficParams {
    double target_speed = 15.0;    // m/s; set from lane speed limit at spawn
    double time_headway = 1.5;     // s
    double min_gap = 2.0;          // m, bumper to bumper
    double lookahead = 5.0;        // m, pure-pursuit target distance
    double max_accel = 3.0;        // m/s^2, IDM comfortable acceleration
    double comfort_decel = 5.0;    // m/s^2, IDM braking term
};

struct TrafficVehicle {
    VehicleState state;
    std::vector<std::string> route;  // lane ids, in travel order
    std::size_t route_index = 0;
    TrafficParams params;

    const std::string& current_lane() const { return route[route_index]; }
};

struct TrafficStepResult {
    TrafficVehicle vehicle;
    bool despawned = false;  // route exhausted
};

/// Scripted traffic step: IDM longitudinal control against the nearest
/// leader on the same lane, pure-pursuit steering toward a point 5 m ahead
/// on the route centerline, lane advance within 2 m of the lane end.
/// Throws std::invalid_argument if the route is empty.
TrafficStepResult traffic_step(const TrafficVehicle& vehicle,
                               const roadnet::RoadNetwork& network,
                               std::span<const VehicleState> others, double dt);

}  // namespace drlsim::dynamics
