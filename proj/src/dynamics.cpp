#include "drlsim/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace drlsim::dynamics {

Action::Action(double steering_rad, double accel_ms2)
    : steering(std::clamp(steering_rad, -kSteeringBound, kSteeringBound)),
      accel(std::clamp(accel_ms2, -kAccelBound, kAccelBound)) {}

namespace {

void validate_levels(const std::vector<double>& levels, double bound, const char* what) {
    if (levels.empty()) throw std::invalid_argument(std::string(what) + " levels empty");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (std::abs(levels[i]) > bound + 1e-12)
            throw std::invalid_argument(std::string(what) + " level outside action bounds");
        if (i > 0 && levels[i] <= levels[i - 1])
            throw std::invalid_argument(std::string(what) + " levels must be strictly increasing");
    }
}

std::size_t nearest_level(const std::vector<double>& levels, double value) {
    const auto it = std::lower_bound(levels.begin(), levels.end(), value);
    if (it == levels.begin()) return 0;
    if (it == levels.end()) return levels.size() - 1;
    const std::size_t hi = static_cast<std::size_t>(it - levels.begin());
    const std::size_t lo = hi - 1;
    return (value - levels[lo]) <= (levels[hi] - value) ? lo : hi;
}

}  // namespace

ActionGrid::ActionGrid(std::vector<double> steering_levels, std::vector<double> accel_levels)
    : steering_levels_(std::move(steering_levels)), accel_levels_(std::move(accel_levels)) {
    validate_levels(steering_levels_, kSteeringBound, "steering");
    validate_levels(accel_levels_, kAccelBound, "acceleration");
}

ActionGrid ActionGrid::uniform(std::size_t n_steering, std::size_t m_accel,
                               double steering_span, double accel_span) {
    if (n_steering < 1 || m_accel < 1)
        throw std::invalid_argument("action grid needs at least one level per axis");
    const auto linspace = [](std::size_t n, double span) {
        std::vector<double> levels(n);
        for (std::size_t i = 0; i < n; ++i)
            levels[i] = n == 1 ? 0.0 : -span + 2.0 * span * static_cast<double>(i) /
                                                  static_cast<double>(n - 1);
        return levels;
    };
    return ActionGrid(linspace(n_steering, steering_span), linspace(m_accel, accel_span));
}

Action ActionGrid::discretize(std::size_t index) const {
    if (index >= size()) throw std::invalid_argument("action index out of range");
    const std::size_t m = accel_levels_.size();
    return Action(steering_levels_[index / m], accel_levels_[index % m]);
}

std::size_t ActionGrid::nearest_index(const Action& action) const {
    const std::size_t i = nearest_level(steering_levels_, action.steering);
    const std::size_t j = nearest_level(accel_levels_, action.accel);
    return i * accel_levels_.size() + j;
}

VehicleState bicycle_step(const VehicleState& state, const Action& action, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    const double beta = std::atan(0.5 * std::tan(action.steering));
    const double rear_half = state.length / 2.0;
    VehicleState next = state;
    next.position.x += state.speed * std::cos(state.heading + beta) * dt;
    next.position.y += state.speed * std::sin(state.heading + beta) * dt;
    next.heading = geom::wrap_angle(state.heading + (state.speed / rear_half) * std::sin(beta) * dt);
    next.speed = std::clamp(state.speed + action.accel * dt, kSpeedMin, kSpeedMax);
    return next;
}

namespace {

std::array<Vec2, 4> rectangle_corners(const VehicleState& s) {
    const Vec2 fwd = geom::unit(s.heading) * (s.length / 2.0);
    const Vec2 left = geom::rotate(geom::unit(s.heading), geom::kPi / 2.0) * (s.width / 2.0);
    return {s.position + fwd + left, s.position + fwd - left,
            s.position - fwd - left, s.position - fwd + left};
}

bool separated_on_axis(Vec2 axis, const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
    double min_a = axis.dot(a[0]), max_a = min_a;
    double min_b = axis.dot(b[0]), max_b = min_b;
    for (int i = 1; i < 4; ++i) {
        const double pa = axis.dot(a[i]), pb = axis.dot(b[i]);
        min_a = std::min(min_a, pa);
        max_a = std::max(max_a, pa);
        min_b = std::min(min_b, pb);
        max_b = std::max(max_b, pb);
    }
    return max_a < min_b || max_b < min_a;  // strict: touching is not separation
}

}  // namespace

bool collision_check(const VehicleState& a, const VehicleState& b) {
    const auto ca = rectangle_corners(a);
    const auto cb = rectangle_corners(b);
    const std::array<Vec2, 4> axes = {geom::unit(a.heading),
                                      geom::rotate(geom::unit(a.heading), geom::kPi / 2.0),
                                      geom::unit(b.heading),
                                      geom::rotate(geom::unit(b.heading), geom::kPi / 2.0)};
    for (const Vec2& axis : axes) {
        if (separated_on_axis(axis, ca, cb)) return false;
    }
    return true;
}

}  // namespace drlsim::dynamics
