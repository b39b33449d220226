#include <algorithm>
#include <cmath>
#include <limits>

#include "drlsim/envs.hpp"
#include "drlsim/errors.hpp"

namespace drlsim::envs {

using dynamics::Action;
using dynamics::TrafficVehicle;
using dynamics::VehicleState;
using geom::Vec2;

EnvConfig EnvConfig::defaults_for(const std::string& scenario) {
    EnvConfig c;
    c.scenario = scenario;
    if (scenario == "straightlane") {
        c.max_steps = 300;
        c.traffic_count = 0;
    } else if (scenario == "intersection") {
        c.max_steps = 200;
        c.traffic_count = 3;
    } else if (scenario == "merge") {
        c.max_steps = 400;
        c.traffic_count = 3;
        c.spawn = SpawnMode::fixed;
    } else if (scenario == "roundabout") {
        c.max_steps = 600;
        c.traffic_count = 3;
    } else if (scenario == "racetrack") {
        c.max_steps = 600;
        c.traffic_count = 3;
    } else if (scenario == "complexroads") {
        c.max_steps = 1000;
        c.traffic_count = 4;
    } else {
        throw NotFoundError("unknown scenario '" + scenario + "'");
    }
    return c;
}

EnvConfig EnvConfig::from_json(const nlohmann::json& doc) {
    EnvConfig c = defaults_for(doc.value("scenario", std::string("straightlane")));
    c.seed = doc.value("seed", c.seed);
    c.max_steps = doc.value("max_steps", c.max_steps);
    c.min_speed = doc.value("min_speed", c.min_speed);
    c.min_speed_patience = doc.value("min_speed_patience", c.min_speed_patience);
    c.traffic_count = doc.value("traffic_count", c.traffic_count);
    c.dt = doc.value("dt", c.dt);
    c.spawn_speed = doc.value("spawn_speed", c.spawn_speed);
    if (doc.contains("reward_kind")) {
        const std::string kind = doc.at("reward_kind").get<std::string>();
        if (kind == "baseline")
            c.reward_kind = RewardKind::baseline;
        else if (kind == "modified")
            c.reward_kind = RewardKind::modified;
        else
            throw std::invalid_argument("unknown reward_kind '" + kind + "'");
    }
    if (doc.contains("spawn")) {
        const std::string mode = doc.at("spawn").get<std::string>();
        if (mode == "fixed")
            c.spawn = SpawnMode::fixed;
        else if (mode == "randomized")
            c.spawn = SpawnMode::randomized;
        else
            throw std::invalid_argument("unknown spawn mode '" + mode + "'");
    }
    if (doc.contains("action")) {
        const auto& a = doc.at("action");
        const std::string kind = a.value("kind", std::string("continuous"));
        if (kind == "grid") {
            c.action.kind = ActionKind::grid;
            c.action.steering_levels = a.value("steering_levels", c.action.steering_levels);
            c.action.accel_levels = a.value("accel_levels", c.action.accel_levels);
            c.action.steering_span = a.value("steering_span", c.action.steering_span);
            c.action.accel_span = a.value("accel_span", c.action.accel_span);
        } else if (kind == "continuous") {
            c.action.kind = ActionKind::continuous;
        } else {
            throw std::invalid_argument("unknown action kind '" + kind + "'");
        }
    }
    if (c.max_steps == 0) throw std::invalid_argument("max_steps must be > 0");
    return c;
}

nlohmann::json EnvConfig::to_json() const {
    nlohmann::json doc{
        {"scenario", scenario},
        {"seed", seed},
        {"max_steps", max_steps},
        {"min_speed", min_speed},
        {"min_speed_patience", min_speed_patience},
        {"traffic_count", traffic_count},
        {"dt", dt},
        {"spawn_speed", spawn_speed},
        {"reward_kind", reward_kind == RewardKind::baseline ? "baseline" : "modified"},
        {"spawn", spawn == SpawnMode::fixed ? "fixed" : "randomized"},
    };
    if (action.kind == ActionKind::grid) {
        doc["action"] = {{"kind", "grid"},
                         {"steering_levels", action.steering_levels},
                         {"accel_levels", action.accel_levels},
                         {"steering_span", action.steering_span},
                         {"accel_span", action.accel_span}};
    } else {
        doc["action"] = {{"kind", "continuous"}};
    }
    return doc;
}

double modified_reward(const VehicleState& vehicle, const roadnet::LaneRelation& relation) {
    if (vehicle.crashed) return -10.0;
    if (vehicle.speed < 0.0) return 0.0;
    return std::cos(std::abs(relation.lhd)) * vehicle.speed /
           (20.0 * std::max(1.0, std::abs(relation.signed_distance)));
}

double baseline_reward(const VehicleState& vehicle, const roadnet::LaneRelation& relation) {
    if (vehicle.crashed) return -1.0;
    if (!relation.onlane) return 0.0;
    constexpr double v_lo = 20.0, v_hi = 30.0;
    return std::clamp((vehicle.speed - v_lo) / (v_hi - v_lo), 0.0, 1.0);
}

Environment::Environment(EnvConfig config, const std::optional<std::string>& fixtures_dir)
    : Environment(config, build_scenario(config.scenario, fixtures_dir)) {}

Environment::Environment(EnvConfig config, Scenario scenario)
    : config_(std::move(config)), scenario_(std::move(scenario)), rng_(config_.seed) {
    if (config_.max_steps == 0) throw std::invalid_argument("max_steps must be > 0");
    if (scenario_.info.spawnable_lanes.empty())
        throw std::invalid_argument("scenario has no spawnable lanes");
}

Observation Environment::reset(std::uint64_t seed) {
    rng_ = Rng(seed);
    step_count_ = 0;
    low_speed_streak_ = 0;
    terminated_ = false;
    truncated_ = false;
    live_ = true;

    const auto& spawnable = scenario_.info.spawnable_lanes;
    std::string spawn_lane;
    double spawn_s = 0.0;
    if (config_.spawn == SpawnMode::fixed) {
        spawn_lane = scenario_.info.fixed_spawn_lane;
    } else {
        spawn_lane = spawnable[rng_.uniform_index(spawnable.size())];
        spawn_s = rng_.uniform(0.0, network().lane(spawn_lane).length());
    }
    const roadnet::LanePoint sp = network().lane(spawn_lane).point_at(spawn_s);
    ego_ = VehicleState{};
    ego_.position = sp.position;
    ego_.heading = sp.heading;
    ego_.speed = config_.spawn_speed;
    current_lane_ = spawn_lane;
    spawn_traffic();
    refresh_relation();
    return observe();
}

std::vector<std::string> Environment::make_route(const std::string& start_lane) {
    std::vector<std::string> route{start_lane};
    for (int hop = 0; hop < 40; ++hop) {
        const auto& next = network().successors_of(route.back());
        if (next.empty()) break;
        auto it = next.begin();
        std::advance(it, rng_.uniform_index(next.size()));
        route.push_back(*it);
    }
    return route;
}

void Environment::spawn_traffic() {
    traffic_.clear();
    if (config_.traffic_count == 0) return;
    const auto& lanes = network().lanes();
    if (config_.traffic_count >= lanes.size())
        throw CapacityError("cannot place " + std::to_string(config_.traffic_count) +
                            " traffic vehicles on " + std::to_string(lanes.size()) + " lanes");
    constexpr double kSpawnGap = 10.0;  // m between any two spawned vehicles
    std::vector<bool> used(lanes.size(), false);
    for (std::size_t v = 0; v < config_.traffic_count; ++v) {
        bool placed = false;
        for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
            const std::size_t li = rng_.uniform_index(lanes.size());
            if (used[li] || lanes[li].id() == current_lane_) continue;
            const double s = rng_.uniform(0.0, lanes[li].length());
            const roadnet::LanePoint lp = lanes[li].point_at(s);
            if (geom::distance(lp.position, ego_.position) < kSpawnGap) continue;
            bool clear = true;
            for (const TrafficVehicle& other : traffic_) {
                if (geom::distance(lp.position, other.state.position) < kSpawnGap) {
                    clear = false;
                    break;
                }
            }
            if (!clear) continue;
            TrafficVehicle veh;
            veh.state.position = lp.position;
            veh.state.heading = lp.heading;
            veh.state.speed = rng_.uniform(0.4, 0.8) * lanes[li].speed_limit();
            veh.route = make_route(lanes[li].id());
            veh.params.target_speed = lanes[li].speed_limit();
            traffic_.push_back(std::move(veh));
            used[li] = true;
            placed = true;
        }
        if (!placed)
            throw CapacityError("unable to place traffic vehicle " + std::to_string(v) +
                                " with " + std::to_string(kSpawnGap) + " m gaps");
    }
}

void Environment::respawn(TrafficVehicle& vehicle) {
    // Deterministic: the lane whose midpoint is farthest from every vehicle.
    const auto& lanes = network().lanes();
    double best_clearance = -1.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < lanes.size(); ++i) {
        const Vec2 mid = lanes[i].point_at(lanes[i].length() / 2.0).position;
        double clearance = geom::distance(mid, ego_.position);
        for (const TrafficVehicle& other : traffic_)
            clearance = std::min(clearance, geom::distance(mid, other.state.position));
        if (clearance > best_clearance) {
            best_clearance = clearance;
            best = i;
        }
    }
    const roadnet::LanePoint lp = lanes[best].point_at(lanes[best].length() / 2.0);
    vehicle.state.position = lp.position;
    vehicle.state.heading = lp.heading;
    vehicle.state.speed = 0.6 * lanes[best].speed_limit();
    vehicle.route = make_route(lanes[best].id());
    vehicle.route_index = 0;
    vehicle.params.target_speed = lanes[best].speed_limit();
}

void Environment::refresh_relation() {
    current_lane_ = roadnet::current_lane(network(), ego_.position, ego_.heading,
                                          current_lane_.empty()
                                              ? std::nullopt
                                              : std::make_optional(current_lane_));
    relation_ = roadnet::lane_relation(network(), ego_.position, ego_.heading, current_lane_);
}

StepResult Environment::step(const Action& action) {
    if (!live_) throw ContractViolation("step before reset");
    if (finished()) throw ContractViolation("step on a finished episode");

    ego_ = [&] {
        const bool crashed = ego_.crashed;
        VehicleState next = dynamics::bicycle_step(ego_, action, config_.dt);
        next.crashed = crashed;
        return next;
    }();

    // Traffic moves sequentially in spawn order; each vehicle sees the
    // current positions of everyone else.
    for (std::size_t i = 0; i < traffic_.size(); ++i) {
        std::vector<VehicleState> others;
        others.reserve(traffic_.size());
        others.push_back(ego_);
        for (std::size_t j = 0; j < traffic_.size(); ++j)
            if (j != i) others.push_back(traffic_[j].state);
        auto result = dynamics::traffic_step(traffic_[i], network(), others, config_.dt);
        traffic_[i] = std::move(result.vehicle);
        if (result.despawned) respawn(traffic_[i]);
    }

    for (const TrafficVehicle& veh : traffic_) {
        if (dynamics::collision_check(ego_, veh.state)) {
            ego_.crashed = true;
            break;
        }
    }

    refresh_relation();
    const double reward = config_.reward_kind == RewardKind::modified
                              ? modified_reward(ego_, relation_)
                              : baseline_reward(ego_, relation_);

    ++step_count_;
    if (ego_.speed < config_.min_speed)
        ++low_speed_streak_;
    else
        low_speed_streak_ = 0;
    terminated_ = ego_.crashed || low_speed_streak_ >= config_.min_speed_patience;
    truncated_ = step_count_ >= config_.max_steps;

    StepResult result;
    result.observation = observe();
    result.reward = reward;
    result.terminated = terminated_;
    result.truncated = truncated_;
    result.lane_relation = relation_;
    result.speed = ego_.speed;
    result.action_applied = action;
    return result;
}

Observation Environment::observe() const {
    Observation obs(kObservationDim, 0.0);
    const auto clamp1 = [](double v) { return std::clamp(v, -1.0, 1.0); };
    obs[0] = clamp1(ego_.speed / dynamics::kSpeedMax);
    obs[1] = std::sin(ego_.heading);
    obs[2] = std::cos(ego_.heading);
    obs[3] = clamp1(relation_.signed_distance / 10.0);
    obs[4] = clamp1(relation_.lhd / geom::kPi);

    // K nearest traffic vehicles, ties broken by spawn order.
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(traffic_.size());
    for (std::size_t i = 0; i < traffic_.size(); ++i)
        order.emplace_back(geom::distance(traffic_[i].state.position, ego_.position), i);
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    const Vec2 ego_vel = ego_.velocity();
    for (std::size_t n = 0; n < std::min<std::size_t>(kNeighborCount, order.size()); ++n) {
        const VehicleState& other = traffic_[order[n].second].state;
        const Vec2 dp = geom::rotate(other.position - ego_.position, -ego_.heading);
        const Vec2 dv = geom::rotate(other.velocity() - ego_vel, -ego_.heading);
        const std::size_t base = 5 + 5 * n;
        obs[base + 0] = 1.0;
        obs[base + 1] = clamp1(dp.x / 100.0);
        obs[base + 2] = clamp1(dp.y / 100.0);
        obs[base + 3] = clamp1(dv.x / dynamics::kSpeedMax);
        obs[base + 4] = clamp1(dv.y / dynamics::kSpeedMax);
    }
    return obs;
}

}  // namespace drlsim::envs
