#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "drlsim/dynamics.hpp"
#include "drlsim/roadnet.hpp"
#include "drlsim/rng.hpp"

namespace drlsim::envs {

inline constexpr double kDt = 1.0 / 15.0;         // control = simulation frequency
inline constexpr std::size_t kNeighborCount = 4;  // K nearest traffic vehicles observed
inline constexpr std::size_t kObservationDim = 5 + 5 * kNeighborCount;

/// Fixed-length feature vector:
///   [v/40, sin(heading), cos(heading), d/10, LHD/pi]
/// followed by kNeighborCount blocks of
///   [present, dx/100, dy/100, dvx/40, dvy/40]
/// in ego-frame coordinates, nearest first; absent neighbors are all-zero.
/// Every component is clamped into [-1, 1].
using Observation = std::vector<double>;

enum class RewardKind { baseline, modified };
enum class SpawnMode { fixed, randomized };
enum class ActionKind { continuous, grid };

struct ActionSpec {
    ActionKind kind = ActionKind::continuous;
    std::size_t steering_levels = 5;
    std::size_t accel_levels = 5;
    double steering_span = 0.5;                  // grid endpoints, rad
    double accel_span = dynamics::kAccelBound;   // grid endpoints, m/s^2

    dynamics::ActionGrid grid() const {
        return dynamics::ActionGrid::uniform(steering_levels, accel_levels, steering_span,
                                             accel_span);
    }
};

struct EnvConfig {
    std::string scenario = "straightlane";
    std::uint64_t seed = 0;
    std::size_t max_steps = 300;
    double min_speed = 1.0;            // m/s
    std::size_t min_speed_patience = 50;  // consecutive steps below min_speed
    std::size_t traffic_count = 0;
    RewardKind reward_kind = RewardKind::modified;
    ActionSpec action;
    SpawnMode spawn = SpawnMode::randomized;
    double dt = kDt;
    double spawn_speed = 10.0;  // m/s, ego speed at reset

    /// Scenario defaults (max_steps, traffic_count, spawn mode).
    static EnvConfig defaults_for(const std::string& scenario);
    static EnvConfig from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
};

/// Structural inventory recorded by the scenario builders.
struct ScenarioInfo {
    std::string name;
    std::vector<std::string> spawnable_lanes;  // sorted lane ids
    std::string fixed_spawn_lane;
    std::size_t merge_junctions = 0;
    std::size_t four_way_intersections = 0;
    std::size_t roundabouts = 0;
    std::size_t straight_connectors = 0;       // two-way multi-lane straights
    std::vector<std::string> merge_lane_ids;   // lanes that receive >= 2 predecessors
};

struct Scenario {
    std::shared_ptr<const roadnet::RoadNetwork> network;
    ScenarioInfo info;
};

/// Builds one of {straightlane, roundabout, intersection, merge, racetrack,
/// complexroads}; throws NotFoundError for unknown names. When the
/// DRLC_FIXTURES environment variable (or `fixtures_dir`) names a directory
/// containing `<name>.json`, the layout is loaded from that fixture instead.
Scenario build_scenario(const std::string& name,
                        const std::optional<std::string>& fixtures_dir = std::nullopt);

const std::vector<std::string>& scenario_names();
bool scenario_has_baseline_reward(const std::string& name);

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc);

/// Eq.-style modified reward: -10 when crashed; 0 for reverse driving; else
/// cos(|LHD|) * v / (20 * max(1, |d|)).
double modified_reward(const dynamics::VehicleState& vehicle,
                       const roadnet::LaneRelation& relation);

/// Approximation of the stock simulator reward this artifact is compared
/// against: -1 when crashed, else onlane-gated speed ramp from 20 to 30 m/s.
double baseline_reward(const dynamics::VehicleState& vehicle,
                       const roadnet::LaneRelation& relation);

struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool terminated = false;  // crash or immobility
    bool truncated = false;   // time limit
    // info
    roadnet::LaneRelation lane_relation;
    double speed = 0.0;
    dynamics::Action action_applied;
};

/// Episodic MDP over the simulator. Single-threaded; run one instance per
/// worker with distinct seeds.
class Environment {
public:
    explicit Environment(EnvConfig config,
                         const std::optional<std::string>& fixtures_dir = std::nullopt);
    Environment(EnvConfig config, Scenario scenario);

    /// Deterministic function of the seed. Throws CapacityError when the
    /// requested traffic cannot be placed.
    Observation reset() { return reset(config_.seed); }
    Observation reset(std::uint64_t seed);

    /// Throws ContractViolation when the episode is already finished.
    StepResult step(const dynamics::Action& action);

    Observation observe() const;

    bool finished() const { return terminated_ || truncated_; }
    bool terminated() const { return terminated_; }
    bool truncated() const { return truncated_; }
    std::size_t step_count() const { return step_count_; }

    const dynamics::VehicleState& ego() const { return ego_; }
    const roadnet::LaneRelation& relation() const { return relation_; }
    const std::string& current_lane_id() const { return current_lane_; }
    const std::vector<dynamics::TrafficVehicle>& traffic() const { return traffic_; }
    const roadnet::RoadNetwork& network() const { return *scenario_.network; }
    const ScenarioInfo& scenario_info() const { return scenario_.info; }
    const EnvConfig& config() const { return config_; }

private:
    void spawn_traffic();
    std::vector<std::string> make_route(const std::string& start_lane);
    void respawn(dynamics::TrafficVehicle& vehicle);
    void refresh_relation();

    EnvConfig config_;
    Scenario scenario_;
    Rng rng_;
    dynamics::VehicleState ego_;
    std::vector<dynamics::TrafficVehicle> traffic_;
    std::string current_lane_;
    roadnet::LaneRelation relation_;
    std::size_t step_count_ = 0;
    std::size_t low_speed_streak_ = 0;
    bool terminated_ = false;
    bool truncated_ = false;
    bool live_ = false;
};

}  // namespace drlsim::envs
