#pragma once

#include <string>
#include <vector>

#include "drlsim/dynamics.hpp"
#include "drlsim/roadnet.hpp"

namespace drlsim::metrics {

/// The eight per-episode indicators.
struct EpisodeMetrics {
    double avg_speed = 0.0;       // m/s
    double peak_jerk = 0.0;       // dimensionless, max per-step |j_total|
    double total_jerk = 0.0;      // sum of per-step |j_total|
    double total_distance = 0.0;  // m
    double total_steering = 0.0;  // rad, sum of |delta_t|
    double runtime = 0.0;         // simulation steps
    double onlane_rate = 0.0;     // fraction of steps within half lane width
    bool collided = false;
};

struct AggregateReport {
    double avg_speed = 0.0;
    double peak_jerk = 0.0;
    double total_jerk = 0.0;
    double total_distance = 0.0;
    double total_steering = 0.0;
    double runtime = 0.0;
    double onlane_rate = 0.0;
    double collision_rate = 0.0;  // collisions / runs
    std::size_t runs = 0;
};

struct StepJerk {
    double accel = 0.0;  // (a_{t-1} - a_t) / (a_max - a_min)
    double steer = 0.0;  // (w_t - w_{t-1}) / (w_max - w_min)
    double total = 0.0;  // (accel + steer) / 2
};

/// Normalized per-step action change. Ranges are fixed by the action space:
/// acceleration 10 m/s^2, steering pi rad.
StepJerk step_jerk(const dynamics::Action& prev, const dynamics::Action& cur);

/// Per-episode accumulator. One logger per episode; record_step after each
/// simulation step, then finalize exactly once.
class EpisodeLogger {
public:
    explicit EpisodeLogger(double dt);

    void record_step(const dynamics::VehicleState& state, const dynamics::Action& action,
                     const roadnet::LaneRelation& relation, double dt);
    void record_step(const dynamics::VehicleState& state, const dynamics::Action& action,
                     const roadnet::LaneRelation& relation) {
        record_step(state, action, relation, dt_);
    }

    std::size_t steps() const { return steps_; }

    /// Closes the episode. Throws std::invalid_argument if no steps were
    /// recorded; throws ContractViolation if called twice.
    EpisodeMetrics finalize();

private:
    double dt_;
    std::size_t steps_ = 0;
    std::size_t onlane_steps_ = 0;
    double distance_ = 0.0;
    double steering_ = 0.0;
    double jerk_total_ = 0.0;
    double jerk_peak_ = 0.0;
    double elapsed_ = 0.0;
    bool collided_ = false;
    bool has_prev_action_ = false;
    dynamics::Action prev_action_;
    bool closed_ = false;
};

/// Arithmetic means over episodes; collision_rate = collided episodes / runs.
/// Throws std::invalid_argument on an empty list.
AggregateReport aggregate(const std::vector<EpisodeMetrics>& episodes);

enum class ReportFormat { csv, table };

/// Writes the aggregate report. CSV header is exactly
/// `speed,pk_jerk,tot_jerk,tot_distance,tot_steering,runtime,onlane_rate,col_rate`
/// with fixed-notation values. Throws std::invalid_argument for a report
/// with zero runs (no file is created).
void export_report(const AggregateReport& report, const std::string& path, ReportFormat format);

/// Single-report CSV row (used by the matrix export and tests).
std::string report_csv_line(const AggregateReport& report);

/// Per-episode CSV (one row per episode, `episode,...,collided` columns).
void export_episodes(const std::vector<EpisodeMetrics>& episodes, const std::string& path);

}  // namespace drlsim::metrics
