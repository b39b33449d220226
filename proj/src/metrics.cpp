#include "drlsim/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "drlsim/errors.hpp"

namespace drlsim::metrics {

StepJerk step_jerk(const dynamics::Action& prev, const dynamics::Action& cur) {
    constexpr double kAccelRange = 2.0 * dynamics::kAccelBound;     // 10
    constexpr double kSteerRange = 2.0 * dynamics::kSteeringBound;  // pi
    StepJerk j;
    j.accel = (prev.accel - cur.accel) / kAccelRange;
    j.steer = (cur.steering - prev.steering) / kSteerRange;
    j.total = (j.accel + j.steer) / 2.0;
    return j;
}

EpisodeLogger::EpisodeLogger(double dt) : dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
}

void EpisodeLogger::record_step(const dynamics::VehicleState& state,
                                const dynamics::Action& action,
                                const roadnet::LaneRelation& relation, double dt) {
    if (closed_) throw ContractViolation("record_step on a finalized episode");
    if (!has_prev_action_) {
        prev_action_ = action;  // first step: prev = cur, zero jerk
        has_prev_action_ = true;
    }
    const StepJerk jerk = step_jerk(prev_action_, action);
    const double magnitude = std::abs(jerk.total);
    jerk_total_ += magnitude;
    jerk_peak_ = std::max(jerk_peak_, magnitude);
    prev_action_ = action;

    distance_ += std::abs(state.speed) * dt;
    steering_ += std::abs(action.steering);
    if (relation.onlane) ++onlane_steps_;
    if (state.crashed) collided_ = true;
    elapsed_ += dt;
    ++steps_;
}

EpisodeMetrics EpisodeLogger::finalize() {
    if (closed_) throw ContractViolation("finalize called twice");
    if (steps_ == 0) throw std::invalid_argument("cannot finalize an episode with no steps");
    closed_ = true;
    EpisodeMetrics m;
    m.total_distance = distance_;
    m.total_steering = steering_;
    m.total_jerk = jerk_total_;
    m.peak_jerk = jerk_peak_;
    m.runtime = static_cast<double>(steps_);
    m.onlane_rate = static_cast<double>(onlane_steps_) / static_cast<double>(steps_);
    m.avg_speed = distance_ / elapsed_;
    m.collided = collided_;
    return m;
}

AggregateReport aggregate(const std::vector<EpisodeMetrics>& episodes) {
    if (episodes.empty()) throw std::invalid_argument("aggregate of zero episodes");
    AggregateReport r;
    r.runs = episodes.size();
    for (const EpisodeMetrics& e : episodes) {
        r.avg_speed += e.avg_speed;
        r.peak_jerk += e.peak_jerk;
        r.total_jerk += e.total_jerk;
        r.total_distance += e.total_distance;
        r.total_steering += e.total_steering;
        r.runtime += e.runtime;
        r.onlane_rate += e.onlane_rate;
        if (e.collided) r.collision_rate += 1.0;
    }
    const double n = static_cast<double>(r.runs);
    r.avg_speed /= n;
    r.peak_jerk /= n;
    r.total_jerk /= n;
    r.total_distance /= n;
    r.total_steering /= n;
    r.runtime /= n;
    r.onlane_rate /= n;
    r.collision_rate /= n;
    return r;
}

namespace {

std::string fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

constexpr const char* kIndicatorNames[] = {"speed",         "pk. jerk", "tot. jerk",
                                           "tot. distance", "tot. steering", "runtime",
                                           "onlane rate",   "col. rate"};

std::vector<double> indicator_values(const AggregateReport& r) {
    return {r.avg_speed, r.peak_jerk,  r.total_jerk,  r.total_distance,
            r.total_steering, r.runtime, r.onlane_rate, r.collision_rate};
}

}  // namespace

std::string report_csv_line(const AggregateReport& report) {
    std::string line;
    const auto values = indicator_values(report);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) line += ',';
        line += fixed(values[i]);
    }
    return line;
}

void export_report(const AggregateReport& report, const std::string& path, ReportFormat format) {
    if (report.runs == 0) throw std::invalid_argument("cannot export an empty report");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report to '" + path + "'");
    if (format == ReportFormat::csv) {
        out << "speed,pk_jerk,tot_jerk,tot_distance,tot_steering,runtime,onlane_rate,col_rate\n";
        out << report_csv_line(report) << '\n';
    } else {
        const auto values = indicator_values(report);
        out << "indicator | value\n";
        for (std::size_t i = 0; i < values.size(); ++i)
            out << kIndicatorNames[i] << " | " << fixed(values[i]) << '\n';
    }
    if (!out.good()) throw std::runtime_error("write failure on '" + path + "'");
}

void export_episodes(const std::vector<EpisodeMetrics>& episodes, const std::string& path) {
    if (episodes.empty()) throw std::invalid_argument("cannot export zero episodes");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write episodes to '" + path + "'");
    out << "episode,speed,pk_jerk,tot_jerk,tot_distance,tot_steering,runtime,onlane_rate,"
           "collided\n";
    for (std::size_t i = 0; i < episodes.size(); ++i) {
        const EpisodeMetrics& e = episodes[i];
        out << i << ',' << fixed(e.avg_speed) << ',' << fixed(e.peak_jerk) << ','
            << fixed(e.total_jerk) << ',' << fixed(e.total_distance) << ','
            << fixed(e.total_steering) << ',' << fixed(e.runtime) << ','
            << fixed(e.onlane_rate) << ',' << (e.collided ? 1 : 0) << '\n';
    }
}

}  // namespace drlsim::metrics
