#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <stdexcept>

#include "drlsim/envs.hpp"
#include "drlsim/errors.hpp"
#include "drlsim/roadnet_json.hpp"

namespace drlsim::envs {

using geom::kPi;
using geom::Vec2;
using roadnet::CircularArc;
using roadnet::Lane;
using roadnet::LaneGeometry;
using roadnet::StraightSegment;
using roadnet::TurnDirection;

namespace {

double rad(double deg) { return deg * kPi / 180.0; }

// Canonical degree key in [0, 360) for ring-join lookups; rounded so the same
// nominal angle computed along different float paths maps to one key.
double canon_deg(double deg) {
    const double wrapped = geom::wrap_positive(rad(deg)) * 180.0 / kPi;
    const double rounded = std::round(wrapped * 1e6) / 1e6;
    return rounded >= 360.0 ? 0.0 : rounded;
}

// Circle through `start` tangent to `heading` there, ending at `end`.
// Degenerates to a straight segment when `end` lies on the tangent ray.
LaneGeometry arc_from_tangent(Vec2 start, double heading, Vec2 end) {
    const Vec2 t = geom::unit(heading);
    const Vec2 n{-t.y, t.x};  // left normal
    const Vec2 m = end - start;
    const double lateral = n.dot(m);
    if (std::abs(lateral) < 1e-9 * std::max(1.0, m.norm())) {
        if (t.dot(m) <= 0.0) throw std::logic_error("arc_from_tangent: end behind start");
        return StraightSegment{start, end};
    }
    const double r_signed = m.squared_norm() / (2.0 * lateral);
    const Vec2 center = start + r_signed * n;
    CircularArc arc;
    arc.center = center;
    arc.radius = std::abs(r_signed);
    arc.start_angle = std::atan2(start.y - center.y, start.x - center.x);
    arc.end_angle = std::atan2(end.y - center.y, end.x - center.x);
    arc.turn = r_signed > 0.0 ? TurnDirection::ccw : TurnDirection::cw;
    return arc;
}

LaneGeometry reversed(const LaneGeometry& g) {
    if (const auto* seg = std::get_if<StraightSegment>(&g))
        return StraightSegment{seg->end, seg->start};
    CircularArc arc = std::get<CircularArc>(g);
    std::swap(arc.start_angle, arc.end_angle);
    arc.turn = arc.turn == TurnDirection::ccw ? TurnDirection::cw : TurnDirection::ccw;
    return arc;
}

struct Builder {
    std::vector<Lane> lanes;
    roadnet::SuccessorMap successors;
    ScenarioInfo info;

    void add(const std::string& id, LaneGeometry g, double limit, double width = 4.0) {
        lanes.emplace_back(id, std::move(g), width, limit);
    }
    void straight(const std::string& id, Vec2 a, Vec2 b, double limit) {
        add(id, StraightSegment{a, b}, limit);
    }
    void arc(const std::string& id, Vec2 center, double radius, double a0_deg, double a1_deg,
             TurnDirection turn, double limit) {
        add(id, CircularArc{center, radius, rad(a0_deg), rad(a1_deg), turn}, limit);
    }
    void link(const std::string& from, const std::string& to) { successors[from].insert(to); }

    // G1 two-arc connector; adds the chain and returns (first id, last id).
    std::pair<std::string, std::string> biarc(const std::string& prefix, Vec2 p0, double h0,
                                              Vec2 p1, double h1, double limit) {
        const Vec2 t0 = geom::unit(h0), t1 = geom::unit(h1);
        const Vec2 v = p1 - p0;
        const double a = 2.0 * (1.0 - t0.dot(t1));
        const double b = 2.0 * v.dot(t0 + t1);
        const double c = -v.squared_norm();
        double d;
        if (std::abs(a) < 1e-12) {
            if (std::abs(b) < 1e-12) throw std::logic_error("degenerate biarc: " + prefix);
            d = -c / b;
        } else {
            d = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
        }
        if (!(d > 0.0)) throw std::logic_error("biarc has no forward solution: " + prefix);
        const Vec2 joint = 0.5 * (p0 + p1 + d * (t0 - t1));
        if (geom::distance(p0, joint) < 1e-9 || geom::distance(joint, p1) < 1e-9) {
            add(prefix + "0", arc_from_tangent(p0, h0, p1), limit);
            return {prefix + "0", prefix + "0"};
        }
        add(prefix + "0", arc_from_tangent(p0, h0, joint), limit);
        // Second half built backwards from p1 so its end tangent is exact.
        add(prefix + "1", reversed(arc_from_tangent(p1, geom::wrap_angle(h1 + kPi), joint)),
            limit);
        link(prefix + "0", prefix + "1");
        return {prefix + "0", prefix + "1"};
    }

    void spawnable(const std::string& id) { info.spawnable_lanes.push_back(id); }
    void spawnable_all() {
        info.spawnable_lanes.clear();
        for (const Lane& l : lanes) info.spawnable_lanes.push_back(l.id());
    }

    Scenario finish(const std::string& name, const std::string& fixed_spawn) {
        info.name = name;
        info.fixed_spawn_lane = fixed_spawn;
        std::sort(info.spawnable_lanes.begin(), info.spawnable_lanes.end());
        Scenario s;
        s.network = std::make_shared<roadnet::RoadNetwork>(std::move(lanes), std::move(successors));
        s.info = std::move(info);
        return s;
    }
};

// ---------------------------------------------------------------------------
// Four-way crossing template. Local frame: approaches arrive from the west at
// (-b, -2) heading east; the other three approaches are rotations by 90, 180,
// 270 degrees about `center`. Adds 12 movement lanes (straight / right r=b-2 /
// left r=b+2 per approach) and wires arm lanes to them.
// Side order used throughout: 0=W, 1=S, 2=E, 3=N.
// ---------------------------------------------------------------------------
struct IntersectionArms {
    // Lane ids: in[side] ends at the side's entry point, out[side] starts at
    // the side's exit point.
    std::array<std::string, 4> in;
    std::array<std::string, 4> out;
};

void add_intersection(Builder& b, const std::string& prefix, Vec2 center,
                      const IntersectionArms& arms, double box = 12.0, double limit = 10.0) {
    const char* side_name[4] = {"w", "s", "e", "n"};
    for (int side = 0; side < 4; ++side) {
        const double th = rad(90.0 * side);
        const auto local = [&](Vec2 p) { return center + geom::rotate(p, th); };
        const std::string base = prefix + side_name[side] + "_";

        b.straight(base + "straight", local({-box, -2.0}), local({box, -2.0}), limit);
        b.arc(base + "right", local({-box, -box}), box - 2.0, 90.0 + 90.0 * side,
              0.0 + 90.0 * side, TurnDirection::cw, limit);
        b.arc(base + "left", local({-box, box}), box + 2.0, -90.0 + 90.0 * side,
              0.0 + 90.0 * side, TurnDirection::ccw, limit);

        b.link(arms.in[side], base + "straight");
        b.link(arms.in[side], base + "right");
        b.link(arms.in[side], base + "left");
        b.link(base + "straight", arms.out[(side + 2) % 4]);  // opposite side
        b.link(base + "right", arms.out[(side + 1) % 4]);     // right of approach
        b.link(base + "left", arms.out[(side + 3) % 4]);      // left of approach
    }
    b.info.four_way_intersections += 1;
}

// ---------------------------------------------------------------------------
// Roundabout ring + arm connections. The ring circulates counter-clockwise;
// per arm (compass angle psi) traffic enters at ring angle psi+10 deg and
// exits at psi-10 deg. Ring arcs are split at every join angle.
// ---------------------------------------------------------------------------
struct RingJoin {
    std::map<double, std::string> arc_starting_at;  // join angle deg -> arc id
    std::map<double, std::string> arc_ending_at;
};

RingJoin add_ring(Builder& b, const std::string& prefix, Vec2 center, double radius,
                  std::vector<double> join_angles_deg, double limit = 10.0) {
    for (double& a : join_angles_deg) a = canon_deg(a);
    std::sort(join_angles_deg.begin(), join_angles_deg.end());
    RingJoin join;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < join_angles_deg.size(); ++i) {
        const double a0 = join_angles_deg[i];
        const double a1 = join_angles_deg[(i + 1) % join_angles_deg.size()];
        const std::string id = prefix + std::to_string(i);
        b.arc(id, center, radius, a0, a1, TurnDirection::ccw, limit);
        join.arc_starting_at[a0] = id;
        join.arc_ending_at[a1] = id;
        ids.push_back(id);
    }
    for (std::size_t i = 0; i < ids.size(); ++i) b.link(ids[i], ids[(i + 1) % ids.size()]);
    return join;
}

// Connects one arm to a ring: in-lane -> entry biarc -> ring, and
// ring -> exit biarc -> out-lane. `psi_deg` is the arm's compass direction
// seen from the ring center.
void connect_arm(Builder& b, const std::string& prefix, Vec2 center, double ring_radius,
                 double psi_deg, const RingJoin& join, const std::string& in_lane,
                 Vec2 in_end, double in_heading, const std::string& out_lane, Vec2 out_start,
                 double out_heading, double limit = 10.0) {
    const double entry_deg = canon_deg(psi_deg + 10.0);
    const double exit_deg = canon_deg(psi_deg - 10.0);
    const Vec2 entry_pos = center + ring_radius * geom::unit(rad(entry_deg));
    const Vec2 exit_pos = center + ring_radius * geom::unit(rad(exit_deg));
    const double entry_heading = geom::wrap_angle(rad(entry_deg) + kPi / 2.0);
    const double exit_heading = geom::wrap_angle(rad(exit_deg) + kPi / 2.0);

    const auto [ein, eout] =
        b.biarc(prefix + "entry", in_end, in_heading, entry_pos, entry_heading, limit);
    b.link(in_lane, ein);
    b.link(eout, join.arc_starting_at.at(entry_deg));

    const auto [xin, xout] =
        b.biarc(prefix + "exit", exit_pos, exit_heading, out_start, out_heading, limit);
    b.link(join.arc_ending_at.at(exit_deg), xin);
    b.link(xout, out_lane);
}

// ---------------------------------------------------------------------------
// Scenario builders
// ---------------------------------------------------------------------------

Scenario build_straightlane() {
    Builder b;
    b.straight("lane", {0.0, 0.0}, {2000.0, 0.0}, 40.0);
    b.spawnable("lane");
    b.info.straight_connectors = 1;
    return b.finish("straightlane", "lane");
}

Scenario build_merge() {
    Builder b;
    b.straight("main_a", {0.0, 4.0}, {500.0, 4.0}, 30.0);
    b.straight("main_b0", {0.0, 0.0}, {350.0, 0.0}, 30.0);
    b.straight("main_b1", {350.0, 0.0}, {500.0, 0.0}, 30.0);
    b.link("main_b0", "main_b1");
    // 150 m on-ramp tapering into the right mainline lane at x=350.
    const double ramp_heading = 0.17;
    const auto [r0, r1] =
        b.biarc("ramp", {203.0, -25.0}, ramp_heading, {350.0, 0.0}, 0.0, 20.0);
    b.link(r1, "main_b1");
    b.info.merge_junctions = 1;
    b.info.merge_lane_ids.push_back("main_b1");
    b.info.straight_connectors = 1;
    b.spawnable("main_a");
    b.spawnable("main_b0");
    b.spawnable(r0);
    return b.finish("merge", r0);
}

Scenario build_intersection() {
    Builder b;
    const double box = 12.0, arm = 312.0;
    // Arms: two perpendicular two-way roads. 0=W, 1=S, 2=E, 3=N.
    b.straight("w_in", {-arm, -2.0}, {-box, -2.0}, 15.0);
    b.straight("w_out", {-box, 2.0}, {-arm, 2.0}, 15.0);
    b.straight("s_in", {2.0, -arm}, {2.0, -box}, 15.0);
    b.straight("s_out", {-2.0, -box}, {-2.0, -arm}, 15.0);
    b.straight("e_in", {arm, 2.0}, {box, 2.0}, 15.0);
    b.straight("e_out", {box, -2.0}, {arm, -2.0}, 15.0);
    b.straight("n_in", {-2.0, arm}, {-2.0, box}, 15.0);
    b.straight("n_out", {2.0, box}, {2.0, arm}, 15.0);
    IntersectionArms arms;
    arms.in = {"w_in", "s_in", "e_in", "n_in"};
    arms.out = {"w_out", "s_out", "e_out", "n_out"};
    add_intersection(b, "x_", {0.0, 0.0}, arms, box);
    b.info.straight_connectors = 2;
    for (const auto& id : arms.in) b.spawnable(id);
    return b.finish("intersection", "w_in");
}

Scenario build_roundabout() {
    Builder b;
    const Vec2 center{0.0, 0.0};
    const double r_inner = 18.0, r_outer = 22.0, arm_near = 36.0, arm_far = 60.0;
    const std::vector<double> arm_psis = {180.0, 270.0, 0.0, 90.0};  // W, S, E, N
    const char* arm_name[4] = {"w", "s", "e", "n"};

    std::vector<double> outer_joins;
    for (const double psi : arm_psis) {
        outer_joins.push_back(psi + 10.0);
        outer_joins.push_back(psi - 10.0);
    }
    const RingJoin outer = add_ring(b, "ring_o_", center, r_outer, outer_joins);
    add_ring(b, "ring_i_", center, r_inner, {45.0, 135.0, 225.0, 315.0});

    for (int i = 0; i < 4; ++i) {
        const double psi = arm_psis[i];
        const double th = rad(psi - 180.0);  // arm local frame: arm lies west
        const auto local = [&](Vec2 p) { return center + geom::rotate(p, th); };
        const std::string in_id = std::string(arm_name[i]) + "_in";
        const std::string out_id = std::string(arm_name[i]) + "_out";
        b.straight(in_id, local({-arm_far, -2.0}), local({-arm_near, -2.0}), 15.0);
        b.straight(out_id, local({-arm_near, 2.0}), local({-arm_far, 2.0}), 15.0);
        connect_arm(b, std::string(arm_name[i]) + "_", center, r_outer, psi, outer, in_id,
                    local({-arm_near, -2.0}), geom::wrap_angle(th), out_id,
                    local({-arm_near, 2.0}), geom::wrap_angle(th + kPi));
        b.spawnable(in_id);
    }
    for (const Lane& l : b.lanes) {
        if (l.id().rfind("ring_", 0) == 0) b.spawnable(l.id());
    }
    b.info.roundabouts = 1;
    return b.finish("roundabout", "w_in");
}

Scenario build_racetrack() {
    Builder b;
    // Closed loop of 8 alternating straight/arc segments, two lanes circulating
    // counter-clockwise. Corner centers:
    const std::array<Vec2, 4> centers = {Vec2{120.0, 30.0}, Vec2{120.0, 90.0}, Vec2{0.0, 90.0},
                                         Vec2{0.0, 30.0}};
    const auto lane_chain = [&](const std::string& prefix, double offset) {
        const double r = 30.0 - offset;  // offset +2 -> inner radius 28
        const double lane_y_bottom = offset;            // bottom straight y
        const double lane_x_right = 150.0 - offset;     // right straight x
        const double lane_y_top = 120.0 - offset;       // top straight y
        const double lane_x_left = -30.0 + offset;      // left straight x
        b.straight(prefix + "0", {0.0, lane_y_bottom}, {120.0, lane_y_bottom}, 25.0);
        b.arc(prefix + "1", centers[0], r, 270.0, 0.0, TurnDirection::ccw, 25.0);
        b.straight(prefix + "2", {lane_x_right, 30.0}, {lane_x_right, 90.0}, 25.0);
        b.arc(prefix + "3", centers[1], r, 0.0, 90.0, TurnDirection::ccw, 25.0);
        b.straight(prefix + "4", {120.0, lane_y_top}, {0.0, lane_y_top}, 25.0);
        b.arc(prefix + "5", centers[2], r, 90.0, 180.0, TurnDirection::ccw, 25.0);
        b.straight(prefix + "6", {lane_x_left, 90.0}, {lane_x_left, 30.0}, 25.0);
        b.arc(prefix + "7", centers[3], r, 180.0, 270.0, TurnDirection::ccw, 25.0);
        for (int i = 0; i < 8; ++i)
            b.link(prefix + std::to_string(i), prefix + std::to_string((i + 1) % 8));
    };
    lane_chain("track_a_", 2.0);   // inner lane (left of travel)
    lane_chain("track_b_", -2.0);  // outer lane
    b.spawnable_all();
    return b.finish("racetrack", "track_a_0");
}

Scenario build_complexroads() {
    Builder b;
    const double lim_edge = 20.0, lim_mid = 15.0, lim_stub = 12.0, lim_corner = 15.0;

    // --- Edge roads of the outer circuit (two-way, lanes offset +/-2) ---
    // North edge, west half (RB_NW at (-300,300) to IX_N at (0,300)).
    b.straight("n_w_eb", {-264.0, 298.0}, {-12.0, 298.0}, lim_edge);
    b.straight("n_w_wb_a", {-12.0, 302.0}, {-150.0, 302.0}, lim_edge);
    b.straight("n_w_wb_b", {-150.0, 302.0}, {-264.0, 302.0}, lim_edge);
    b.link("n_w_wb_a", "n_w_wb_b");
    // North edge, east half (IX_N to NE corner).
    b.straight("n_e_eb", {12.0, 298.0}, {270.0, 298.0}, lim_edge);
    b.straight("n_e_wb_a", {270.0, 302.0}, {150.0, 302.0}, lim_edge);
    b.straight("n_e_wb_b", {150.0, 302.0}, {12.0, 302.0}, lim_edge);
    b.link("n_e_wb_a", "n_e_wb_b");
    // South edge, west half (SW corner to IX_S at (0,0)).
    b.straight("s_w_eb", {-270.0, -2.0}, {-12.0, -2.0}, lim_edge);
    b.straight("s_w_wb_a", {-12.0, 2.0}, {-150.0, 2.0}, lim_edge);
    b.straight("s_w_wb_b", {-150.0, 2.0}, {-270.0, 2.0}, lim_edge);
    b.link("s_w_wb_a", "s_w_wb_b");
    // South edge, east half (IX_S to RB_SE at (300,0)).
    b.straight("s_e_eb", {12.0, -2.0}, {264.0, -2.0}, lim_edge);
    b.straight("s_e_wb_a", {264.0, 2.0}, {150.0, 2.0}, lim_edge);
    b.straight("s_e_wb_b", {150.0, 2.0}, {12.0, 2.0}, lim_edge);
    b.link("s_e_wb_a", "s_e_wb_b");
    // West edge (SW corner to RB_NW).
    b.straight("w_nb", {-298.0, 30.0}, {-298.0, 264.0}, lim_edge);
    b.straight("w_sb", {-302.0, 264.0}, {-302.0, 30.0}, lim_edge);
    // East edge (RB_SE to NE corner).
    b.straight("e_nb", {302.0, 36.0}, {302.0, 270.0}, lim_edge);
    b.straight("e_sb", {298.0, 270.0}, {298.0, 36.0}, lim_edge);
    // Middle road between the two intersections.
    b.straight("mid_nb", {2.0, 12.0}, {2.0, 288.0}, lim_mid);
    b.straight("mid_sb", {-2.0, 288.0}, {-2.0, 12.0}, lim_mid);
    b.info.straight_connectors = 7;

    // --- Plain corner bends (NE and SW) ---
    b.arc("ne_es", {270.0, 270.0}, 28.0, 90.0, 0.0, TurnDirection::cw, lim_corner);
    b.link("n_e_eb", "ne_es");
    b.link("ne_es", "e_sb");
    b.arc("ne_nw", {270.0, 270.0}, 32.0, 0.0, 90.0, TurnDirection::ccw, lim_corner);
    b.link("e_nb", "ne_nw");
    b.link("ne_nw", "n_e_wb_a");
    b.arc("sw_se", {-270.0, 30.0}, 32.0, 180.0, 270.0, TurnDirection::ccw, lim_corner);
    b.link("w_sb", "sw_se");
    b.link("sw_se", "s_w_eb");
    b.arc("sw_wn", {-270.0, 30.0}, 28.0, 270.0, 180.0, TurnDirection::cw, lim_corner);
    b.link("s_w_wb_b", "sw_wn");
    b.link("sw_wn", "w_nb");

    // --- Roundabout corners (single ring, two arms each) ---
    {
        const Vec2 c{-300.0, 300.0};
        const RingJoin ring = add_ring(b, "rbnw_ring_", c, 20.0, {10.0, 350.0, 280.0, 260.0});
        // E arm: westbound edge lane arrives, eastbound departs.
        connect_arm(b, "rbnw_e_", c, 20.0, 0.0, ring, "n_w_wb_b", {-264.0, 302.0}, rad(180.0),
                    "n_w_eb", {-264.0, 298.0}, 0.0);
        // S arm: northbound W-edge lane arrives, southbound departs.
        connect_arm(b, "rbnw_s_", c, 20.0, 270.0, ring, "w_nb", {-298.0, 264.0}, rad(90.0),
                    "w_sb", {-302.0, 264.0}, rad(270.0));
    }
    {
        const Vec2 c{300.0, 0.0};
        const RingJoin ring = add_ring(b, "rbse_ring_", c, 20.0, {190.0, 170.0, 100.0, 80.0});
        // W arm: eastbound S-edge lane arrives, westbound departs.
        connect_arm(b, "rbse_w_", c, 20.0, 180.0, ring, "s_e_eb", {264.0, -2.0}, 0.0,
                    "s_e_wb_a", {264.0, 2.0}, rad(180.0));
        // N arm: southbound E-edge lane arrives, northbound departs.
        connect_arm(b, "rbse_n_", c, 20.0, 90.0, ring, "e_sb", {298.0, 36.0}, rad(270.0),
                    "e_nb", {302.0, 36.0}, rad(90.0));
    }
    b.info.roundabouts = 2;

    // --- Ramp stubs: the fourth arms of the two intersections. Each stub's
    // inbound lane diverges from the approaching westbound edge lane and its
    // outbound lane merges back into the departing westbound edge lane. ---
    // IX_S south stub.
    b.straight("stub_s_in", {2.0, -30.0}, {2.0, -12.0}, lim_stub);
    b.straight("stub_s_out", {-2.0, -12.0}, {-2.0, -30.0}, lim_stub);
    {
        const auto [d0, d1] = b.biarc("stub_s_div", {150.0, 2.0}, rad(180.0), {2.0, -30.0},
                                      rad(90.0), lim_stub);
        b.link("s_e_wb_a", d0);  // diverge: second successor besides s_e_wb_b
        b.link(d1, "stub_s_in");
        const auto [m0, m1] = b.biarc("stub_s_mrg", {-2.0, -30.0}, rad(270.0), {-150.0, 2.0},
                                      rad(180.0), lim_stub);
        b.link("stub_s_out", m0);
        b.link(m1, "s_w_wb_b");  // merge junction
        b.info.merge_lane_ids.push_back("s_w_wb_b");
    }
    // IX_N north stub.
    b.straight("stub_n_in", {-2.0, 330.0}, {-2.0, 312.0}, lim_stub);
    b.straight("stub_n_out", {2.0, 312.0}, {2.0, 330.0}, lim_stub);
    {
        const auto [d0, d1] = b.biarc("stub_n_div", {150.0, 302.0}, rad(180.0), {-2.0, 330.0},
                                      rad(270.0), lim_stub);
        b.link("n_e_wb_a", d0);
        b.link(d1, "stub_n_in");
        const auto [m0, m1] = b.biarc("stub_n_mrg", {2.0, 330.0}, rad(90.0), {-150.0, 302.0},
                                      rad(180.0), lim_stub);
        b.link("stub_n_out", m0);
        b.link(m1, "n_w_wb_b");  // merge junction
        b.info.merge_lane_ids.push_back("n_w_wb_b");
    }
    b.info.merge_junctions = 2;

    // --- The two four-way intersections ---
    IntersectionArms ixs;
    ixs.in = {"s_w_eb", "stub_s_in", "s_e_wb_b", "mid_sb"};
    ixs.out = {"s_w_wb_a", "stub_s_out", "s_e_eb", "mid_nb"};
    add_intersection(b, "ixs_", {0.0, 0.0}, ixs);
    IntersectionArms ixn;
    ixn.in = {"n_w_eb", "mid_nb", "n_e_wb_b", "stub_n_in"};
    ixn.out = {"n_w_wb_a", "mid_sb", "n_e_eb", "stub_n_out"};
    add_intersection(b, "ixn_", {0.0, 300.0}, ixn);

    b.spawnable_all();
    return b.finish("complexroads", "n_w_eb");
}

}  // namespace

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {
        "straightlane", "roundabout", "intersection", "merge", "racetrack", "complexroads"};
    return names;
}

bool scenario_has_baseline_reward(const std::string& name) {
    // The stock reward is only defined for the scenarios that shipped with
    // one; merge, complexroads and straightlane use the modified reward only.
    return name == "roundabout" || name == "intersection" || name == "racetrack";
}

namespace {

Scenario scenario_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open scenario fixture '" + path + "'");
    nlohmann::json doc;
    in >> doc;
    return scenario_from_json(doc);
}

}  // namespace

Scenario build_scenario(const std::string& name,
                        const std::optional<std::string>& fixtures_dir) {
    std::optional<std::string> dir = fixtures_dir;
    if (!dir) {
        if (const char* env = std::getenv("DRLC_FIXTURES")) dir = std::string(env);
    }
    if (dir && !dir->empty()) {
        return scenario_from_json_file(*dir + "/" + name + ".json");
    }
    if (name == "straightlane") return build_straightlane();
    if (name == "roundabout") return build_roundabout();
    if (name == "intersection") return build_intersection();
    if (name == "merge") return build_merge();
    if (name == "racetrack") return build_racetrack();
    if (name == "complexroads") return build_complexroads();
    throw NotFoundError("unknown scenario '" + name + "'");
}

nlohmann::json scenario_to_json(const Scenario& scenario) {
    nlohmann::json doc = roadnet::network_to_json(*scenario.network);
    const ScenarioInfo& info = scenario.info;
    doc["scenario"] = {
        {"name", info.name},
        {"spawnable", info.spawnable_lanes},
        {"fixed_spawn_lane", info.fixed_spawn_lane},
        {"inventory",
         {{"merge_junctions", info.merge_junctions},
          {"four_way_intersections", info.four_way_intersections},
          {"roundabouts", info.roundabouts},
          {"straight_connectors", info.straight_connectors},
          {"merge_lane_ids", info.merge_lane_ids}}}};
    return doc;
}

Scenario scenario_from_json(const nlohmann::json& doc) {
    Scenario s;
    s.network = std::make_shared<roadnet::RoadNetwork>(roadnet::network_from_json(doc));
    const auto& meta = doc.at("scenario");
    s.info.name = meta.at("name").get<std::string>();
    s.info.spawnable_lanes = meta.at("spawnable").get<std::vector<std::string>>();
    s.info.fixed_spawn_lane = meta.at("fixed_spawn_lane").get<std::string>();
    const auto& inv = meta.at("inventory");
    s.info.merge_junctions = inv.at("merge_junctions").get<std::size_t>();
    s.info.four_way_intersections = inv.at("four_way_intersections").get<std::size_t>();
    s.info.roundabouts = inv.at("roundabouts").get<std::size_t>();
    s.info.straight_connectors = inv.at("straight_connectors").get<std::size_t>();
    s.info.merge_lane_ids = inv.at("merge_lane_ids").get<std::vector<std::string>>();
    std::sort(s.info.spawnable_lanes.begin(), s.info.spawnable_lanes.end());
    return s;
}

}  // namespace drlsim::envs
