#include "drlsim/cli_commands.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "drlsim/checkpoint.hpp"
#include "drlsim/dqn.hpp"
#include "drlsim/envs.hpp"
#include "drlsim/errors.hpp"
#include "drlsim/kernels.hpp"
#include "drlsim/metrics.hpp"
#include "drlsim/roadnet_json.hpp"
#include "drlsim/trpo.hpp"

namespace drlsim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string iso_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

struct CommonOptions {
    std::string config_path;
    std::string fixtures_dir;  // empty = builders / DRLC_FIXTURES
    std::string kernels;       // "", "scalar", "avx2"
};

void apply_kernel_choice(const std::string& kernels) {
    if (kernels.empty()) return;
    kernels::force_isa(kernels == "avx2" ? kernels::Isa::avx2 : kernels::Isa::scalar);
}

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open config file '" + path + "'");
    json doc;
    in >> doc;
    return doc;
}

std::optional<std::string> fixtures_opt(const CommonOptions& common) {
    if (common.fixtures_dir.empty()) return std::nullopt;
    return common.fixtures_dir;
}

void write_manifest(const fs::path& dir, json manifest) {
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
}

// Deterministic greedy policy for a loaded checkpoint.
struct EvalPolicy {
    std::function<dynamics::Action(const envs::Observation&)> act;
    std::string algorithm;
    std::string train_env;
    json metadata;
};

EvalPolicy policy_from_checkpoint(const std::string& path) {
    const agents::Checkpoint ck = agents::load_checkpoint(path);
    EvalPolicy policy;
    policy.metadata = ck.metadata;
    policy.algorithm = ck.metadata.value("algorithm", std::string());
    policy.train_env = ck.metadata.value("env", std::string());
    if (policy.algorithm == "dqn") {
        const auto arch =
            agents::Architecture::from_json(ck.metadata.at("architecture"));
        if (arch.input_dim != envs::kObservationDim)
            throw CorruptCheckpointError("architecture does not match the observation layout", 0);
        envs::ActionSpec spec;
        const json& a = ck.metadata.at("action");
        spec.kind = envs::ActionKind::grid;
        spec.steering_levels = a.at("steering_levels").get<std::size_t>();
        spec.accel_levels = a.at("accel_levels").get<std::size_t>();
        spec.steering_span = a.at("steering_span").get<double>();
        spec.accel_span = a.at("accel_span").get<double>();
        const dynamics::ActionGrid grid = spec.grid();
        if (arch.output_dim != grid.size())
            throw CorruptCheckpointError("Q-network output does not match the action grid", 0);
        std::size_t cursor = 0;
        agents::MlpParams q = agents::read_mlp(ck.tensors, cursor, arch);
        policy.act = [q = std::move(q), grid](const envs::Observation& obs) {
            return grid.discretize(agents::greedy_action(q, obs));
        };
    } else if (policy.algorithm == "trpo") {
        const json& arch_meta = ck.metadata.at("architecture");
        const auto policy_arch = agents::Architecture::from_json(arch_meta.at("policy"));
        const auto value_arch = agents::Architecture::from_json(arch_meta.at("value"));
        if (policy_arch.input_dim != envs::kObservationDim || policy_arch.output_dim != 2)
            throw CorruptCheckpointError("policy architecture does not match this environment", 0);
        std::size_t cursor = 0;
        agents::GaussianPolicy gp;
        gp.mean_net = agents::read_mlp(ck.tensors, cursor, policy_arch);
        if (cursor >= ck.tensors.size() ||
            ck.tensors[cursor].dims != std::vector<std::uint32_t>{2})
            throw CorruptCheckpointError("missing log_std tensor", 0);
        gp.log_std = {ck.tensors[cursor].data[0], ck.tensors[cursor].data[1]};
        ++cursor;
        agents::read_mlp(ck.tensors, cursor, value_arch);  // shape validation only
        policy.act = [gp = std::move(gp)](const envs::Observation& obs) {
            return gp.mean_action(obs);
        };
    } else {
        throw CorruptCheckpointError("unknown algorithm '" + policy.algorithm + "' in metadata",
                                     0);
    }
    return policy;
}

void write_trace(const fs::path& path, const std::vector<std::string>& rows) {
    std::ofstream out(path);
    out << "t,x,y,heading,speed,delta,alpha,reward,signed_distance,lhd,onlane,crashed\n";
    for (const auto& row : rows) out << row << '\n';
}

std::vector<metrics::EpisodeMetrics> run_episodes(envs::Environment& env, const EvalPolicy& policy,
                                                  std::size_t runs, std::uint64_t seed,
                                                  const std::optional<fs::path>& trace_dir) {
    std::vector<metrics::EpisodeMetrics> episodes;
    for (std::size_t run = 0; run < runs; ++run) {
        envs::Observation obs = env.reset(seed + run);
        metrics::EpisodeLogger logger(env.config().dt);
        std::vector<std::string> trace_rows;
        std::size_t t = 0;
        while (!env.finished()) {
            const dynamics::Action action = policy.act(obs);
            const envs::StepResult sr = env.step(action);
            logger.record_step(env.ego(), action, sr.lane_relation);
            if (trace_dir) {
                char buf[256];
                std::snprintf(buf, sizeof(buf),
                              "%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d,%d", t,
                              env.ego().position.x, env.ego().position.y, env.ego().heading,
                              sr.speed, action.steering, action.accel, sr.reward,
                              sr.lane_relation.signed_distance, sr.lane_relation.lhd,
                              sr.lane_relation.onlane ? 1 : 0, env.ego().crashed ? 1 : 0);
                trace_rows.emplace_back(buf);
            }
            obs = sr.observation;
            ++t;
        }
        if (trace_dir)
            write_trace(*trace_dir / ("trace_" + std::to_string(run) + ".csv"), trace_rows);
        episodes.push_back(logger.finalize());
    }
    return episodes;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainOptions {
    std::string env_name;
    std::string algo = "dqn";
    std::string reward = "modified";
    std::size_t iterations = 10000;
    std::uint64_t seed = 0;
    std::size_t repeat = 1;
    std::string out_dir;
    std::optional<std::size_t> traffic;
    std::optional<std::size_t> max_steps;
    std::optional<std::string> spawn;
    std::optional<double> lr;              // dqn
    std::optional<std::size_t> train_freq; // dqn
    std::optional<std::size_t> batch_steps;  // trpo
    std::optional<double> value_lr;          // trpo
    std::optional<double> delta_kl;          // trpo
};

int cmd_train(const TrainOptions& opt, const CommonOptions& common) {
    const json file_config = load_config_file(common.config_path);

    if (opt.reward == "baseline" && !envs::scenario_has_baseline_reward(opt.env_name)) {
        std::cerr << "error: no baseline reward function is available for '" << opt.env_name
                  << "'; use --reward modified\n";
        return kExitUsage;
    }

    envs::EnvConfig env_config = envs::EnvConfig::defaults_for(opt.env_name);
    if (file_config.contains("env")) {
        json merged = env_config.to_json();
        merged.update(file_config.at("env"));
        env_config = envs::EnvConfig::from_json(merged);
    }
    env_config.scenario = opt.env_name;
    env_config.reward_kind =
        opt.reward == "baseline" ? envs::RewardKind::baseline : envs::RewardKind::modified;
    if (opt.traffic) env_config.traffic_count = *opt.traffic;
    if (opt.max_steps) env_config.max_steps = *opt.max_steps;
    if (opt.spawn)
        env_config.spawn =
            *opt.spawn == "fixed" ? envs::SpawnMode::fixed : envs::SpawnMode::randomized;

    agents::DqnConfig dqn_config;
    agents::TrpoConfig trpo_config;
    if (file_config.contains("dqn")) {
        const json& d = file_config.at("dqn");
        dqn_config.hidden = d.value("hidden", dqn_config.hidden);
        dqn_config.gamma = d.value("gamma", dqn_config.gamma);
        dqn_config.buffer_capacity = d.value("buffer_capacity", dqn_config.buffer_capacity);
        dqn_config.batch_size = d.value("batch_size", dqn_config.batch_size);
        dqn_config.lr = d.value("lr", dqn_config.lr);
        dqn_config.eps_start = d.value("eps_start", dqn_config.eps_start);
        dqn_config.eps_end = d.value("eps_end", dqn_config.eps_end);
        dqn_config.eps_decay_fraction = d.value("eps_decay_fraction", dqn_config.eps_decay_fraction);
        dqn_config.target_copy_every = d.value("target_copy_every", dqn_config.target_copy_every);
        dqn_config.train_freq = d.value("train_freq", dqn_config.train_freq);
        dqn_config.learn_start = d.value("learn_start", dqn_config.learn_start);
    }
    if (file_config.contains("trpo")) {
        const json& t = file_config.at("trpo");
        trpo_config.policy_hidden = t.value("policy_hidden", trpo_config.policy_hidden);
        trpo_config.value_hidden = t.value("value_hidden", trpo_config.value_hidden);
        trpo_config.gamma = t.value("gamma", trpo_config.gamma);
        trpo_config.lambda = t.value("lambda", trpo_config.lambda);
        trpo_config.delta_kl = t.value("delta_kl", trpo_config.delta_kl);
        trpo_config.batch_steps = t.value("batch_steps", trpo_config.batch_steps);
        trpo_config.cg_iterations = t.value("cg_iterations", trpo_config.cg_iterations);
        trpo_config.cg_damping = t.value("cg_damping", trpo_config.cg_damping);
        trpo_config.value_epochs = t.value("value_epochs", trpo_config.value_epochs);
        trpo_config.value_lr = t.value("value_lr", trpo_config.value_lr);
        trpo_config.init_log_std = t.value("init_log_std", trpo_config.init_log_std);
    }
    if (opt.lr) dqn_config.lr = *opt.lr;
    if (opt.train_freq) dqn_config.train_freq = *opt.train_freq;
    if (opt.batch_steps) trpo_config.batch_steps = *opt.batch_steps;
    if (opt.value_lr) trpo_config.value_lr = *opt.value_lr;
    if (opt.delta_kl) trpo_config.delta_kl = *opt.delta_kl;

    env_config.action.kind =
        opt.algo == "dqn" ? envs::ActionKind::grid : envs::ActionKind::continuous;

    const fs::path out_dir(opt.out_dir);
    fs::create_directories(out_dir);
    const std::string started = iso_now();

    const envs::Scenario scenario =
        envs::build_scenario(opt.env_name, fixtures_opt(common));
    const std::string fingerprint = roadnet::network_fingerprint(*scenario.network);

    std::vector<std::string> checkpoint_paths;
    try {
        for (std::size_t k = 0; k < opt.repeat; ++k) {
            const std::uint64_t run_seed = opt.seed + k;
            env_config.seed = run_seed;
            agents::Checkpoint ck;
            agents::TrainingLog log;
            if (opt.algo == "dqn") {
                agents::DqnResult result =
                    agents::dqn_train(env_config, dqn_config, opt.iterations, run_seed,
                                      fixtures_opt(common));
                ck.metadata = {{"algorithm", "dqn"},
                               {"architecture", result.q_net.arch.to_json()},
                               {"env", opt.env_name},
                               {"seed", run_seed},
                               {"iterations", opt.iterations},
                               {"reward", opt.reward},
                               {"action",
                                {{"steering_levels", env_config.action.steering_levels},
                                 {"accel_levels", env_config.action.accel_levels},
                                 {"steering_span", env_config.action.steering_span},
                                 {"accel_span", env_config.action.accel_span}}}};
                agents::append_mlp(ck.tensors, result.q_net);
                log = std::move(result.log);
            } else {
                agents::TrpoResult result =
                    agents::trpo_train(env_config, trpo_config, opt.iterations, run_seed,
                                       fixtures_opt(common));
                ck.metadata = {{"algorithm", "trpo"},
                               {"architecture",
                                {{"policy", result.policy.mean_net.arch.to_json()},
                                 {"value", result.value_net.arch.to_json()}}},
                               {"env", opt.env_name},
                               {"seed", run_seed},
                               {"iterations", opt.iterations},
                               {"reward", opt.reward}};
                agents::append_mlp(ck.tensors, result.policy.mean_net);
                ck.tensors.push_back(agents::Tensor{
                    {2}, {result.policy.log_std[0], result.policy.log_std[1]}});
                agents::append_mlp(ck.tensors, result.value_net);
                log = std::move(result.log);
            }
            const fs::path model_path = out_dir / ("model_" + std::to_string(k) + ".drlc");
            agents::save_checkpoint(ck, model_path.string());
            log.write_csv((out_dir / ("train_log_" + std::to_string(k) + ".csv")).string());
            checkpoint_paths.push_back(model_path.string());
        }
    } catch (const NumericalError& e) {
        std::cerr << "error: numerical failure during training: " << e.what() << '\n';
        return kExitNumeric;  // partial outputs stay in place
    }

    json manifest{{"command", "train"},
                  {"env", opt.env_name},
                  {"algo", opt.algo},
                  {"reward", opt.reward},
                  {"iterations", opt.iterations},
                  {"seed", opt.seed},
                  {"repeat", opt.repeat},
                  {"env_config", env_config.to_json()},
                  {"fixture_fingerprint", fingerprint},
                  {"kernels", std::string(kernels::isa_name(kernels::active_isa()))},
                  {"checkpoints", checkpoint_paths},
                  {"started_at", started},
                  {"finished_at", iso_now()}};
    if (opt.algo == "trpo")
        manifest["trpo"] = {{"batch_steps", trpo_config.batch_steps},
                            {"delta_kl", trpo_config.delta_kl},
                            {"value_lr", trpo_config.value_lr},
                            {"gamma", trpo_config.gamma},
                            {"lambda", trpo_config.lambda}};
    else
        manifest["dqn"] = {{"lr", dqn_config.lr},
                           {"gamma", dqn_config.gamma},
                           {"train_freq", dqn_config.train_freq},
                           {"batch_size", dqn_config.batch_size}};
    write_manifest(out_dir, std::move(manifest));
    return kExitOk;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalOptions {
    std::string model_path;
    std::string env_name;  // empty = the checkpoint's training env
    std::size_t runs = 10;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool trace = false;
    std::optional<double> min_speed;
    std::optional<std::size_t> max_steps;
    std::optional<std::size_t> traffic;
    std::optional<std::string> spawn;
};

int eval_into(const EvalOptions& opt, const CommonOptions& common, const EvalPolicy& policy,
              std::vector<metrics::EpisodeMetrics>& episodes_out) {
    const std::string env_name = opt.env_name.empty() ? policy.train_env : opt.env_name;
    envs::EnvConfig env_config = envs::EnvConfig::defaults_for(env_name);
    env_config.seed = opt.seed;
    if (opt.min_speed) env_config.min_speed = *opt.min_speed;
    if (opt.max_steps) env_config.max_steps = *opt.max_steps;
    if (opt.traffic) env_config.traffic_count = *opt.traffic;
    if (opt.spawn)
        env_config.spawn =
            *opt.spawn == "fixed" ? envs::SpawnMode::fixed : envs::SpawnMode::randomized;
    envs::Environment env(env_config, fixtures_opt(common));

    std::optional<fs::path> trace_dir;
    if (opt.trace) trace_dir = fs::path(opt.out_dir);
    episodes_out = run_episodes(env, policy, opt.runs, opt.seed, trace_dir);
    return kExitOk;
}

int cmd_eval(const EvalOptions& opt, const CommonOptions& common) {
    EvalPolicy policy;
    try {
        policy = policy_from_checkpoint(opt.model_path);
    } catch (const CorruptCheckpointError& e) {
        std::cerr << "error: unusable checkpoint: " << e.what() << '\n';
        return kExitArtifact;
    }
    const fs::path out_dir(opt.out_dir);
    fs::create_directories(out_dir);
    const std::string started = iso_now();

    std::vector<metrics::EpisodeMetrics> episodes;
    const int rc = eval_into(opt, common, policy, episodes);
    if (rc != kExitOk) return rc;

    metrics::export_episodes(episodes, (out_dir / "episodes.csv").string());
    const metrics::AggregateReport report = metrics::aggregate(episodes);
    metrics::export_report(report, (out_dir / "report.csv").string(), metrics::ReportFormat::csv);
    metrics::export_report(report, (out_dir / "report.txt").string(),
                           metrics::ReportFormat::table);

    const std::string env_name = opt.env_name.empty() ? policy.train_env : opt.env_name;
    write_manifest(out_dir, json{{"command", "eval"},
                                 {"model", opt.model_path},
                                 {"model_metadata", policy.metadata},
                                 {"env", env_name},
                                 {"runs", opt.runs},
                                 {"seed", opt.seed},
                                 {"kernels", std::string(kernels::isa_name(kernels::active_isa()))},
                                 {"started_at", started},
                                 {"finished_at", iso_now()}});
    return kExitOk;
}

// ---------------------------------------------------------------------------
// cross-eval
// ---------------------------------------------------------------------------

struct CrossEvalOptions {
    std::string models_dir;
    std::vector<std::string> env_names;
    std::size_t runs = 10;
    std::uint64_t seed = 0;
    std::string out_dir;
};

int cmd_cross_eval(const CrossEvalOptions& opt, const CommonOptions& common) {
    std::vector<fs::path> models;
    if (fs::is_directory(opt.models_dir)) {
        for (const auto& entry : fs::directory_iterator(opt.models_dir)) {
            if (entry.path().extension() == ".drlc") models.push_back(entry.path());
        }
    }
    std::sort(models.begin(), models.end());
    if (models.empty()) {
        std::cerr << "error: no .drlc checkpoints found in '" << opt.models_dir << "'\n";
        return kExitUsage;
    }
    if (opt.env_names.empty()) {
        std::cerr << "error: --envs requires at least one scenario\n";
        return kExitUsage;
    }
    const fs::path out_dir(opt.out_dir);
    fs::create_directories(out_dir / "cells");
    const std::string started = iso_now();

    struct Row {
        std::string model, algo, train_env;
        std::map<std::string, metrics::AggregateReport> cells;
    };
    std::vector<Row> rows;
    for (const fs::path& model : models) {
        EvalPolicy policy;
        try {
            policy = policy_from_checkpoint(model.string());
        } catch (const CorruptCheckpointError& e) {
            std::cerr << "error: unusable checkpoint " << model << ": " << e.what() << '\n';
            return kExitArtifact;
        }
        Row row{model.stem().string(), policy.algorithm, policy.train_env, {}};
        for (const std::string& env_name : opt.env_names) {
            EvalOptions cell;
            cell.model_path = model.string();
            cell.env_name = env_name;
            cell.runs = opt.runs;
            cell.seed = opt.seed;
            std::vector<metrics::EpisodeMetrics> episodes;
            const int rc = eval_into(cell, common, policy, episodes);
            if (rc != kExitOk) return rc;
            const metrics::AggregateReport report = metrics::aggregate(episodes);
            row.cells[env_name] = report;
            metrics::export_report(
                report, (out_dir / "cells" / (row.model + "_" + env_name + ".csv")).string(),
                metrics::ReportFormat::csv);
        }
        rows.push_back(std::move(row));
    }

    const std::vector<std::pair<std::string, std::function<double(const metrics::AggregateReport&)>>>
        indicators = {
            {"speed", [](const auto& r) { return r.avg_speed; }},
            {"pk_jerk", [](const auto& r) { return r.peak_jerk; }},
            {"tot_jerk", [](const auto& r) { return r.total_jerk; }},
            {"tot_distance", [](const auto& r) { return r.total_distance; }},
            {"tot_steering", [](const auto& r) { return r.total_steering; }},
            {"runtime", [](const auto& r) { return r.runtime; }},
            {"onlane_rate", [](const auto& r) { return r.onlane_rate; }},
            {"col_rate", [](const auto& r) { return r.collision_rate; }},
        };
    for (const auto& [name, get] : indicators) {
        std::ofstream out(out_dir / ("matrix_" + name + ".csv"));
        out << "model,algo,train_env";
        for (const std::string& env_name : opt.env_names) out << ',' << env_name;
        out << '\n';
        char buf[64];
        for (const Row& row : rows) {
            out << row.model << ',' << row.algo << ',' << row.train_env;
            for (const std::string& env_name : opt.env_names) {
                std::snprintf(buf, sizeof(buf), "%.6f", get(row.cells.at(env_name)));
                out << ',' << buf;
            }
            out << '\n';
        }
    }
    write_manifest(out_dir, json{{"command", "cross-eval"},
                                 {"models_dir", opt.models_dir},
                                 {"envs", opt.env_names},
                                 {"runs", opt.runs},
                                 {"seed", opt.seed},
                                 {"kernels", std::string(kernels::isa_name(kernels::active_isa()))},
                                 {"started_at", started},
                                 {"finished_at", iso_now()}});
    return kExitOk;
}

int cmd_export_fixtures(const std::string& out) {
    fs::create_directories(out);
    for (const std::string& name : envs::scenario_names()) {
        const envs::Scenario scenario = envs::build_scenario(name);
        std::ofstream file(fs::path(out) / (name + ".json"));
        file << envs::scenario_to_json(scenario).dump(2) << '\n';
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"2D driving simulator and DRL toolkit"};
    app.require_subcommand(1);

    CommonOptions common;
    app.add_option("--config", common.config_path, "JSON config file (flags take precedence)");
    app.add_option("--fixtures", common.fixtures_dir,
                   "scenario fixture directory (overrides DRLC_FIXTURES)");
    app.add_option("--kernels", common.kernels, "force kernel ISA")
        ->check(CLI::IsMember({"scalar", "avx2"}));

    const std::vector<std::string> env_choices = envs::scenario_names();

    TrainOptions train;
    CLI::App* train_cmd = app.add_subcommand("train", "train models");
    train_cmd->add_option("--env", train.env_name, "scenario")
        ->required()
        ->check(CLI::IsMember(env_choices));
    train_cmd->add_option("--algo", train.algo, "algorithm")
        ->check(CLI::IsMember({"dqn", "trpo"}));
    train_cmd->add_option("--reward", train.reward, "reward function")
        ->check(CLI::IsMember({"baseline", "modified"}));
    train_cmd->add_option("--iterations", train.iterations, "environment steps per model");
    train_cmd->add_option("--seed", train.seed, "base seed");
    train_cmd->add_option("--repeat", train.repeat, "independently seeded models");
    train_cmd->add_option("--out", train.out_dir, "output directory")->required();
    auto opt_wrap = [&](auto& slot, CLI::App* cmd, const char* flag, const char* help) {
        using T = typename std::decay_t<decltype(slot)>::value_type;
        cmd->add_option_function<T>(
            flag, [&slot](const T& v) { slot = v; }, help);
    };
    opt_wrap(train.traffic, train_cmd, "--traffic", "surrounding vehicle count");
    opt_wrap(train.max_steps, train_cmd, "--max-steps", "episode step limit");
    opt_wrap(train.spawn, train_cmd, "--spawn", "spawn mode (fixed|randomized)");
    opt_wrap(train.lr, train_cmd, "--lr", "DQN learning rate");
    opt_wrap(train.train_freq, train_cmd, "--train-freq", "DQN steps between updates");
    opt_wrap(train.batch_steps, train_cmd, "--batch-steps", "TRPO rollout batch size");
    opt_wrap(train.value_lr, train_cmd, "--value-lr", "TRPO value-net learning rate");
    opt_wrap(train.delta_kl, train_cmd, "--delta-kl", "TRPO trust-region bound");

    EvalOptions eval;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
    eval_cmd->add_option("--model", eval.model_path, "checkpoint path")->required();
    eval_cmd->add_option("--env", eval.env_name, "scenario (default: training scenario)")
        ->check(CLI::IsMember(env_choices));
    eval_cmd->add_option("--runs", eval.runs, "evaluation episodes");
    eval_cmd->add_option("--seed", eval.seed, "base episode seed");
    eval_cmd->add_option("--out", eval.out_dir, "output directory")->required();
    eval_cmd->add_flag("--trace", eval.trace, "write per-step trace CSVs");
    opt_wrap(eval.min_speed, eval_cmd, "--min-speed", "immobility threshold m/s");
    opt_wrap(eval.max_steps, eval_cmd, "--max-steps", "episode step limit");
    opt_wrap(eval.traffic, eval_cmd, "--traffic", "surrounding vehicle count");
    opt_wrap(eval.spawn, eval_cmd, "--spawn", "spawn mode (fixed|randomized)");

    CrossEvalOptions cross;
    CLI::App* cross_cmd = app.add_subcommand("cross-eval", "evaluate models across scenarios");
    cross_cmd->add_option("--models", cross.models_dir, "directory of .drlc checkpoints")
        ->required();
    cross_cmd->add_option("--envs", cross.env_names, "scenario list")
        ->required()
        ->delimiter(',');
    cross_cmd->add_option("--runs", cross.runs, "episodes per cell");
    cross_cmd->add_option("--seed", cross.seed, "base episode seed");
    cross_cmd->add_option("--out", cross.out_dir, "output directory")->required();

    std::string fixtures_out = "fixtures";
    CLI::App* export_cmd = app.add_subcommand("export-fixtures", "write scenario JSON fixtures");
    export_cmd->add_option("--out", fixtures_out, "output directory");

    try {
        std::vector<std::string> reversed_args(args.rbegin(), args.rend());
        app.parse(reversed_args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help();
            return kExitOk;
        }
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        apply_kernel_choice(common.kernels);
        if (train_cmd->parsed()) return cmd_train(train, common);
        if (eval_cmd->parsed()) return cmd_eval(eval, common);
        if (cross_cmd->parsed()) return cmd_cross_eval(cross, common);
        if (export_cmd->parsed()) return cmd_export_fixtures(fixtures_out);
    } catch (const CorruptCheckpointError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitArtifact;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const NotFoundError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace drlsim::cli
