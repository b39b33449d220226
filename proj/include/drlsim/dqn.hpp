#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drlsim/envs.hpp"
#include "drlsim/mlp.hpp"

namespace drlsim::agents {

struct TrainLogRow {
    std::size_t iteration = 0;         // environment steps so far
    double episode_return = 0.0;
    double loss_or_surrogate = 0.0;
    double kl = 0.0;
    double epsilon_or_std = 0.0;
};

struct TrainingLog {
    std::vector<TrainLogRow> rows;
    void write_csv(const std::string& path) const;
};

/// MDP transition. `done` records true termination only; time-limit cuts
/// keep done = false so the target still bootstraps.
struct Transition {
    envs::Observation s;
    std::size_t action_index = 0;  // discrete (DQN)
    dynamics::Action action;       // continuous (TRPO)
    double r = 0.0;
    envs::Observation s_next;
    bool done = false;
};

/// Fixed-capacity ring buffer with uniform sampling.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }

    /// Uniform sample of `batch` transitions; throws ContractViolation when
    /// size() < batch.
    std::vector<const Transition*> sample(Rng& rng, std::size_t batch) const;

private:
    std::size_t capacity_;
    std::size_t size_ = 0;
    std::size_t head_ = 0;
    std::vector<Transition> ring_;
};

struct DqnConfig {
    std::vector<std::size_t> hidden = {128, 128};
    double gamma = 0.99;
    std::size_t buffer_capacity = 50000;
    std::size_t batch_size = 64;
    double lr = 5e-4;
    double momentum = 0.9;
    double grad_clip = 10.0;
    double eps_start = 1.0;
    double eps_end = 0.05;
    double eps_decay_fraction = 0.3;   // of total iterations
    std::size_t target_copy_every = 1000;  // env steps between hard copies
    std::size_t train_freq = 4;            // env steps between gradient steps
    std::size_t learn_start = 1000;        // buffered steps before learning
};

struct DqnResult {
    MlpParams q_net;
    TrainingLog log;
};

/// Index of the max-Q action; ties go to the lowest index.
std::size_t greedy_action(const MlpParams& q_net, const envs::Observation& obs);

/// Trains a Q-network for `iterations` environment steps. The environment
/// config must use a grid action space (std::invalid_argument otherwise).
/// Fully deterministic in (configs, iterations, seed).
DqnResult dqn_train(const envs::EnvConfig& env_config, const DqnConfig& config,
                    std::size_t iterations, std::uint64_t seed,
                    const std::optional<std::string>& fixtures_dir = std::nullopt);

}  // namespace drlsim::agents
