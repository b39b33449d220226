#include "drlsim/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "drlsim/errors.hpp"

namespace drlsim::agents {

void TrainingLog::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write training log '" + path + "'");
    out << "iteration,episode_return,loss_or_surrogate,kl,epsilon_or_std\n";
    char buf[192];
    for (const TrainLogRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%.6f,%.6f\n", r.iteration,
                      r.episode_return, r.loss_or_surrogate, r.kl, r.epsilon_or_std);
        out << buf;
    }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be > 0");
    ring_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
    if (size_ < capacity_) {
        ring_.push_back(std::move(t));
        ++size_;
    } else {
        ring_[head_] = std::move(t);
    }
    head_ = (head_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(Rng& rng, std::size_t batch) const {
    if (size_ < batch) throw ContractViolation("replay buffer smaller than batch");
    std::vector<const Transition*> out(batch);
    for (std::size_t i = 0; i < batch; ++i) out[i] = &ring_[rng.uniform_index(size_)];
    return out;
}

std::size_t greedy_action(const MlpParams& q_net, const envs::Observation& obs) {
    const std::vector<double> q = mlp_forward(q_net, obs);
    return static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
}

DqnResult dqn_train(const envs::EnvConfig& env_config, const DqnConfig& config,
                    std::size_t iterations, std::uint64_t seed,
                    const std::optional<std::string>& fixtures_dir) {
    if (env_config.action.kind != envs::ActionKind::grid)
        throw std::invalid_argument("dqn_train requires a grid action space");
    const dynamics::ActionGrid grid = env_config.action.grid();

    envs::Environment env(env_config, fixtures_dir);
    Rng rng(Rng::mix(seed, 0x5147));

    Architecture arch{envs::kObservationDim, config.hidden, grid.size()};
    MlpParams q_net = make_mlp(arch, rng);
    MlpParams target = q_net;
    SgdMomentum optimizer(config.lr, config.momentum, config.grad_clip);
    ReplayBuffer buffer(config.buffer_capacity);

    TrainingLog log;
    std::size_t episode_index = 0;
    envs::Observation obs = env.reset(Rng::mix(seed, episode_index));
    double episode_return = 0.0;
    double loss_accum = 0.0;
    std::size_t loss_count = 0;

    const double decay_steps =
        std::max(1.0, config.eps_decay_fraction * static_cast<double>(iterations));
    const std::size_t learn_start = std::max(config.learn_start, config.batch_size);

    for (std::size_t step = 1; step <= iterations; ++step) {
        const double frac = std::min(1.0, static_cast<double>(step) / decay_steps);
        const double epsilon = config.eps_start + (config.eps_end - config.eps_start) * frac;

        const std::size_t action_index = rng.uniform() < epsilon
                                             ? rng.uniform_index(grid.size())
                                             : greedy_action(q_net, obs);
        const envs::StepResult result = env.step(grid.discretize(action_index));
        episode_return += result.reward;

        Transition t;
        t.s = obs;
        t.action_index = action_index;
        t.r = result.reward;
        t.s_next = result.observation;
        t.done = result.terminated;
        buffer.push(std::move(t));
        obs = result.observation;

        if (result.terminated || result.truncated) {
            log.rows.push_back({step, episode_return,
                                loss_count ? loss_accum / static_cast<double>(loss_count) : 0.0,
                                0.0, epsilon});
            loss_accum = 0.0;
            loss_count = 0;
            episode_return = 0.0;
            obs = env.reset(Rng::mix(seed, ++episode_index));
        }

        if (buffer.size() >= learn_start && step % config.train_freq == 0) {
            const auto batch = buffer.sample(rng, config.batch_size);
            MlpGrads grads = MlpGrads::zeros_like(q_net);
            double loss = 0.0;
            ForwardCache cache;
            std::vector<double> upstream(grid.size());
            for (const Transition* tr : batch) {
                double target_q = tr->r;
                if (!tr->done) {
                    const std::vector<double> next_q = mlp_forward(target, tr->s_next);
                    target_q += config.gamma * *std::max_element(next_q.begin(), next_q.end());
                }
                const std::vector<double> q = mlp_forward(q_net, tr->s, cache);
                const double td = q[tr->action_index] - target_q;
                loss += td * td;
                std::fill(upstream.begin(), upstream.end(), 0.0);
                upstream[tr->action_index] =
                    2.0 * td / static_cast<double>(config.batch_size);
                mlp_backward(q_net, cache, upstream, grads);
            }
            loss /= static_cast<double>(config.batch_size);
            optimizer.apply(q_net, grads);
            loss_accum += loss;
            ++loss_count;
        }

        if (step % config.target_copy_every == 0) target = q_net;
    }
    return {std::move(q_net), std::move(log)};
}

}  // namespace drlsim::agents
