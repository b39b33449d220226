#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "drlsim/dqn.hpp"  // TrainingLog
#include "drlsim/envs.hpp"
#include "drlsim/mlp.hpp"

namespace drlsim::agents {

/// Tanh-squashed diagonal Gaussian over (steering, acceleration): the mean
/// network emits pre-squash means; samples are bound * tanh(u) with
/// u ~ N(mu, sigma). std = exp(log_std), clamped into [1e-3, 2].
struct GaussianPolicy {
    MlpParams mean_net;  // output dim 2, pre-squash
    std::array<float, 2> log_std{-0.5f, -0.5f};

    static constexpr std::array<double, 2> kBounds = {dynamics::kSteeringBound,
                                                      dynamics::kAccelBound};
    static constexpr double kLogStdMin = -6.907755278982137;  // ln 1e-3
    static constexpr double kLogStdMax = 0.6931471805599453;  // ln 2

    std::array<double, 2> stddev() const;
    std::array<double, 2> mean_raw(const envs::Observation& obs) const;

    /// Deterministic evaluation action: bounds * tanh(mean).
    dynamics::Action mean_action(const envs::Observation& obs) const;

    struct Sample {
        dynamics::Action action;
        std::array<double, 2> presquash;
        double logprob = 0.0;  // pre-squash Gaussian density (no Jacobian)
    };
    Sample sample(const envs::Observation& obs, Rng& rng) const;

    void clamp_log_std();
};

/// Log density of `action` under the squashed policy, including the
/// tanh log-det-Jacobian correction.
double gaussian_logprob(const GaussianPolicy& policy, const envs::Observation& obs,
                        const dynamics::Action& action);

/// Pre-squash diagonal Gaussian log density (the Jacobian term cancels in
/// probability ratios, so the training path uses this form).
double presquash_logprob(const std::array<double, 2>& mean, const std::array<double, 2>& std,
                         const std::array<double, 2>& u);

/// Generalized advantage estimation.
///   delta_t = r_t + gamma * next_values[t] * (1 - terminal_t) - values[t]
///   A_t     = delta_t + gamma * lambda * (1 - boundary_t) * A_{t+1}
/// `terminal` marks true episode ends (no bootstrap); `boundary` marks any
/// episode end (truncation included) and cuts the lambda chain. Returns
/// (advantages, returns = advantages + values).
std::pair<std::vector<double>, std::vector<double>> gae(
    const std::vector<double>& rewards, const std::vector<double>& values,
    const std::vector<double>& next_values, const std::vector<std::uint8_t>& terminal,
    const std::vector<std::uint8_t>& boundary, double gamma, double lambda);

/// Conjugate gradient for SPD operators. Stops at `tolerance` residual norm
/// or the iteration cap; throws NumericalError on non-finite intermediates.
std::vector<double> conjugate_gradient(
    const std::function<std::vector<double>(const std::vector<double>&)>& apply,
    const std::vector<double>& b, std::size_t iterations, double tolerance);

struct RolloutBatch {
    std::vector<envs::Observation> observations;
    std::vector<std::array<double, 2>> presquash;  // sampled u
    std::vector<double> rewards;
    std::vector<double> values;
    std::vector<double> next_values;
    std::vector<double> logp_old;  // pre-squash form
    std::vector<std::uint8_t> terminal;
    std::vector<std::uint8_t> boundary;
    std::vector<double> advantages;  // normalized before the update
    std::vector<double> returns;
    std::vector<double> episode_returns;  // finished episodes, for logging

    std::size_t size() const { return observations.size(); }
    void finish_advantages(double gamma, double lambda);  // gae + normalization
};

struct TrpoConfig {
    std::vector<std::size_t> policy_hidden = {64, 64};
    std::vector<std::size_t> value_hidden = {64, 64};
    double gamma = 0.99;
    double lambda = 0.95;
    double delta_kl = 0.01;
    std::size_t batch_steps = 4096;
    std::size_t cg_iterations = 10;
    double cg_damping = 0.1;
    double cg_tolerance = 1e-10;
    double backtrack_coef = 0.8;
    std::size_t backtrack_limit = 10;
    std::size_t value_epochs = 5;
    double value_lr = 3e-3;
    std::size_t value_batch = 64;
    double value_momentum = 0.9;
    double value_grad_clip = 10.0;
    double init_log_std = -0.5;
};

struct TrpoDiagnostics {
    bool accepted = false;
    double kl = 0.0;                    // measured KL(old || new) after the step
    double surrogate_improvement = 0.0;
    double grad_norm = 0.0;
    std::size_t backtracks = 0;
    double mean_std = 0.0;
};

/// One natural-gradient update: CG on the (damped) Fisher operator, step
/// scaled to the KL budget, backtracking line search that accepts only when
/// the surrogate improves and measured KL <= 1.5 * delta_kl. A rejected
/// search leaves the policy bitwise unchanged. The value network is then fit
/// to the returns. Throws NumericalError (policy unchanged) on a non-finite
/// surrogate.
TrpoDiagnostics trpo_update(GaussianPolicy& policy, MlpParams& value_net,
                            const RolloutBatch& batch, const TrpoConfig& config, Rng& rng);

struct TrpoResult {
    GaussianPolicy policy;
    MlpParams value_net;
    TrainingLog log;
};

/// On-policy training for `iterations` environment steps (continuous action
/// space required). Deterministic in (configs, iterations, seed).
TrpoResult trpo_train(const envs::EnvConfig& env_config, const TrpoConfig& config,
                      std::size_t iterations, std::uint64_t seed,
                      const std::optional<std::string>& fixtures_dir = std::nullopt);

}  // namespace drlsim::agents
