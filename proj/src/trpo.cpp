#include "drlsim/trpo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "drlsim/errors.hpp"
#include "drlsim/kernels.hpp"

namespace drlsim::agents {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

// Numerically stable log(1 - tanh(u)^2) = 2*(log 2 - |u| - log(1 + e^(-2|u|))).
double log_one_minus_tanh_sq(double u) {
    const double a = std::abs(u);
    return 2.0 * (std::log(2.0) - a - std::log1p(std::exp(-2.0 * a)));
}

}  // namespace

std::array<double, 2> GaussianPolicy::stddev() const {
    return {std::clamp(std::exp(static_cast<double>(log_std[0])), 1e-3, 2.0),
            std::clamp(std::exp(static_cast<double>(log_std[1])), 1e-3, 2.0)};
}

std::array<double, 2> GaussianPolicy::mean_raw(const envs::Observation& obs) const {
    const std::vector<double> out = mlp_forward(mean_net, obs);
    return {out[0], out[1]};
}

dynamics::Action GaussianPolicy::mean_action(const envs::Observation& obs) const {
    const auto mu = mean_raw(obs);
    return dynamics::Action(kBounds[0] * std::tanh(mu[0]), kBounds[1] * std::tanh(mu[1]));
}

GaussianPolicy::Sample GaussianPolicy::sample(const envs::Observation& obs, Rng& rng) const {
    const auto mu = mean_raw(obs);
    const auto sigma = stddev();
    Sample s;
    for (int d = 0; d < 2; ++d) s.presquash[d] = mu[d] + sigma[d] * rng.normal();
    s.action = dynamics::Action(kBounds[0] * std::tanh(s.presquash[0]),
                                kBounds[1] * std::tanh(s.presquash[1]));
    s.logprob = presquash_logprob(mu, sigma, s.presquash);
    return s;
}

void GaussianPolicy::clamp_log_std() {
    for (float& v : log_std)
        v = std::clamp(v, static_cast<float>(kLogStdMin), static_cast<float>(kLogStdMax));
}

double presquash_logprob(const std::array<double, 2>& mean, const std::array<double, 2>& std,
                         const std::array<double, 2>& u) {
    double lp = 0.0;
    for (int d = 0; d < 2; ++d) {
        const double z = (u[d] - mean[d]) / std[d];
        lp += -0.5 * z * z - std::log(std[d]) - 0.5 * kLog2Pi;
    }
    return lp;
}

double gaussian_logprob(const GaussianPolicy& policy, const envs::Observation& obs,
                        const dynamics::Action& action) {
    const auto mu = policy.mean_raw(obs);
    const auto sigma = policy.stddev();
    const std::array<double, 2> scaled = {action.steering / GaussianPolicy::kBounds[0],
                                          action.accel / GaussianPolicy::kBounds[1]};
    std::array<double, 2> u;
    for (int d = 0; d < 2; ++d) u[d] = std::atanh(std::clamp(scaled[d], -0.999999, 0.999999));
    double lp = presquash_logprob(mu, sigma, u);
    for (int d = 0; d < 2; ++d)
        lp -= std::log(GaussianPolicy::kBounds[d]) + log_one_minus_tanh_sq(u[d]);
    return lp;
}

std::pair<std::vector<double>, std::vector<double>> gae(
    const std::vector<double>& rewards, const std::vector<double>& values,
    const std::vector<double>& next_values, const std::vector<std::uint8_t>& terminal,
    const std::vector<std::uint8_t>& boundary, double gamma, double lambda) {
    const std::size_t n = rewards.size();
    if (values.size() != n || next_values.size() != n || terminal.size() != n ||
        boundary.size() != n)
        throw ContractViolation("gae inputs must have equal lengths");
    std::vector<double> advantages(n), returns(n);
    double chain = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        const double not_terminal = terminal[i] ? 0.0 : 1.0;
        const double delta = rewards[i] + gamma * next_values[i] * not_terminal - values[i];
        chain = delta + gamma * lambda * (boundary[i] ? 0.0 : 1.0) * chain;
        advantages[i] = chain;
        returns[i] = chain + values[i];
    }
    return {std::move(advantages), std::move(returns)};
}

std::vector<double> conjugate_gradient(
    const std::function<std::vector<double>(const std::vector<double>&)>& apply,
    const std::vector<double>& b, std::size_t iterations, double tolerance) {
    const std::size_t n = b.size();
    const auto& ops = kernels::ops();
    std::vector<double> x(n, 0.0), r = b, p = b;
    double rs = ops.dot(r.data(), r.data(), n);
    if (!std::isfinite(rs)) throw NumericalError("conjugate_gradient: non-finite rhs");
    if (std::sqrt(rs) <= tolerance) return x;
    for (std::size_t it = 0; it < iterations; ++it) {
        const std::vector<double> ap = apply(p);
        const double pap = ops.dot(p.data(), ap.data(), n);
        if (!std::isfinite(pap) || pap <= 0.0)
            throw NumericalError("conjugate_gradient: operator not positive definite");
        const double alpha = rs / pap;
        ops.axpy(alpha, p.data(), x.data(), n);
        ops.axpy(-alpha, ap.data(), r.data(), n);
        const double rs_new = ops.dot(r.data(), r.data(), n);
        if (!std::isfinite(rs_new)) throw NumericalError("conjugate_gradient: non-finite residual");
        if (std::sqrt(rs_new) <= tolerance) break;
        const double beta = rs_new / rs;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        rs = rs_new;
    }
    return x;
}

void RolloutBatch::finish_advantages(double gamma, double lambda) {
    auto [adv, ret] = gae(rewards, values, next_values, terminal, boundary, gamma, lambda);
    returns = std::move(ret);
    advantages = std::move(adv);
    if (advantages.size() > 1) {
        const double n = static_cast<double>(advantages.size());
        double mean = 0.0;
        for (const double a : advantages) mean += a;
        mean /= n;
        double var = 0.0;
        for (const double a : advantages) var += (a - mean) * (a - mean);
        var /= n;
        const double inv = 1.0 / std::sqrt(var + 1e-8);
        for (double& a : advantages) a = (a - mean) * inv;
    }
}

namespace {

// Flat parameter vector layout: [mean-net params..., log_std x2].
struct FlatSpace {
    std::size_t mean_size = 0;
    std::size_t total() const { return mean_size + 2; }
};

std::vector<double> to_flat(const FlatSpace& space, const MlpGrads& mean,
                            const std::array<double, 2>& log_std) {
    std::vector<double> flat(space.total());
    mean.to_flat(std::span<double>(flat.data(), space.mean_size));
    flat[space.mean_size] = log_std[0];
    flat[space.mean_size + 1] = log_std[1];
    return flat;
}

GaussianPolicy apply_delta(const GaussianPolicy& base, const FlatSpace& space,
                           const std::vector<double>& delta, double coef) {
    GaussianPolicy out = base;
    std::size_t k = 0;
    for (Layer& layer : out.mean_net.layers) {
        for (float& w : layer.weights)
            w = static_cast<float>(static_cast<double>(w) + coef * delta[k++]);
        for (float& bv : layer.bias)
            bv = static_cast<float>(static_cast<double>(bv) + coef * delta[k++]);
    }
    out.log_std[0] = static_cast<float>(static_cast<double>(out.log_std[0]) +
                                        coef * delta[space.mean_size]);
    out.log_std[1] = static_cast<float>(static_cast<double>(out.log_std[1]) +
                                        coef * delta[space.mean_size + 1]);
    return out;
}

double surrogate_of(const GaussianPolicy& policy, const RolloutBatch& batch) {
    const auto sigma = policy.stddev();
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto mu = policy.mean_raw(batch.observations[i]);
        const double lp = presquash_logprob(mu, sigma, batch.presquash[i]);
        total += std::exp(lp - batch.logp_old[i]) * batch.advantages[i];
    }
    return total / static_cast<double>(batch.size());
}

// Mean closed-form KL(old || candidate) over the batch states.
double measured_kl(const std::vector<std::array<double, 2>>& mu_old,
                   const std::array<double, 2>& sigma_old, const GaussianPolicy& candidate,
                   const RolloutBatch& batch) {
    const auto sigma_new = candidate.stddev();
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto mu_new = candidate.mean_raw(batch.observations[i]);
        for (int d = 0; d < 2; ++d) {
            const double dm = mu_old[i][d] - mu_new[d];
            total += std::log(sigma_new[d] / sigma_old[d]) +
                     (sigma_old[d] * sigma_old[d] + dm * dm) /
                         (2.0 * sigma_new[d] * sigma_new[d]) -
                     0.5;
        }
    }
    return total / static_cast<double>(batch.size());
}

}  // namespace

TrpoDiagnostics trpo_update(GaussianPolicy& policy, MlpParams& value_net,
                            const RolloutBatch& batch, const TrpoConfig& config, Rng& rng) {
    if (batch.size() == 0) throw std::invalid_argument("empty rollout batch");
    const std::size_t n_samples = batch.size();
    const auto& ops = kernels::ops();

    TrpoDiagnostics diag;
    const auto sigma_old = policy.stddev();
    diag.mean_std = 0.5 * (sigma_old[0] + sigma_old[1]);

    // Forward caches and old means at the current parameters.
    std::vector<ForwardCache> caches(n_samples);
    std::vector<std::array<double, 2>> mu_old(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const auto out = mlp_forward(policy.mean_net, batch.observations[i], caches[i]);
        mu_old[i] = {out[0], out[1]};
    }

    const double surrogate_old = surrogate_of(policy, batch);
    if (!std::isfinite(surrogate_old)) throw NumericalError("non-finite surrogate");

    FlatSpace space;
    {
        MlpGrads proto = MlpGrads::zeros_like(policy.mean_net);
        space.mean_size = proto.flat_size();
    }

    // Policy gradient of the surrogate at the current parameters.
    MlpGrads g_mean = MlpGrads::zeros_like(policy.mean_net);
    std::array<double, 2> g_logstd{0.0, 0.0};
    {
        const double inv_n = 1.0 / static_cast<double>(n_samples);
        std::array<double, 2> upstream;
        for (std::size_t i = 0; i < n_samples; ++i) {
            for (int d = 0; d < 2; ++d) {
                const double z = (batch.presquash[i][d] - mu_old[i][d]) / sigma_old[d];
                upstream[d] = batch.advantages[i] * inv_n * z / sigma_old[d];
                g_logstd[d] += batch.advantages[i] * inv_n * (z * z - 1.0);
            }
            mlp_backward(policy.mean_net, caches[i], upstream, g_mean);
        }
    }
    std::vector<double> g = to_flat(space, g_mean, g_logstd);
    diag.grad_norm = std::sqrt(ops.dot(g.data(), g.data(), g.size()));
    if (!std::isfinite(diag.grad_norm)) throw NumericalError("non-finite policy gradient");

    const auto fit_value = [&] {
        SgdMomentum vopt(config.value_lr, config.value_momentum, config.value_grad_clip);
        std::vector<std::size_t> order(n_samples);
        std::iota(order.begin(), order.end(), 0);
        ForwardCache cache;
        for (std::size_t epoch = 0; epoch < config.value_epochs; ++epoch) {
            for (std::size_t i = n_samples; i > 1; --i)
                std::swap(order[i - 1], order[rng.uniform_index(i)]);
            for (std::size_t start = 0; start + config.value_batch <= n_samples;
                 start += config.value_batch) {
                MlpGrads grads = MlpGrads::zeros_like(value_net);
                for (std::size_t k = start; k < start + config.value_batch; ++k) {
                    const std::size_t i = order[k];
                    const double v = mlp_forward(value_net, batch.observations[i], cache)[0];
                    const double upstream =
                        2.0 * (v - batch.returns[i]) / static_cast<double>(config.value_batch);
                    mlp_backward(value_net, cache, std::span<const double>(&upstream, 1), grads);
                }
                vopt.apply(value_net, grads);
            }
        }
    };

    if (diag.grad_norm < 1e-10) {  // constant surrogate (e.g. all-zero advantages)
        fit_value();
        return diag;
    }

    // Damped Fisher-vector product. The Fisher blocks are
    // J_mu^T diag(1/sigma^2) J_mu for the mean network (computed by a
    // forward-mode pass through J and a reverse pass through J^T) and 2 per
    // log_std coordinate; identical to the KL-Hessian at the old parameters.
    const auto fvp = [&](const std::vector<double>& v) {
        MlpGrads v_mean = MlpGrads::zeros_like(policy.mean_net);
        v_mean.from_flat(std::span<const double>(v.data(), space.mean_size));
        MlpGrads hv_mean = MlpGrads::zeros_like(policy.mean_net);
        const double inv_n = 1.0 / static_cast<double>(n_samples);
        std::array<double, 2> upstream;
        for (std::size_t i = 0; i < n_samples; ++i) {
            const std::vector<double> tangent = mlp_jvp(policy.mean_net, caches[i], v_mean);
            for (int d = 0; d < 2; ++d)
                upstream[d] = tangent[d] * inv_n / (sigma_old[d] * sigma_old[d]);
            mlp_backward(policy.mean_net, caches[i], upstream, hv_mean);
        }
        std::array<double, 2> hv_logstd = {2.0 * v[space.mean_size],
                                           2.0 * v[space.mean_size + 1]};
        std::vector<double> out = to_flat(space, hv_mean, hv_logstd);
        ops.axpy(config.cg_damping, v.data(), out.data(), out.size());
        return out;
    };

    const std::vector<double> dir =
        conjugate_gradient(fvp, g, config.cg_iterations, config.cg_tolerance);
    const std::vector<double> hd = fvp(dir);
    const double dhd = ops.dot(dir.data(), hd.data(), dir.size());
    if (!(dhd > 0.0) || !std::isfinite(dhd))
        throw NumericalError("non-positive curvature in the step direction");
    const double step_scale = std::sqrt(2.0 * config.delta_kl / dhd);

    const GaussianPolicy saved = policy;
    double coef = step_scale;
    for (std::size_t k = 0; k < config.backtrack_limit; ++k, coef *= config.backtrack_coef) {
        GaussianPolicy candidate = apply_delta(saved, space, dir, coef);
        const double surrogate_new = surrogate_of(candidate, batch);
        if (!std::isfinite(surrogate_new)) continue;
        const double kl = measured_kl(mu_old, sigma_old, candidate, batch);
        if (surrogate_new > surrogate_old && kl <= 1.5 * config.delta_kl) {
            candidate.clamp_log_std();
            policy = std::move(candidate);
            diag.accepted = true;
            diag.kl = kl;
            diag.surrogate_improvement = surrogate_new - surrogate_old;
            diag.backtracks = k;
            break;
        }
    }
    if (!diag.accepted) policy = saved;  // bitwise restore

    fit_value();
    return diag;
}

TrpoResult trpo_train(const envs::EnvConfig& env_config, const TrpoConfig& config,
                      std::size_t iterations, std::uint64_t seed,
                      const std::optional<std::string>& fixtures_dir) {
    if (env_config.action.kind != envs::ActionKind::continuous)
        throw std::invalid_argument("trpo_train requires a continuous action space");

    envs::Environment env(env_config, fixtures_dir);
    Rng rng(Rng::mix(seed, 0x7270));

    TrpoResult result;
    result.policy.mean_net = make_mlp({envs::kObservationDim, config.policy_hidden, 2}, rng);
    zero_output_layer(result.policy.mean_net);
    result.policy.log_std = {static_cast<float>(config.init_log_std),
                             static_cast<float>(config.init_log_std)};
    result.value_net = make_mlp({envs::kObservationDim, config.value_hidden, 1}, rng);

    std::size_t episode_index = 0;
    envs::Observation obs = env.reset(Rng::mix(seed, episode_index));
    double episode_return = 0.0;
    std::size_t steps_done = 0;

    while (steps_done < iterations) {
        const std::size_t batch_steps = std::min(config.batch_steps, iterations - steps_done);
        RolloutBatch batch;
        batch.observations.reserve(batch_steps);
        for (std::size_t t = 0; t < batch_steps; ++t) {
            const GaussianPolicy::Sample sample = result.policy.sample(obs, rng);
            const double value = mlp_forward(result.value_net, obs)[0];
            const envs::StepResult sr = env.step(sample.action);
            episode_return += sr.reward;

            batch.observations.push_back(obs);
            batch.presquash.push_back(sample.presquash);
            batch.logp_old.push_back(sample.logprob);
            batch.rewards.push_back(sr.reward);
            batch.values.push_back(value);
            batch.terminal.push_back(sr.terminated ? 1 : 0);
            batch.boundary.push_back(sr.terminated || sr.truncated ? 1 : 0);
            if (sr.terminated) {
                batch.next_values.push_back(0.0);
            } else {
                batch.next_values.push_back(mlp_forward(result.value_net, sr.observation)[0]);
            }

            if (sr.terminated || sr.truncated) {
                batch.episode_returns.push_back(episode_return);
                episode_return = 0.0;
                obs = env.reset(Rng::mix(seed, ++episode_index));
            } else {
                obs = sr.observation;
            }
        }
        steps_done += batch_steps;
        batch.finish_advantages(config.gamma, config.lambda);

        const TrpoDiagnostics diag = trpo_update(result.policy, result.value_net, batch, config, rng);
        const double mean_return =
            batch.episode_returns.empty()
                ? episode_return
                : std::accumulate(batch.episode_returns.begin(), batch.episode_returns.end(),
                                  0.0) /
                      static_cast<double>(batch.episode_returns.size());
        result.log.rows.push_back(
            {steps_done, mean_return, diag.surrogate_improvement, diag.kl, diag.mean_std});
    }
    return result;
}

}  // namespace drlsim::agents
