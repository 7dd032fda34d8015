#pragma once

// Run configuration: a single JSON document covering environment, model,
// RL, training and evaluation knobs. Every run writes its resolved config
// next to its outputs so that (config, seed) reproduces it exactly.

#include "xmtf/env.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace xmtf {

enum class Ablation { full, no_outer, no_inner };

std::string to_string(Ablation a);
Ablation ablation_from_string(const std::string& name);

struct ModelConfig {
    std::vector<int> inner_hidden = {32, 16};
    // Five-layer MLP for actors and critics: four hidden layers + output.
    std::vector<int> actor_critic_hidden = {64, 64, 32, 16};
    double action_low = -1.0;
    double action_high = 1.0;
};

struct RlConfig {
    double gamma = 0.9;
    double tau = 0.005;
    double explore_sigma = 0.1;
    bool twin_critic = false;
    int policy_delay = 2;      // used when twin_critic is on
    int buffer_capacity = 100000;
    int batch_size = 256;
    double reward_scale = 0.01;  // rewards are seconds; conditions critic targets
};

struct TrainSection {
    double lambda = 0.4;
    double actor_lr = 1e-4;
    double critic_lr = 2e-4;
    double inner_lr = 2e-4;
    int sessions = 1600;
    int warmup_sessions = 400;  // monotonicity-only inner updates
    int inner_requests_per_step = 4;
    int pair_cap = 256;
    Ablation ablation = Ablation::full;
    int eval_every = 400;            // periodic probe during training
    int eval_probe_sessions = 16;
    bool checkpoint_buffer = false;  // persist transitions for exact resume
};

struct EvalConfig {
    int trials = 20;
    int sessions_per_trial = 64;
};

struct CemSection {
    int population = 64;
    double elite_fraction = 0.125;
    int iterations = 40;
    int eval_sessions = 8;  // sessions averaged per objective evaluation
    double init_mean = 1.0;
    double init_std = 0.5;
    double coef_low = 0.05;
    double coef_high = 2.0;
};

struct RunConfig {
    std::uint64_t seed = 1;
    env::SessionConfig env;
    ModelConfig model;
    RlConfig rl;
    TrainSection train;
    EvalConfig eval;
    CemSection cem;
    double log_offset_beta = 0.01;

    int feedback_count() const { return env.feedback_count(); }
    int state_dim() const { return env.state_dim(); }
};

/// Thrown for malformed or out-of-contract configuration input.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

RunConfig default_config();
void validate(const RunConfig& config);

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

RunConfig load_config(const std::filesystem::path& path);
void write_config(const RunConfig& config, const std::filesystem::path& path);

}  // namespace xmtf
