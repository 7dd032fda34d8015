#include "xmtf/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace xmtf {

using nlohmann::json;

std::string to_string(Ablation a) {
    switch (a) {
        case Ablation::full: return "full";
        case Ablation::no_outer: return "no_outer";
        case Ablation::no_inner: return "no_inner";
    }
    return "full";
}

Ablation ablation_from_string(const std::string& name) {
    if (name == "full") return Ablation::full;
    if (name == "no_outer") return Ablation::no_outer;
    if (name == "no_inner") return Ablation::no_inner;
    throw ConfigError("unknown ablation mode: " + name);
}

RunConfig default_config() {
    RunConfig config;
    config.env.interaction_weights = env::default_interaction_weights(config.env);
    return config;
}

void validate(const RunConfig& c) {
    auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
    if (c.env.sparsity.empty()) fail("env.sparsity must be non-empty");
    for (double m : c.env.sparsity)
        if (m < 0.0 || m > 1.0) fail("env.sparsity entries must lie in [0,1]");
    if (c.env.slate_size < 1 || c.env.slate_size > c.env.candidate_count)
        fail("env.slate_size must lie in [1, env.candidate_count]");
    if (c.env.t_max < 1) fail("env.t_max must be >= 1");
    if (c.env.prediction_noise < 0.0) fail("env.prediction_noise must be >= 0");
    if (c.env.long_view_index < 0 || c.env.long_view_index >= c.env.feedback_count())
        fail("env.long_view_index out of range");
    if (!c.env.interaction_weights.empty() &&
        static_cast<int>(c.env.interaction_weights.size()) != c.env.feedback_count())
        fail("env.interaction_weights length must equal the feedback count");
    if (c.env.patience_mean <= 0.0) fail("env.patience_mean must be positive");
    if (c.env.history_decay < 0.0 || c.env.history_decay >= 1.0)
        fail("env.history_decay must lie in [0,1)");

    for (int h : c.model.inner_hidden)
        if (h < 1) fail("model.inner_hidden widths must be positive");
    for (int h : c.model.actor_critic_hidden)
        if (h < 1) fail("model.actor_critic_hidden widths must be positive");
    if (c.model.action_low >= c.model.action_high)
        fail("model.action_low must be below model.action_high");

    if (c.rl.gamma < 0.0 || c.rl.gamma >= 1.0) fail("rl.gamma must lie in [0,1)");
    if (c.rl.tau <= 0.0 || c.rl.tau > 1.0) fail("rl.tau must lie in (0,1]");
    if (c.rl.explore_sigma < 0.0) fail("rl.explore_sigma must be >= 0");
    if (c.rl.buffer_capacity < 1) fail("rl.buffer_capacity must be positive");
    if (c.rl.batch_size < 1) fail("rl.batch_size must be positive");
    if (c.rl.reward_scale <= 0.0) fail("rl.reward_scale must be positive");

    if (c.train.lambda < 0.0 || c.train.lambda > 1.0) fail("train.lambda must lie in [0,1]");
    if (c.train.actor_lr <= 0.0 || c.train.critic_lr <= 0.0 || c.train.inner_lr <= 0.0)
        fail("learning rates must be positive");
    if (c.train.sessions < 0) fail("train.sessions must be >= 0");
    if (c.train.warmup_sessions < 0) fail("train.warmup_sessions must be >= 0");
    if (c.train.inner_requests_per_step < 1) fail("train.inner_requests_per_step must be >= 1");
    if (c.train.pair_cap < 1) fail("train.pair_cap must be >= 1");

    if (c.eval.trials < 1) fail("eval.trials must be >= 1");
    if (c.eval.sessions_per_trial < 1) fail("eval.sessions_per_trial must be >= 1");

    if (c.cem.population < 8) fail("cem.population must be >= 8");
    if (c.cem.elite_fraction <= 0.0 || c.cem.elite_fraction > 1.0)
        fail("cem.elite_fraction must lie in (0,1]");
    if (c.cem.iterations < 1) fail("cem.iterations must be >= 1");
    if (c.cem.eval_sessions < 1) fail("cem.eval_sessions must be >= 1");
    if (c.cem.init_std <= 0.0) fail("cem.init_std must be positive");
    if (c.cem.coef_low >= c.cem.coef_high) fail("cem.coef_low must be below cem.coef_high");
    if (c.log_offset_beta <= 0.0) fail("log_offset_beta must be positive");
}

json config_to_json(const RunConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["env"] = {{"sparsity", c.env.sparsity},
                {"long_view_index", c.env.long_view_index},
                {"candidate_count", c.env.candidate_count},
                {"slate_size", c.env.slate_size},
                {"t_max", c.env.t_max},
                {"prediction_noise", c.env.prediction_noise},
                {"tilt_strength", c.env.tilt_strength},
                {"item_noise_shape", c.env.item_noise_shape},
                {"watch_time_min", c.env.watch_time_min},
                {"watch_time_max", c.env.watch_time_max},
                {"preference_alpha", c.env.preference_alpha},
                {"patience_mean", c.env.patience_mean},
                {"patience_shape", c.env.patience_shape},
                {"kappa_gain", c.env.kappa_gain},
                {"kappa_cost", c.env.kappa_cost},
                {"interaction_weights", c.env.interaction_weights},
                {"history_decay", c.env.history_decay}};
    j["model"] = {{"inner_hidden", c.model.inner_hidden},
                  {"actor_critic_hidden", c.model.actor_critic_hidden},
                  {"action_low", c.model.action_low},
                  {"action_high", c.model.action_high}};
    j["rl"] = {{"gamma", c.rl.gamma},
               {"tau", c.rl.tau},
               {"explore_sigma", c.rl.explore_sigma},
               {"twin_critic", c.rl.twin_critic},
               {"policy_delay", c.rl.policy_delay},
               {"buffer_capacity", c.rl.buffer_capacity},
               {"batch_size", c.rl.batch_size},
               {"reward_scale", c.rl.reward_scale}};
    j["train"] = {{"lambda", c.train.lambda},
                  {"actor_lr", c.train.actor_lr},
                  {"critic_lr", c.train.critic_lr},
                  {"inner_lr", c.train.inner_lr},
                  {"sessions", c.train.sessions},
                  {"warmup_sessions", c.train.warmup_sessions},
                  {"inner_requests_per_step", c.train.inner_requests_per_step},
                  {"pair_cap", c.train.pair_cap},
                  {"ablation", to_string(c.train.ablation)},
                  {"eval_every", c.train.eval_every},
                  {"eval_probe_sessions", c.train.eval_probe_sessions},
                  {"checkpoint_buffer", c.train.checkpoint_buffer}};
    j["eval"] = {{"trials", c.eval.trials}, {"sessions_per_trial", c.eval.sessions_per_trial}};
    j["cem"] = {{"population", c.cem.population},
                {"elite_fraction", c.cem.elite_fraction},
                {"iterations", c.cem.iterations},
                {"eval_sessions", c.cem.eval_sessions},
                {"init_mean", c.cem.init_mean},
                {"init_std", c.cem.init_std},
                {"coef_low", c.cem.coef_low},
                {"coef_high", c.cem.coef_high}};
    j["log_offset_beta"] = c.log_offset_beta;
    return j;
}

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

RunConfig config_from_json(const json& j) {
    RunConfig c = default_config();
    if (!j.is_object()) throw ConfigError("top-level config must be a JSON object");
    read_field(j, "seed", c.seed);
    if (j.contains("env")) {
        const json& e = j.at("env");
        read_field(e, "sparsity", c.env.sparsity);
        read_field(e, "long_view_index", c.env.long_view_index);
        read_field(e, "candidate_count", c.env.candidate_count);
        read_field(e, "slate_size", c.env.slate_size);
        read_field(e, "t_max", c.env.t_max);
        read_field(e, "prediction_noise", c.env.prediction_noise);
        read_field(e, "tilt_strength", c.env.tilt_strength);
        read_field(e, "item_noise_shape", c.env.item_noise_shape);
        read_field(e, "watch_time_min", c.env.watch_time_min);
        read_field(e, "watch_time_max", c.env.watch_time_max);
        read_field(e, "preference_alpha", c.env.preference_alpha);
        read_field(e, "patience_mean", c.env.patience_mean);
        read_field(e, "patience_shape", c.env.patience_shape);
        read_field(e, "kappa_gain", c.env.kappa_gain);
        read_field(e, "kappa_cost", c.env.kappa_cost);
        if (e.contains("interaction_weights")) {
            read_field(e, "interaction_weights", c.env.interaction_weights);
        } else {
            c.env.interaction_weights = env::default_interaction_weights(c.env);
        }
        read_field(e, "history_decay", c.env.history_decay);
        // Re-derive weights when the sparsity changed but weights were omitted.
        if (!e.contains("interaction_weights") &&
            static_cast<int>(c.env.interaction_weights.size()) != c.env.feedback_count())
            c.env.interaction_weights = env::default_interaction_weights(c.env);
    }
    if (j.contains("model")) {
        const json& m = j.at("model");
        read_field(m, "inner_hidden", c.model.inner_hidden);
        read_field(m, "actor_critic_hidden", c.model.actor_critic_hidden);
        read_field(m, "action_low", c.model.action_low);
        read_field(m, "action_high", c.model.action_high);
    }
    if (j.contains("rl")) {
        const json& r = j.at("rl");
        read_field(r, "gamma", c.rl.gamma);
        read_field(r, "tau", c.rl.tau);
        read_field(r, "explore_sigma", c.rl.explore_sigma);
        read_field(r, "twin_critic", c.rl.twin_critic);
        read_field(r, "policy_delay", c.rl.policy_delay);
        read_field(r, "buffer_capacity", c.rl.buffer_capacity);
        read_field(r, "batch_size", c.rl.batch_size);
        read_field(r, "reward_scale", c.rl.reward_scale);
    }
    if (j.contains("train")) {
        const json& t = j.at("train");
        read_field(t, "lambda", c.train.lambda);
        read_field(t, "actor_lr", c.train.actor_lr);
        read_field(t, "critic_lr", c.train.critic_lr);
        read_field(t, "inner_lr", c.train.inner_lr);
        read_field(t, "sessions", c.train.sessions);
        read_field(t, "warmup_sessions", c.train.warmup_sessions);
        read_field(t, "inner_requests_per_step", c.train.inner_requests_per_step);
        read_field(t, "pair_cap", c.train.pair_cap);
        if (t.contains("ablation"))
            c.train.ablation = ablation_from_string(t.at("ablation").get<std::string>());
        read_field(t, "eval_every", c.train.eval_every);
        read_field(t, "eval_probe_sessions", c.train.eval_probe_sessions);
        read_field(t, "checkpoint_buffer", c.train.checkpoint_buffer);
    }
    if (j.contains("eval")) {
        read_field(j.at("eval"), "trials", c.eval.trials);
        read_field(j.at("eval"), "sessions_per_trial", c.eval.sessions_per_trial);
    }
    if (j.contains("cem")) {
        const json& m = j.at("cem");
        read_field(m, "population", c.cem.population);
        read_field(m, "elite_fraction", c.cem.elite_fraction);
        read_field(m, "iterations", c.cem.iterations);
        read_field(m, "eval_sessions", c.cem.eval_sessions);
        read_field(m, "init_mean", c.cem.init_mean);
        read_field(m, "init_std", c.cem.init_std);
        read_field(m, "coef_low", c.cem.coef_low);
        read_field(m, "coef_high", c.cem.coef_high);
    }
    read_field(j, "log_offset_beta", c.log_offset_beta);
    validate(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void write_config(const RunConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path.string());
    out << config_to_json(config).dump(2) << "\n";
}

}  // namespace xmtf
