#include "xmtf/env.hpp"

#include "xmtf/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace xmtf::env {

std::vector<double> default_interaction_weights(const SessionConfig& config) {
    const int k_count = config.feedback_count();
    std::vector<double> w(static_cast<std::size_t>(k_count));
    for (int k = 0; k < k_count; ++k) {
        double m = std::max(config.sparsity[static_cast<std::size_t>(k)], 0.02);
        w[static_cast<std::size_t>(k)] = 1.0 / (k_count * m);
    }
    if (config.long_view_index >= 0 && config.long_view_index < k_count)
        w[static_cast<std::size_t>(config.long_view_index)] = 0.0;
    return w;
}

Session::Session(SessionConfig config, std::uint64_t user_seed)
    : config_(std::move(config)), rng_(user_seed) {
    const int k_count = config_.feedback_count();
    require(k_count > 0, "SessionConfig: sparsity must be non-empty");
    require(config_.slate_size >= 1 && config_.slate_size <= config_.candidate_count,
            "SessionConfig: slate_size must lie in [1, candidate_count]");
    require(config_.t_max >= 1, "SessionConfig: t_max must be at least 1");
    require(config_.long_view_index >= 0 && config_.long_view_index < k_count,
            "SessionConfig: long_view_index out of range");

    auto weights = config_.interaction_weights.empty() ? default_interaction_weights(config_)
                                                       : config_.interaction_weights;
    require(static_cast<int>(weights.size()) == k_count,
            "SessionConfig: interaction_weights length mismatch");
    interaction_weights_ = Eigen::Map<const Vec>(weights.data(), k_count);

    // Preference over feedback types: Dirichlet via normalized gamma draws.
    std::gamma_distribution<double> pref_draw(config_.preference_alpha, 1.0);
    user_.preference = Vec(k_count);
    for (int k = 0; k < k_count; ++k) user_.preference[k] = pref_draw(rng_);
    double total = user_.preference.sum();
    if (total < 1e-12) {
        user_.preference.setConstant(1.0 / k_count);
    } else {
        user_.preference /= total;
    }

    std::gamma_distribution<double> patience_draw(config_.patience_shape,
                                                  config_.patience_mean / config_.patience_shape);
    user_.patience = std::max(patience_draw(rng_), 1e-3);
    user_.affinity_seed = user_seed;
    budget_ = user_.patience;

    // s0: profile block, empty history block, request index 0.
    state_.features = Vec::Zero(config_.state_dim());
    state_.features.head(k_count) = user_.preference;

    generate_candidates();
}

void Session::generate_candidates() {
    const int k_count = config_.feedback_count();
    const int lv = config_.long_view_index;
    candidates_.assign(static_cast<std::size_t>(config_.candidate_count), Candidate{});

    std::uniform_real_distribution<double> uniform01(0.0, 1.0);
    std::gamma_distribution<double> item_mult(config_.item_noise_shape,
                                              1.0 / config_.item_noise_shape);
    std::normal_distribution<double> pred_noise(0.0, 1.0);

    for (auto& candidate : candidates_) {
        double tilt = uniform01(rng_);  // consumption tilt: watchy vs interaction-heavy
        candidate.item.base_watch_time =
            config_.watch_time_min +
            (config_.watch_time_max - config_.watch_time_min) * tilt * tilt;
        candidate.item.true_probs = Vec(k_count);
        candidate.prediction.values = Vec(k_count);
        for (int k = 0; k < k_count; ++k) {
            double direction = (k == lv) ? (2.0 * tilt - 1.0) : (1.0 - 2.0 * tilt);
            double shape = 1.0 + config_.tilt_strength * direction;
            double p = config_.sparsity[static_cast<std::size_t>(k)] * shape * item_mult(rng_);
            p = std::clamp(p, 0.0, 1.0);
            candidate.item.true_probs[k] = p;
            double noise_scale =
                config_.sparsity[static_cast<std::size_t>(k)] * config_.prediction_noise;
            double o = p + noise_scale * pred_noise(rng_);
            candidate.prediction.values[k] = std::clamp(o, 0.0, 1.0);
        }
    }
}

Session::StepResult Session::step(const std::vector<int>& slate) {
    require(!done_, "Session::step: session already ended");
    require(static_cast<int>(slate.size()) == config_.slate_size,
            "Session::step: slate size mismatch");
    std::unordered_set<int> seen;
    for (int idx : slate) {
        require(idx >= 0 && idx < static_cast<int>(candidates_.size()),
                "Session::step: slate index out of range");
        require(seen.insert(idx).second, "Session::step: duplicate slate index");
    }

    const int k_count = config_.feedback_count();
    const int lv = config_.long_view_index;

    std::uniform_real_distribution<double> uniform01(0.0, 1.0);
    double reward = 0.0;
    double gain = 0.0;
    Vec outcome_mean = Vec::Zero(k_count);
    double watch_mean = 0.0;
    for (int idx : slate) {
        const SimItem& item = candidates_[static_cast<std::size_t>(idx)].item;
        bool long_viewed = false;
        for (int k = 0; k < k_count; ++k) {
            bool fired = uniform01(rng_) < item.true_probs[k];
            if (k == lv) long_viewed = fired;
            if (fired) {
                gain += interaction_weights_[k] * user_.preference[k];
                outcome_mean[k] += 1.0;
            }
        }
        double watch = item.base_watch_time * (0.3 + 0.7 * (long_viewed ? 1.0 : 0.0));
        reward += watch;
        watch_mean += watch;
    }
    outcome_mean /= config_.slate_size;
    watch_mean /= config_.slate_size * config_.watch_time_max;

    budget_ += config_.kappa_gain * gain - config_.kappa_cost;
    ++t_;
    done_ = budget_ <= 0.0 || t_ == config_.t_max;

    // History block: exponential decay over consumed-item statistics.
    const double decay = config_.history_decay;
    auto hist = state_.features.segment(k_count, k_count);
    hist = decay * hist + (1.0 - decay) * outcome_mean;
    double& hist_watch = state_.features[2 * k_count];
    hist_watch = decay * hist_watch + (1.0 - decay) * watch_mean;
    state_.features[2 * k_count + 1] = static_cast<double>(t_) / config_.t_max;

    if (!done_) generate_candidates();

    StepResult result;
    result.reward = reward;
    result.next = state_;
    result.done = done_;
    return result;
}

std::vector<int> greedy_watch_slate(const Session& session) {
    const auto& candidates = session.candidates();
    const int lv = session.config().long_view_index;
    Vec scores(static_cast<int>(candidates.size()));
    for (int i = 0; i < scores.size(); ++i)
        scores[i] = candidates[static_cast<std::size_t>(i)].prediction.values[lv];
    return rank_top_n(scores, session.config().slate_size);
}

std::vector<int> balanced_slate(const Session& session, double mix) {
    const auto& candidates = session.candidates();
    const auto& config = session.config();
    const int lv = config.long_view_index;
    auto weights = config.interaction_weights.empty() ? default_interaction_weights(config)
                                                      : config.interaction_weights;
    // Profile block of the state carries the preference vector.
    const Vec pref = session.state().features.head(config.feedback_count());
    Vec scores(static_cast<int>(candidates.size()));
    for (int i = 0; i < scores.size(); ++i) {
        const Vec& o = candidates[static_cast<std::size_t>(i)].prediction.values;
        double interaction = 0.0;
        for (int k = 0; k < config.feedback_count(); ++k)
            interaction += weights[static_cast<std::size_t>(k)] * pref[k] * o[k];
        scores[i] = o[lv] + mix * interaction;
    }
    return rank_top_n(scores, config.slate_size);
}

}  // namespace xmtf::env
