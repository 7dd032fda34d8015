#pragma once

// Synthetic user-session environment. Each request offers a candidate set
// with noisy feedback-probability predictions; consuming a slate yields
// watch-time reward and moves a hidden satisfaction budget. Sessions end
// when the budget is exhausted or a request cap is hit.

#include "xmtf/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace xmtf::env {

struct LatentUser {
    Vec preference;             // taste weights over feedback types, simplex
    double patience = 0.0;      // initial satisfaction budget
    std::uint64_t affinity_seed = 0;
};

struct SimItem {
    Vec true_probs;             // ground-truth per-type feedback probabilities
    double base_watch_time = 0.0;  // seconds
};

struct Candidate {
    SimItem item;
    PredictionVector prediction;
};

struct SessionConfig {
    // Feedback types; index long_view_index is the watch-time proxy.
    std::vector<double> sparsity = {0.3793, 0.2635, 0.0151, 0.0012, 0.0025, 0.0009};
    int long_view_index = 1;

    int candidate_count = 50;
    int slate_size = 6;
    int t_max = 30;

    // Prediction noise, relative to each type's sparsity scale:
    // o = clamp(p + sparsity_k * N(0, prediction_noise), 0, 1).
    double prediction_noise = 0.05;

    // Item generation: a consumption tilt t ~ U(0,1) trades watch time
    // against interaction propensity.
    double tilt_strength = 0.8;
    double item_noise_shape = 16.0;  // gamma shape of the per-item multiplier
    double watch_time_min = 4.0;
    double watch_time_max = 60.0;

    // User generation.
    double preference_alpha = 0.8;  // Dirichlet concentration
    double patience_mean = 10.0;
    double patience_shape = 4.0;

    // Satisfaction budget dynamics.
    double kappa_gain = 3.0;
    double kappa_cost = 2.0;
    std::vector<double> interaction_weights;  // empty -> default_interaction_weights

    double history_decay = 0.8;

    int feedback_count() const { return static_cast<int>(sparsity.size()); }
    int state_dim() const { return 2 * feedback_count() + 2; }
};

/// 1/(K*max(m_k, 0.02)) per type, zeroed for the long-view proxy: watching is
/// rewarded through watch time, not through the budget.
std::vector<double> default_interaction_weights(const SessionConfig& config);

/// One user session. Owns its RNG stream; the trajectory is a pure function
/// of (config, user_seed, slate decisions).
class Session {
public:
    Session(SessionConfig config, std::uint64_t user_seed);

    const LatentUser& user() const { return user_; }
    const UserState& state() const { return state_; }
    const std::vector<Candidate>& candidates() const { return candidates_; }
    double budget() const { return budget_; }
    int request_index() const { return t_; }
    bool done() const { return done_; }
    const SessionConfig& config() const { return config_; }

    struct StepResult {
        double reward = 0.0;  // summed realized watch time, seconds
        UserState next;
        bool done = false;
    };

    /// Consumes a slate of `slate_size` distinct candidate indices. Rejects
    /// calls after the session has ended.
    StepResult step(const std::vector<int>& slate);

private:
    void generate_candidates();

    SessionConfig config_;
    std::mt19937_64 rng_;
    LatentUser user_;
    UserState state_;
    std::vector<Candidate> candidates_;
    Vec interaction_weights_;
    double budget_ = 0.0;
    int t_ = 0;
    bool done_ = false;
};

/// Scripted reference policies used for calibration and gating checks.
/// Both read only the candidate predictions and the user's profile block.
std::vector<int> greedy_watch_slate(const Session& session);
std::vector<int> balanced_slate(const Session& session, double mix = 1.0);

struct PolicyStats {
    double mean_session_length = 0.0;
    double mean_total_watch = 0.0;
};

/// Rolls a scripted policy over `seeds` fresh sessions.
template <typename SlateFn>
PolicyStats run_scripted_policy(const SessionConfig& config, std::uint64_t seed_base,
                                int seeds, SlateFn&& choose) {
    PolicyStats stats;
    for (int u = 0; u < seeds; ++u) {
        Session session(config, derive_seed(seed_base, "scripted", static_cast<std::uint64_t>(u)));
        double watch = 0.0;
        int requests = 0;
        while (!session.done()) {
            auto result = session.step(choose(session));
            watch += result.reward;
            ++requests;
        }
        stats.mean_session_length += requests;
        stats.mean_total_watch += watch;
    }
    stats.mean_session_length /= seeds;
    stats.mean_total_watch /= seeds;
    return stats;
}

}  // namespace xmtf::env
