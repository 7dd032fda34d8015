#pragma once

// Training orchestration: streaming session collection into the replay
// buffer, interleaved critic/actor/inner updates (in that order), ablation
// modes, deterministic evaluation, and JSON checkpoints.

#include "xmtf/baselines.hpp"
#include "xmtf/config.hpp"
#include "xmtf/fusion.hpp"
#include "xmtf/rl.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace xmtf {

enum class PolicyFamily { mfc, formula };

/// Actor-critic bundle with target networks and optimizer states. The twin
/// toggle (second critic + delayed policy updates) backs the TD3-style
/// formula baseline.
struct OuterAgent {
    rl::Actor actor;
    rl::Critic critic;
    rl::Actor target_actor;
    rl::Critic target_critic;
    rl::Critic critic2, target_critic2;  // twin only
    nn::AdamState actor_adam, critic_adam, critic2_adam;
    bool twin = false;
    int policy_delay = 1;
    std::int64_t critic_updates = 0;
};

OuterAgent make_outer_agent(int state_dim, int action_dim, const std::vector<int>& hidden,
                            double a_low, double a_high, bool twin, int policy_delay,
                            std::mt19937_64& rng);

/// How a policy turns (action, state, candidate predictions) into ranking
/// scores and which action it emits. Used by rollouts and evaluation alike.
class RankingPolicy {
public:
    virtual ~RankingPolicy() = default;
    virtual ActionVector action(const UserState& s_raw, bool explore, std::mt19937_64* rng) const = 0;
    virtual Vec scores(const ActionVector& a, const UserState& s_raw,
                       const std::vector<PredictionVector>& candidates) const = 0;
};

/// xMTF policy (full or ablated): actor + fusion cells over normalized state.
class MfcPolicy : public RankingPolicy {
public:
    MfcPolicy(const MfcModel* mfc, const rl::Actor* actor, const RunningNorm* norm,
              Ablation ablation, double explore_sigma)
        : mfc_(mfc), actor_(actor), norm_(norm), ablation_(ablation), sigma_(explore_sigma) {}

    ActionVector action(const UserState& s_raw, bool explore, std::mt19937_64* rng) const override;
    Vec scores(const ActionVector& a, const UserState& s_raw,
               const std::vector<PredictionVector>& candidates) const override;

private:
    const MfcModel* mfc_;
    const rl::Actor* actor_;
    const RunningNorm* norm_;
    Ablation ablation_;
    double sigma_;
};

/// Formula-based policy: coefficients either fixed (CEM result) or produced
/// by an actor; items ranked by the fusion formula.
class FormulaPolicy : public RankingPolicy {
public:
    FormulaPolicy(FormulaKind kind, double log_beta, Vec fixed_coefficients)
        : kind_(kind), log_beta_(log_beta), fixed_(std::move(fixed_coefficients)) {}
    FormulaPolicy(FormulaKind kind, double log_beta, const rl::Actor* actor,
                  const RunningNorm* norm, double explore_sigma)
        : kind_(kind), log_beta_(log_beta), actor_(actor), norm_(norm), sigma_(explore_sigma) {}

    ActionVector action(const UserState& s_raw, bool explore, std::mt19937_64* rng) const override;
    Vec scores(const ActionVector& a, const UserState& s_raw,
               const std::vector<PredictionVector>& candidates) const override;

private:
    FormulaKind kind_;
    double log_beta_;
    Vec fixed_;
    const rl::Actor* actor_ = nullptr;
    const RunningNorm* norm_ = nullptr;
    double sigma_ = 0.0;
};

struct RolloutResult {
    std::vector<SessionTransition> transitions;
    double total_watch = 0.0;
    int requests = 0;
};

/// Plays one session under the policy; transitions are returned, not pushed.
RolloutResult rollout_session(const env::SessionConfig& config, std::uint64_t user_seed,
                              const RankingPolicy& policy, bool explore,
                              std::mt19937_64* explore_rng);

struct EvalStats {
    double mean_watch = 0.0;
    double std_watch = 0.0;
    double mean_length = 0.0;
};

struct TrialStats {
    std::vector<double> trial_means;
    double mean = 0.0;
    double stddev = 0.0;       // across trial means
    double ci_half = 0.0;      // 1.96 * stddev / sqrt(trials)
    double mean_length = 0.0;

    double ci_low() const { return mean - ci_half; }
    double ci_high() const { return mean + ci_half; }
};

/// Deterministic evaluation over held-out user seeds derived from
/// (base_seed, tag, index); identical tags give identical seed sets.
EvalStats evaluate_policy(const env::SessionConfig& config, const RankingPolicy& policy,
                          std::uint64_t base_seed, const std::string& tag, int sessions);

TrialStats evaluate_policy_trials(const env::SessionConfig& config, const RankingPolicy& policy,
                                  std::uint64_t base_seed, int trials, int sessions_per_trial);

struct StepReport {
    bool updated = false;  // false while the buffer is warming up
    double critic_loss = 0.0;
    double actor_objective = 0.0;
    double inner_total = 0.0;
    double inner_mono = 0.0;
    double inner_transfer = 0.0;
    std::vector<std::string> update_order;
};

struct MetricsRow {
    std::string phase;  // "train" probe or "final" trial
    int sessions_trained = 0;
    int trial = -1;
    double mean_watch = 0.0;
    double std_watch = 0.0;
    double mean_length = 0.0;
};

/// Owns all learnable state for one run. Single-writer: rollouts and updates
/// happen on the caller's thread.
class Trainer {
public:
    Trainer(RunConfig config, PolicyFamily family, FormulaKind formula_kind = FormulaKind::linear);

    /// Plays one training session (with exploration), pushes transitions,
    /// then performs one train_step per request, per the per-request update
    /// cadence. Returns the session's total watch time.
    double train_session();

    /// Runs train_session until config.train.sessions, emitting periodic
    /// evaluation probes into metrics().
    void run_training();

    StepReport train_step();

    EvalStats evaluate(const std::string& tag, int sessions) const;
    TrialStats evaluate_trials(int trials, int sessions_per_trial) const;

    /// Fraction of random (k, user, o < o') probes with non-decreasing inner
    /// output, measured on held-out user states.
    double monotone_fraction(int probes, const std::string& tag) const;

    /// CSV with columns feedback_type,user_id,o,q_inner for the given users.
    void dump_mfc_curves(const std::filesystem::path& path, int users, int grid_points) const;

    nlohmann::json checkpoint(bool include_buffer) const;
    void restore(const nlohmann::json& snapshot);

    std::unique_ptr<RankingPolicy> make_policy(double explore_sigma) const;

    const RunConfig& config() const { return config_; }
    const MfcModel& mfc() const { return mfc_; }
    const OuterAgent& agent() const { return agent_; }
    const RunningNorm& norm() const { return norm_; }
    const rl::ReplayBuffer& buffer() const { return buffer_; }
    int sessions_done() const { return sessions_done_; }
    const std::vector<StepReport>& losses() const { return losses_; }
    const std::vector<MetricsRow>& metrics() const { return metrics_; }

private:
    void inner_update(StepReport& report);
    bool in_warmup() const { return sessions_done_ < config_.train.warmup_sessions; }

    RunConfig config_;
    PolicyFamily family_;
    FormulaKind formula_kind_;
    MfcModel mfc_;
    std::vector<nn::AdamState> inner_adam_;
    OuterAgent agent_;
    RunningNorm norm_;
    rl::ReplayBuffer buffer_;
    std::mt19937_64 train_rng_;
    int sessions_done_ = 0;
    std::int64_t steps_done_ = 0;
    std::vector<StepReport> losses_;
    std::vector<MetricsRow> metrics_;
};

struct ExperimentResult {
    TrialStats final_eval;
    std::filesystem::path run_dir;
};

/// Full protocol: train to the configured session budget, evaluate
/// `eval.trials` held-out trials with exploration off, write config.json,
/// metrics.csv, losses.csv and checkpoints/final.json under out_dir.
ExperimentResult run_experiment(const RunConfig& config, const std::filesystem::path& out_dir,
                                PolicyFamily family = PolicyFamily::mfc,
                                FormulaKind formula_kind = FormulaKind::linear,
                                const std::filesystem::path* resume_checkpoint = nullptr);

/// The formula-based RL baseline: same outer-stage machinery with actions
/// read as formula coefficients (twin critics on, per the baseline setup).
ExperimentResult formula_rl_train(FormulaKind kind, const RunConfig& config,
                                  const std::filesystem::path& out_dir);

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path);
void write_losses_csv(const std::vector<StepReport>& rows, const std::filesystem::path& path);

}  // namespace xmtf
