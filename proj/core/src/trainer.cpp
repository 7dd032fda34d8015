#include "xmtf/trainer.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace xmtf {

namespace fs = std::filesystem;

OuterAgent make_outer_agent(int state_dim, int action_dim, const std::vector<int>& hidden,
                            double a_low, double a_high, bool twin, int policy_delay,
                            std::mt19937_64& rng) {
    OuterAgent agent;
    agent.actor = rl::make_actor(state_dim, action_dim, hidden, a_low, a_high, rng);
    agent.critic = rl::make_critic(state_dim, action_dim, hidden, rng);
    agent.target_actor = agent.actor;
    agent.target_critic = agent.critic;
    agent.actor_adam = nn::AdamState::zeros_like(agent.actor.net);
    agent.critic_adam = nn::AdamState::zeros_like(agent.critic.net);
    agent.twin = twin;
    agent.policy_delay = twin ? std::max(1, policy_delay) : 1;
    if (twin) {
        agent.critic2 = rl::make_critic(state_dim, action_dim, hidden, rng);
        agent.target_critic2 = agent.critic2;
        agent.critic2_adam = nn::AdamState::zeros_like(agent.critic2.net);
    }
    return agent;
}

ActionVector MfcPolicy::action(const UserState& s_raw, bool explore, std::mt19937_64* rng) const {
    if (ablation_ == Ablation::no_outer)
        return {Vec::Zero(actor_->net.output_dim())};
    return rl::act(*actor_, norm_->apply(s_raw.features), explore, sigma_, rng);
}

Vec MfcPolicy::scores(const ActionVector& a, const UserState& s_raw,
                      const std::vector<PredictionVector>& candidates) const {
    if (ablation_ == Ablation::no_inner) return fuse_identity_inner(a, candidates).z_full;
    UserState s_norm{norm_->apply(s_raw.features)};
    return fuse(*mfc_, a, s_norm, candidates).z_full;
}

ActionVector FormulaPolicy::action(const UserState& s_raw, bool explore,
                                   std::mt19937_64* rng) const {
    if (actor_ == nullptr) return {fixed_};
    return rl::act(*actor_, norm_->apply(s_raw.features), explore, sigma_, rng);
}

Vec FormulaPolicy::scores(const ActionVector& a, const UserState&,
                          const std::vector<PredictionVector>& candidates) const {
    FusionFormula formula = make_formula(kind_, a.a, log_beta_);
    Vec out(static_cast<int>(candidates.size()));
    for (int i = 0; i < out.size(); ++i) {
        PredictionVector o = candidates[static_cast<std::size_t>(i)];
        // Clamped predictions can land exactly on 0; keep the power formula
        // inside its domain.
        if (kind_ == FormulaKind::power) o.values = o.values.cwiseMax(1e-6);
        out[i] = formula_eval(formula, o);
    }
    return out;
}

RolloutResult rollout_session(const env::SessionConfig& config, std::uint64_t user_seed,
                              const RankingPolicy& policy, bool explore,
                              std::mt19937_64* explore_rng) {
    env::Session session(config, user_seed);
    RolloutResult result;
    while (!session.done()) {
        SessionTransition t;
        t.s = session.state();
        t.predictions.reserve(session.candidates().size());
        for (const auto& c : session.candidates()) t.predictions.push_back(c.prediction);
        t.a = policy.action(t.s, explore, explore_rng);
        Vec scores = policy.scores(t.a, t.s, t.predictions);
        auto slate = rank_top_n(scores, config.slate_size);
        auto step = session.step(slate);
        t.reward = step.reward;
        t.s_next = step.next;
        t.done = step.done;
        result.total_watch += step.reward;
        ++result.requests;
        result.transitions.push_back(std::move(t));
    }
    return result;
}

EvalStats evaluate_policy(const env::SessionConfig& config, const RankingPolicy& policy,
                          std::uint64_t base_seed, const std::string& tag, int sessions) {
    require(sessions >= 1, "evaluate_policy: need at least one session");
    double sum = 0.0, sum_sq = 0.0, lengths = 0.0;
    for (int i = 0; i < sessions; ++i) {
        auto rollout = rollout_session(
            config, derive_seed(base_seed, tag, static_cast<std::uint64_t>(i)), policy,
            /*explore=*/false, nullptr);
        sum += rollout.total_watch;
        sum_sq += rollout.total_watch * rollout.total_watch;
        lengths += rollout.requests;
    }
    EvalStats stats;
    stats.mean_watch = sum / sessions;
    double var = std::max(0.0, sum_sq / sessions - stats.mean_watch * stats.mean_watch);
    stats.std_watch = std::sqrt(var);
    stats.mean_length = lengths / sessions;
    return stats;
}

TrialStats evaluate_policy_trials(const env::SessionConfig& config, const RankingPolicy& policy,
                                  std::uint64_t base_seed, int trials, int sessions_per_trial) {
    TrialStats stats;
    stats.trial_means.reserve(static_cast<std::size_t>(trials));
    double lengths = 0.0;
    for (int t = 0; t < trials; ++t) {
        EvalStats trial = evaluate_policy(config, policy, base_seed,
                                          "eval-trial-" + std::to_string(t), sessions_per_trial);
        stats.trial_means.push_back(trial.mean_watch);
        lengths += trial.mean_length;
    }
    double sum = 0.0;
    for (double m : stats.trial_means) sum += m;
    stats.mean = sum / trials;
    double var = 0.0;
    for (double m : stats.trial_means) var += (m - stats.mean) * (m - stats.mean);
    stats.stddev = trials > 1 ? std::sqrt(var / (trials - 1)) : 0.0;
    stats.ci_half = 1.96 * stats.stddev / std::sqrt(static_cast<double>(trials));
    stats.mean_length = lengths / trials;
    return stats;
}

Trainer::Trainer(RunConfig config, PolicyFamily family, FormulaKind formula_kind)
    : config_(std::move(config)),
      family_(family),
      formula_kind_(formula_kind),
      norm_(config_.state_dim()),
      buffer_(static_cast<std::size_t>(config_.rl.buffer_capacity)),
      train_rng_(derive_seed(config_.seed, "trainer")) {
    validate(config_);
    const int k_count = config_.feedback_count();
    const int state_dim = config_.state_dim();

    std::mt19937_64 init_rng(derive_seed(config_.seed, "init"));
    if (family_ == PolicyFamily::mfc) {
        mfc_ = make_mfc(k_count, state_dim, config_.model.inner_hidden, init_rng);
        inner_adam_.reserve(static_cast<std::size_t>(k_count));
        for (const auto& net : mfc_.inner_nets)
            inner_adam_.push_back(nn::AdamState::zeros_like(net));
    }
    const double a_low =
        family_ == PolicyFamily::formula ? config_.cem.coef_low : config_.model.action_low;
    const double a_high =
        family_ == PolicyFamily::formula ? config_.cem.coef_high : config_.model.action_high;
    agent_ = make_outer_agent(state_dim, k_count, config_.model.actor_critic_hidden, a_low,
                              a_high, config_.rl.twin_critic, config_.rl.policy_delay, init_rng);
}

std::unique_ptr<RankingPolicy> Trainer::make_policy(double explore_sigma) const {
    if (family_ == PolicyFamily::formula)
        return std::make_unique<FormulaPolicy>(formula_kind_, config_.log_offset_beta,
                                               &agent_.actor, &norm_, explore_sigma);
    return std::make_unique<MfcPolicy>(&mfc_, &agent_.actor, &norm_, config_.train.ablation,
                                       explore_sigma);
}

double Trainer::train_session() {
    auto policy = make_policy(config_.rl.explore_sigma);
    std::uint64_t user_seed =
        derive_seed(config_.seed, "train-user", static_cast<std::uint64_t>(sessions_done_));
    RolloutResult rollout =
        rollout_session(config_.env, user_seed, *policy, /*explore=*/true, &train_rng_);

    for (const auto& t : rollout.transitions) norm_.observe(t.s.features);
    if (!rollout.transitions.empty()) norm_.observe(rollout.transitions.back().s_next.features);
    for (auto& t : rollout.transitions) buffer_.push(std::move(t));

    // Per-request update cadence: one triplet of updates per collected request.
    for (int i = 0; i < rollout.requests; ++i) losses_.push_back(train_step());

    ++sessions_done_;
    return rollout.total_watch;
}

StepReport Trainer::train_step() {
    StepReport report;
    auto batch = buffer_.sample(static_cast<std::size_t>(config_.rl.batch_size), train_rng_);
    if (!batch) return report;
    report.updated = true;
    ++steps_done_;

    const bool outer_enabled =
        !(family_ == PolicyFamily::mfc && config_.train.ablation == Ablation::no_outer);

    if (outer_enabled) {
        auto state_map = [this](const UserState& s) { return norm_.apply(s.features); };
        rl::TdBatch td = rl::make_td_batch(*batch, state_map, config_.rl.reward_scale);

        if (agent_.twin) {
            auto twin = rl::twin_critic_loss(agent_.critic, agent_.critic2, agent_.target_actor,
                                             agent_.target_critic, agent_.target_critic2, td,
                                             config_.rl.gamma);
            report.critic_loss = twin.loss;
            nn::adam_step(agent_.critic.net, twin.grad_q1, agent_.critic_adam,
                          config_.train.critic_lr);
            nn::adam_step(agent_.critic2.net, twin.grad_q2, agent_.critic2_adam,
                          config_.train.critic_lr);
        } else {
            auto critic = rl::critic_loss(agent_.critic, agent_.target_actor,
                                          agent_.target_critic, td, config_.rl.gamma);
            report.critic_loss = critic.loss;
            nn::adam_step(agent_.critic.net, critic.grad, agent_.critic_adam,
                          config_.train.critic_lr);
        }
        ++agent_.critic_updates;
        report.update_order.push_back("critic");

        const bool actor_turn = (agent_.critic_updates % agent_.policy_delay) == 0;
        if (actor_turn) {
            auto actor = rl::actor_gradient(agent_.actor, rl::critic_q_function(agent_.critic),
                                            td.s);
            report.actor_objective = actor.mean_q;
            nn::adam_step(agent_.actor.net, actor.grad, agent_.actor_adam,
                          config_.train.actor_lr);
            report.update_order.push_back("actor");
        }

        if (family_ == PolicyFamily::mfc && config_.train.ablation != Ablation::no_inner) {
            inner_update(report);
            report.update_order.push_back("inner");
        }

        if (actor_turn || !agent_.twin) {
            rl::soft_update(agent_.target_actor.net, agent_.actor.net, config_.rl.tau);
            rl::soft_update(agent_.target_critic.net, agent_.critic.net, config_.rl.tau);
            if (agent_.twin)
                rl::soft_update(agent_.target_critic2.net, agent_.critic2.net, config_.rl.tau);
            report.update_order.push_back("target");
        }
    } else {
        if (config_.train.ablation != Ablation::no_inner) {
            inner_update(report);
            report.update_order.push_back("inner");
        }
    }

    if (!std::isfinite(report.critic_loss) || !std::isfinite(report.inner_total))
        throw std::runtime_error("train_step: non-finite loss at step " +
                                 std::to_string(steps_done_));
    return report;
}

void Trainer::inner_update(StepReport& report) {
    const double lambda = config_.train.lambda;
    const bool warmup = in_warmup();
    if (warmup && lambda == 0.0) return;  // nothing active during warmup

    const int requests = config_.train.inner_requests_per_step;
    auto sampled = buffer_.sample(static_cast<std::size_t>(requests), train_rng_);
    if (!sampled) return;

    std::vector<nn::NetGrad> total_grads;
    total_grads.reserve(mfc_.inner_nets.size());
    for (const auto& net : mfc_.inner_nets) total_grads.push_back(nn::NetGrad::zeros_like(net));

    double mono = 0.0, transfer = 0.0, total = 0.0;
    for (const SessionTransition* t : *sampled) {
        UserState s_norm{norm_.apply(t->s.features)};
        Vec a_label = config_.train.ablation == Ablation::no_outer
                          ? Vec(Vec::Zero(config_.feedback_count()))
                          : t->a.a;
        Vec labels = fuse(mfc_, {a_label}, s_norm, t->predictions).z_full;
        // During warm-up only the monotonicity term trains; constant labels
        // select no transfer pairs.
        if (warmup) labels.setZero();

        PairSampling sampling{config_.train.pair_cap, &train_rng_};
        auto loss = inner_total_loss(mfc_, s_norm, t->predictions, labels, lambda, sampling);
        mono += loss.mono;
        transfer += loss.transfer;
        total += loss.total;
        for (std::size_t k = 0; k < total_grads.size(); ++k)
            total_grads[k].add_scaled(loss.grads[k], 1.0 / requests);
    }
    report.inner_mono = mono / requests;
    report.inner_transfer = transfer / requests;
    report.inner_total = total / requests;
    for (std::size_t k = 0; k < mfc_.inner_nets.size(); ++k)
        nn::adam_step(mfc_.inner_nets[k], total_grads[k], inner_adam_[k],
                      config_.train.inner_lr);
}

void Trainer::run_training() {
    while (sessions_done_ < config_.train.sessions) {
        train_session();
        if (config_.train.eval_every > 0 && sessions_done_ % config_.train.eval_every == 0) {
            EvalStats probe = evaluate("probe", config_.train.eval_probe_sessions);
            metrics_.push_back({"train", sessions_done_, -1, probe.mean_watch, probe.std_watch,
                                probe.mean_length});
        }
    }
}

EvalStats Trainer::evaluate(const std::string& tag, int sessions) const {
    auto policy = make_policy(0.0);
    return evaluate_policy(config_.env, *policy, config_.seed, tag, sessions);
}

TrialStats Trainer::evaluate_trials(int trials, int sessions_per_trial) const {
    auto policy = make_policy(0.0);
    return evaluate_policy_trials(config_.env, *policy, config_.seed, trials, sessions_per_trial);
}

double Trainer::monotone_fraction(int probes, const std::string& tag) const {
    if (family_ != PolicyFamily::mfc || config_.train.ablation == Ablation::no_inner)
        return 1.0;  // identity cells are monotone by construction
    std::mt19937_64 rng(derive_seed(config_.seed, tag));
    std::uniform_int_distribution<int> pick_k(0, config_.feedback_count() - 1);
    std::uniform_real_distribution<double> uniform01(0.0, 1.0);
    int satisfied = 0;
    for (int p = 0; p < probes; ++p) {
        int k = pick_k(rng);
        env::Session session(config_.env,
                             derive_seed(config_.seed, tag + "-user", static_cast<std::uint64_t>(p)));
        UserState s_norm{norm_.apply(session.state().features)};
        double o1 = uniform01(rng), o2 = uniform01(rng);
        if (o1 == o2) {
            ++satisfied;
            continue;
        }
        double lo = std::min(o1, o2), hi = std::max(o1, o2);
        if (inner_eval(mfc_, k, lo, s_norm) <= inner_eval(mfc_, k, hi, s_norm) + 1e-12)
            ++satisfied;
    }
    return static_cast<double>(satisfied) / probes;
}

void Trainer::dump_mfc_curves(const fs::path& path, int users, int grid_points) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "feedback_type,user_id,o,q_inner\n";
    if (family_ != PolicyFamily::mfc) return;
    for (int u = 0; u < users; ++u) {
        env::Session session(config_.env,
                             derive_seed(config_.seed, "curve-user", static_cast<std::uint64_t>(u)));
        UserState s_norm{norm_.apply(session.state().features)};
        for (int k = 0; k < config_.feedback_count(); ++k) {
            for (int g = 0; g < grid_points; ++g) {
                double o = static_cast<double>(g) / (grid_points - 1);
                double q = config_.train.ablation == Ablation::no_inner
                               ? o
                               : inner_eval(mfc_, k, o, s_norm);
                out << k << ',' << u << ',' << format_double(o) << ',' << format_double(q)
                    << '\n';
            }
        }
    }
}

namespace {

using nlohmann::json;

json vec_to_json(const Vec& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Vec vec_from_json(const json& j) {
    auto data = j.get<std::vector<double>>();
    return Eigen::Map<const Vec>(data.data(), static_cast<int>(data.size()));
}

json transition_to_json(const SessionTransition& t) {
    json preds = json::array();
    for (const auto& p : t.predictions) preds.push_back(vec_to_json(p.values));
    return {{"s", vec_to_json(t.s.features)},  {"a", vec_to_json(t.a.a)},
            {"r", t.reward},                   {"predictions", std::move(preds)},
            {"s_next", vec_to_json(t.s_next.features)}, {"done", t.done}};
}

SessionTransition transition_from_json(const json& j) {
    SessionTransition t;
    t.s.features = vec_from_json(j.at("s"));
    t.a.a = vec_from_json(j.at("a"));
    t.reward = j.at("r").get<double>();
    for (const auto& p : j.at("predictions")) t.predictions.push_back({vec_from_json(p)});
    t.s_next.features = vec_from_json(j.at("s_next"));
    t.done = j.at("done").get<bool>();
    return t;
}

}  // namespace

nlohmann::json Trainer::checkpoint(bool include_buffer) const {
    json j;
    j["format"] = "xmtf-checkpoint-v1";
    j["config"] = config_to_json(config_);
    j["family"] = family_ == PolicyFamily::mfc ? "mfc" : "formula";
    j["formula_kind"] = to_string(formula_kind_);
    j["sessions_done"] = sessions_done_;
    j["steps_done"] = steps_done_;

    if (family_ == PolicyFamily::mfc) {
        json cells = json::array(), adams = json::array();
        for (std::size_t k = 0; k < mfc_.inner_nets.size(); ++k) {
            cells.push_back(nn::net_to_json(mfc_.inner_nets[k]));
            adams.push_back(nn::adam_to_json(inner_adam_[k]));
        }
        j["mfc"] = std::move(cells);
        j["inner_adam"] = std::move(adams);
    }

    j["agent"] = {{"actor", nn::net_to_json(agent_.actor.net)},
                  {"a_low", agent_.actor.a_low},
                  {"a_high", agent_.actor.a_high},
                  {"critic", nn::net_to_json(agent_.critic.net)},
                  {"target_actor", nn::net_to_json(agent_.target_actor.net)},
                  {"target_critic", nn::net_to_json(agent_.target_critic.net)},
                  {"actor_adam", nn::adam_to_json(agent_.actor_adam)},
                  {"critic_adam", nn::adam_to_json(agent_.critic_adam)},
                  {"twin", agent_.twin},
                  {"policy_delay", agent_.policy_delay},
                  {"critic_updates", agent_.critic_updates}};
    if (agent_.twin) {
        j["agent"]["critic2"] = nn::net_to_json(agent_.critic2.net);
        j["agent"]["target_critic2"] = nn::net_to_json(agent_.target_critic2.net);
        j["agent"]["critic2_adam"] = nn::adam_to_json(agent_.critic2_adam);
    }

    j["norm"] = {{"count", norm_.count()},
                 {"mean", vec_to_json(norm_.mean())},
                 {"m2", vec_to_json(norm_.m2())}};

    std::ostringstream rng_state;
    rng_state << train_rng_;
    j["train_rng"] = rng_state.str();

    j["buffer"] = {{"capacity", buffer_.capacity()}, {"size", buffer_.size()}};
    if (include_buffer) {
        json transitions = json::array();
        for (std::size_t i = 0; i < buffer_.size(); ++i)
            transitions.push_back(transition_to_json(buffer_.at(i)));
        j["buffer"]["transitions"] = std::move(transitions);
    }
    return j;
}

void Trainer::restore(const nlohmann::json& j) {
    require(j.value("format", "") == "xmtf-checkpoint-v1", "restore: unknown checkpoint format");
    sessions_done_ = j.at("sessions_done").get<int>();
    steps_done_ = j.at("steps_done").get<std::int64_t>();

    if (family_ == PolicyFamily::mfc) {
        const auto& cells = j.at("mfc");
        require(cells.size() == mfc_.inner_nets.size(), "restore: cell count mismatch");
        for (std::size_t k = 0; k < mfc_.inner_nets.size(); ++k) {
            mfc_.inner_nets[k] = nn::net_from_json(cells[k]);
            inner_adam_[k] = nn::adam_from_json(j.at("inner_adam")[k], mfc_.inner_nets[k]);
        }
    }

    const auto& a = j.at("agent");
    agent_.actor.net = nn::net_from_json(a.at("actor"));
    agent_.actor.a_low = a.at("a_low").get<double>();
    agent_.actor.a_high = a.at("a_high").get<double>();
    agent_.critic.net = nn::net_from_json(a.at("critic"));
    agent_.target_actor.net = nn::net_from_json(a.at("target_actor"));
    agent_.target_actor.a_low = agent_.actor.a_low;
    agent_.target_actor.a_high = agent_.actor.a_high;
    agent_.target_critic.net = nn::net_from_json(a.at("target_critic"));
    agent_.actor_adam = nn::adam_from_json(a.at("actor_adam"), agent_.actor.net);
    agent_.critic_adam = nn::adam_from_json(a.at("critic_adam"), agent_.critic.net);
    agent_.twin = a.at("twin").get<bool>();
    agent_.policy_delay = a.at("policy_delay").get<int>();
    agent_.critic_updates = a.at("critic_updates").get<std::int64_t>();
    if (agent_.twin) {
        agent_.critic2.net = nn::net_from_json(a.at("critic2"));
        agent_.target_critic2.net = nn::net_from_json(a.at("target_critic2"));
        agent_.critic2_adam = nn::adam_from_json(a.at("critic2_adam"), agent_.critic2.net);
    }

    const auto& n = j.at("norm");
    norm_.restore(n.at("count").get<std::int64_t>(), vec_from_json(n.at("mean")),
                  vec_from_json(n.at("m2")));

    std::istringstream rng_state(j.at("train_rng").get<std::string>());
    rng_state >> train_rng_;

    buffer_ = rl::ReplayBuffer(j.at("buffer").at("capacity").get<std::size_t>());
    if (j.at("buffer").contains("transitions"))
        for (const auto& t : j.at("buffer").at("transitions"))
            buffer_.push(transition_from_json(t));
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "phase,sessions_trained,trial,mean_watch,std_watch,mean_length\n";
    for (const auto& r : rows)
        out << r.phase << ',' << r.sessions_trained << ',' << r.trial << ','
            << format_double(r.mean_watch) << ',' << format_double(r.std_watch) << ','
            << format_double(r.mean_length) << '\n';
}

void write_losses_csv(const std::vector<StepReport>& rows, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "step,updated,critic_loss,actor_objective,inner_total,inner_mono,inner_transfer,"
           "update_order\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out << i << ',' << (r.updated ? 1 : 0) << ',' << format_double(r.critic_loss) << ','
            << format_double(r.actor_objective) << ',' << format_double(r.inner_total) << ','
            << format_double(r.inner_mono) << ',' << format_double(r.inner_transfer) << ',';
        for (std::size_t o = 0; o < r.update_order.size(); ++o) {
            if (o) out << '|';
            out << r.update_order[o];
        }
        out << '\n';
    }
}

ExperimentResult run_experiment(const RunConfig& config, const fs::path& out_dir,
                                PolicyFamily family, FormulaKind formula_kind,
                                const fs::path* resume_checkpoint) {
    fs::create_directories(out_dir / "checkpoints");
    write_config(config, out_dir / "config.json");

    Trainer trainer(config, family, formula_kind);
    if (resume_checkpoint != nullptr) {
        std::ifstream in(*resume_checkpoint);
        if (!in) throw std::runtime_error("cannot open checkpoint " + resume_checkpoint->string());
        nlohmann::json snapshot;
        in >> snapshot;
        trainer.restore(snapshot);
    }

    trainer.run_training();

    TrialStats final_eval =
        trainer.evaluate_trials(config.eval.trials, config.eval.sessions_per_trial);

    std::vector<MetricsRow> rows = trainer.metrics();
    for (std::size_t t = 0; t < final_eval.trial_means.size(); ++t)
        rows.push_back({"final", trainer.sessions_done(), static_cast<int>(t),
                        final_eval.trial_means[t], 0.0, final_eval.mean_length});
    write_metrics_csv(rows, out_dir / "metrics.csv");
    write_losses_csv(trainer.losses(), out_dir / "losses.csv");

    std::ofstream ckpt(out_dir / "checkpoints" / "final.json");
    ckpt << trainer.checkpoint(config.train.checkpoint_buffer).dump() << "\n";

    return {final_eval, out_dir};
}

ExperimentResult formula_rl_train(FormulaKind kind, const RunConfig& config,
                                  const fs::path& out_dir) {
    RunConfig rl_config = config;
    rl_config.rl.twin_critic = true;  // TD3-style baseline setup
    return run_experiment(rl_config, out_dir, PolicyFamily::formula, kind);
}

}  // namespace xmtf
