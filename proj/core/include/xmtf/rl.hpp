#pragma once

// Actor-critic outer stage: deterministic policy with tanh-squashed output
// mapped to a clamp range, TD(0) critic with target networks, and a FIFO
// replay buffer. A twin-critic/delayed-update toggle covers the TD3-style
// formula baseline.

#include "xmtf/net.hpp"
#include "xmtf/types.hpp"

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace xmtf::rl {

/// Deterministic policy: a = center + half_range * tanh(net(s)).
/// The net's output activation must be tanh.
struct Actor {
    nn::DenseNet net;
    double a_low = -1.0;
    double a_high = 1.0;

    double center() const { return 0.5 * (a_low + a_high); }
    double half_range() const { return 0.5 * (a_high - a_low); }
};

Actor make_actor(int state_dim, int action_dim, const std::vector<int>& hidden,
                 double a_low, double a_high, std::mt19937_64& rng);

/// Deterministic action, optionally perturbed by N(0, sigma^2) noise and
/// clamped back into [a_low, a_high].
ActionVector act(const Actor& actor, const Vec& state, bool explore, double sigma,
                 std::mt19937_64* rng);

/// Batched deterministic actions: states are columns, result columns are actions.
Mat act_batch(const Actor& actor, const Mat& states);

struct Critic {
    nn::DenseNet net;  // input [s; a] -> scalar
};

Critic make_critic(int state_dim, int action_dim, const std::vector<int>& hidden,
                   std::mt19937_64& rng);

double q_value(const Critic& critic, const Vec& state, const Vec& action);
Vec q_value_batch(const Critic& critic, const Mat& states, const Mat& actions);

/// Normalized TD batch, columns = samples.
struct TdBatch {
    Mat s;                   // state_dim x B
    Mat a;                   // action_dim x B
    Vec r;                   // B
    Mat s_next;              // state_dim x B
    std::vector<bool> done;  // B
};

TdBatch make_td_batch(std::span<const SessionTransition* const> batch,
                      const std::function<Vec(const UserState&)>& state_map,
                      double reward_scale);

struct CriticLossReport {
    double loss = 0.0;       // mean squared TD error
    nn::NetGrad grad;        // d loss / d critic parameters
};

/// Mean squared TD error with target networks; terminal transitions regress
/// onto the immediate reward only.
CriticLossReport critic_loss(const Critic& critic, const Actor& target_actor,
                             const Critic& target_critic, const TdBatch& batch, double gamma);

/// Twin-critic variant: both critics regress onto the shared
/// min(Q1-, Q2-) bootstrap target; reports the mean of the two losses.
struct TwinCriticLossReport {
    double loss = 0.0;
    nn::NetGrad grad_q1, grad_q2;
};
TwinCriticLossReport twin_critic_loss(const Critic& q1, const Critic& q2,
                                      const Actor& target_actor, const Critic& target_q1,
                                      const Critic& target_q2, const TdBatch& batch,
                                      double gamma);

/// Value and action-gradient of a Q function at (s, a); lets tests substitute
/// analytic critics for the DenseNet one.
using QFunction = std::function<std::pair<Vec, Mat>(const Mat& states, const Mat& actions)>;

QFunction critic_q_function(const Critic& critic);

struct ActorGradReport {
    double mean_q = 0.0;     // the ascent objective J
    nn::NetGrad grad;        // d(-J) / d actor parameters (descent direction)
};

/// Deterministic policy gradient: chain dQ/da through the actor. The critic
/// receives no update from this pass.
ActorGradReport actor_gradient(const Actor& actor, const QFunction& q, const Mat& states);

/// target <- tau * online + (1 - tau) * target, element-wise.
void soft_update(nn::DenseNet& target, const nn::DenseNet& online, double tau);

/// FIFO ring of transitions with uniform without-replacement batch sampling.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(SessionTransition t);
    /// nullopt until the buffer holds at least batch_size transitions.
    std::optional<std::vector<const SessionTransition*>> sample(std::size_t batch_size,
                                                                std::mt19937_64& rng) const;

    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }
    const SessionTransition& at(std::size_t logical_index) const;

private:
    std::size_t capacity_;
    std::size_t next_ = 0;  // overwrite cursor once full
    std::vector<SessionTransition> storage_;
};

}  // namespace xmtf::rl
