#include "xmtf/rl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace xmtf::rl {

Actor make_actor(int state_dim, int action_dim, const std::vector<int>& hidden,
                 double a_low, double a_high, std::mt19937_64& rng) {
    require(a_low < a_high, "make_actor: empty action range");
    Actor actor;
    actor.net = nn::make_net(state_dim, hidden, action_dim, nn::Activation::relu,
                             nn::Activation::tanh, rng);
    actor.a_low = a_low;
    actor.a_high = a_high;
    return actor;
}

Mat act_batch(const Actor& actor, const Mat& states) {
    Mat squashed = nn::forward_batch(actor.net, states);
    return (actor.center() + (actor.half_range() * squashed.array())).matrix();
}

ActionVector act(const Actor& actor, const Vec& state, bool explore, double sigma,
                 std::mt19937_64* rng) {
    Vec a = act_batch(actor, state).col(0);
    if (explore) {
        require(rng != nullptr, "act: exploration requires an RNG");
        std::normal_distribution<double> noise(0.0, sigma);
        for (int i = 0; i < a.size(); ++i) a[i] += noise(*rng);
    }
    a = a.cwiseMax(actor.a_low).cwiseMin(actor.a_high);
    return {a};
}

Critic make_critic(int state_dim, int action_dim, const std::vector<int>& hidden,
                   std::mt19937_64& rng) {
    Critic critic;
    critic.net = nn::make_net(state_dim + action_dim, hidden, 1, nn::Activation::relu,
                              nn::Activation::identity, rng);
    return critic;
}

namespace {

Mat stack_state_action(const Mat& states, const Mat& actions) {
    Mat x(states.rows() + actions.rows(), states.cols());
    x.topRows(states.rows()) = states;
    x.bottomRows(actions.rows()) = actions;
    return x;
}

}  // namespace

Vec q_value_batch(const Critic& critic, const Mat& states, const Mat& actions) {
    return nn::forward_batch(critic.net, stack_state_action(states, actions)).row(0).transpose();
}

double q_value(const Critic& critic, const Vec& state, const Vec& action) {
    return q_value_batch(critic, state, action)[0];
}

TdBatch make_td_batch(std::span<const SessionTransition* const> batch,
                      const std::function<Vec(const UserState&)>& state_map,
                      double reward_scale) {
    require(!batch.empty(), "make_td_batch: empty batch");
    const int b = static_cast<int>(batch.size());
    Vec s0 = state_map(batch[0]->s);
    TdBatch out;
    out.s = Mat(s0.size(), b);
    out.a = Mat(batch[0]->a.a.size(), b);
    out.r = Vec(b);
    out.s_next = Mat(s0.size(), b);
    out.done.resize(static_cast<std::size_t>(b));
    for (int i = 0; i < b; ++i) {
        const SessionTransition& t = *batch[static_cast<std::size_t>(i)];
        out.s.col(i) = state_map(t.s);
        out.a.col(i) = t.a.a;
        out.r[i] = t.reward * reward_scale;
        out.s_next.col(i) = state_map(t.s_next);
        out.done[static_cast<std::size_t>(i)] = t.done;
    }
    return out;
}

namespace {

Vec bootstrap_targets(const Vec& q_next, const TdBatch& batch, double gamma) {
    Vec y(batch.r.size());
    for (int i = 0; i < y.size(); ++i)
        y[i] = batch.r[i] + (batch.done[static_cast<std::size_t>(i)] ? 0.0 : gamma * q_next[i]);
    return y;
}

CriticLossReport regression_loss(const Critic& critic, const TdBatch& batch, const Vec& y) {
    const int b = static_cast<int>(batch.r.size());
    Mat x = stack_state_action(batch.s, batch.a);
    Mat q = nn::forward_batch(critic.net, x);
    Vec err = q.row(0).transpose() - y;
    CriticLossReport report;
    report.loss = err.squaredNorm() / b;
    Mat out_grad = (2.0 / b) * err.transpose();
    report.grad = nn::backward_batch(critic.net, x, out_grad).grads;
    return report;
}

}  // namespace

CriticLossReport critic_loss(const Critic& critic, const Actor& target_actor,
                             const Critic& target_critic, const TdBatch& batch, double gamma) {
    require(gamma >= 0.0 && gamma < 1.0, "critic_loss: gamma must lie in [0,1)");
    require(batch.r.size() > 0, "critic_loss: empty batch");
    Mat a_next = act_batch(target_actor, batch.s_next);
    Vec q_next = q_value_batch(target_critic, batch.s_next, a_next);
    return regression_loss(critic, batch, bootstrap_targets(q_next, batch, gamma));
}

TwinCriticLossReport twin_critic_loss(const Critic& q1, const Critic& q2,
                                      const Actor& target_actor, const Critic& target_q1,
                                      const Critic& target_q2, const TdBatch& batch,
                                      double gamma) {
    require(gamma >= 0.0 && gamma < 1.0, "twin_critic_loss: gamma must lie in [0,1)");
    require(batch.r.size() > 0, "twin_critic_loss: empty batch");
    Mat a_next = act_batch(target_actor, batch.s_next);
    Vec q_next = q_value_batch(target_q1, batch.s_next, a_next)
                     .cwiseMin(q_value_batch(target_q2, batch.s_next, a_next));
    Vec y = bootstrap_targets(q_next, batch, gamma);
    CriticLossReport r1 = regression_loss(q1, batch, y);
    CriticLossReport r2 = regression_loss(q2, batch, y);
    return {0.5 * (r1.loss + r2.loss), std::move(r1.grad), std::move(r2.grad)};
}

QFunction critic_q_function(const Critic& critic) {
    return [&critic](const Mat& states, const Mat& actions) {
        Mat x = stack_state_action(states, actions);
        Mat q = nn::forward_batch(critic.net, x);
        Mat ones = Mat::Ones(1, x.cols());
        auto back = nn::backward_batch(critic.net, x, ones);
        Mat dq_da = back.input_grad.bottomRows(actions.rows());
        return std::make_pair(Vec(q.row(0).transpose()), dq_da);
    };
}

ActorGradReport actor_gradient(const Actor& actor, const QFunction& q, const Mat& states) {
    require(states.cols() > 0, "actor_gradient: empty batch");
    const int b = static_cast<int>(states.cols());
    Mat actions = act_batch(actor, states);
    auto [q_values, dq_da] = q(states, actions);

    ActorGradReport report;
    report.mean_q = q_values.mean();
    // Ascent on mean Q; the tanh derivative lives inside the actor net, the
    // affine range map contributes half_range.
    Mat out_grad = (-actor.half_range() / b) * dq_da;
    report.grad = nn::backward_batch(actor.net, states, out_grad).grads;
    return report;
}

void soft_update(nn::DenseNet& target, const nn::DenseNet& online, double tau) {
    require(tau > 0.0 && tau <= 1.0, "soft_update: tau must lie in (0,1]");
    require(target.layers.size() == online.layers.size(), "soft_update: layer count mismatch");
    for (std::size_t l = 0; l < target.layers.size(); ++l) {
        auto& t = target.layers[l];
        const auto& o = online.layers[l];
        require(t.weights.rows() == o.weights.rows() && t.weights.cols() == o.weights.cols(),
                "soft_update: shape mismatch at layer " + std::to_string(l));
        t.weights = tau * o.weights + (1.0 - tau) * t.weights;
        t.bias = tau * o.bias + (1.0 - tau) * t.bias;
    }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    require(capacity > 0, "ReplayBuffer: capacity must be positive");
    storage_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(SessionTransition t) {
    if (storage_.size() < capacity_) {
        storage_.push_back(std::move(t));
    } else {
        storage_[next_] = std::move(t);
        next_ = (next_ + 1) % capacity_;
    }
}

const SessionTransition& ReplayBuffer::at(std::size_t logical_index) const {
    require(logical_index < storage_.size(), "ReplayBuffer::at: index out of range");
    if (storage_.size() < capacity_) return storage_[logical_index];
    return storage_[(next_ + logical_index) % capacity_];
}

std::optional<std::vector<const SessionTransition*>> ReplayBuffer::sample(
    std::size_t batch_size, std::mt19937_64& rng) const {
    require(batch_size > 0, "ReplayBuffer::sample: batch_size must be positive");
    if (storage_.size() < batch_size) return std::nullopt;
    // Partial Fisher-Yates over slot indices: uniform, without replacement.
    std::vector<std::size_t> idx(storage_.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<const SessionTransition*> out;
    out.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
        out.push_back(&storage_[idx[i]]);
    }
    return out;
}

}  // namespace xmtf::rl
