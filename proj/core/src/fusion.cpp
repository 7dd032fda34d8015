#include "xmtf/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace xmtf {

namespace {

// -log(sigmoid(x)) without overflow.
double neg_log_sigmoid(double x) {
    if (x > 0.0) return std::log1p(std::exp(-x));
    return -x + std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

// All unordered candidate pairs, uniformly subsampled to sampling.cap when
// the request is large enough for the quadratic sum to matter.
std::vector<std::pair<int, int>> candidate_pairs(int n, const std::optional<PairSampling>& sampling) {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    if (sampling && sampling->cap > 0 && static_cast<int>(pairs.size()) > sampling->cap) {
        require(sampling->rng != nullptr, "pair sampling requires an RNG");
        std::vector<std::pair<int, int>> sampled;
        sampled.reserve(static_cast<std::size_t>(sampling->cap));
        std::sample(pairs.begin(), pairs.end(), std::back_inserter(sampled),
                    sampling->cap, *sampling->rng);
        return sampled;
    }
    return pairs;
}

// Stacks [o_k; s] column per candidate for one cell.
Mat cell_inputs(const std::vector<PredictionVector>& candidates, int k, const Vec& s) {
    const int n = static_cast<int>(candidates.size());
    Mat x(1 + s.size(), n);
    for (int i = 0; i < n; ++i) {
        x(0, i) = candidates[static_cast<std::size_t>(i)].values[k];
        x.col(i).tail(s.size()) = s;
    }
    return x;
}

}  // namespace

MfcModel make_mfc(int feedback_count, int state_dim, const std::vector<int>& hidden,
                  std::mt19937_64& rng) {
    require(feedback_count > 0, "make_mfc: feedback_count must be positive");
    require(state_dim >= 0, "make_mfc: state_dim must be nonnegative");
    MfcModel model;
    model.inner_nets.reserve(static_cast<std::size_t>(feedback_count));
    for (int k = 0; k < feedback_count; ++k)
        model.inner_nets.push_back(nn::make_net(1 + state_dim, hidden, 1,
                                                nn::Activation::tanh,
                                                nn::Activation::identity, rng));
    return model;
}

double inner_eval(const MfcModel& model, int k, double o_k, const UserState& s) {
    require(k >= 0 && k < model.feedback_count(), "inner_eval: feedback index out of range");
    require(std::isfinite(o_k) && o_k >= 0.0 && o_k <= 1.0,
            "inner_eval: prediction must lie in [0,1]");
    Vec x(1 + s.features.size());
    x[0] = o_k;
    x.tail(s.features.size()) = s.features;
    return nn::forward(model.inner_nets[static_cast<std::size_t>(k)], x)[0];
}

FusionScores fuse(const MfcModel& model, const ActionVector& a, const UserState& s,
                  const std::vector<PredictionVector>& candidates) {
    const int k_count = model.feedback_count();
    const int n = static_cast<int>(candidates.size());
    require(static_cast<int>(a.a.size()) == k_count, "fuse: action length must equal K");
    for (const auto& c : candidates) check_prediction(c, k_count);

    FusionScores out;
    out.per_cell_inner = Mat::Zero(n, k_count);
    out.per_cell_outer = Mat::Zero(n, k_count);
    for (int k = 0; k < k_count; ++k) {
        Mat x = cell_inputs(candidates, k, s.features);
        Mat q = nn::forward_batch(model.inner_nets[static_cast<std::size_t>(k)], x);
        for (int i = 0; i < n; ++i) {
            const double qi = q(0, i);
            out.per_cell_inner(i, k) = qi;
            out.per_cell_outer(i, k) = outer_eval(qi, a.a[k]);
        }
    }
    out.z_inner = out.per_cell_inner.rowwise().sum();
    out.z_full = out.per_cell_outer.rowwise().sum();
    return out;
}

FusionScores fuse_identity_inner(const ActionVector& a,
                                 const std::vector<PredictionVector>& candidates) {
    const int k_count = static_cast<int>(a.a.size());
    const int n = static_cast<int>(candidates.size());
    FusionScores out;
    out.per_cell_inner = Mat::Zero(n, k_count);
    out.per_cell_outer = Mat::Zero(n, k_count);
    for (int i = 0; i < n; ++i) {
        check_prediction(candidates[static_cast<std::size_t>(i)], k_count);
        for (int k = 0; k < k_count; ++k) {
            const double o = candidates[static_cast<std::size_t>(i)].values[k];
            out.per_cell_inner(i, k) = o;
            out.per_cell_outer(i, k) = outer_eval(o, a.a[k]);
        }
    }
    out.z_inner = out.per_cell_inner.rowwise().sum();
    out.z_full = out.per_cell_outer.rowwise().sum();
    return out;
}

std::vector<int> rank_top_n(const Vec& scores, int n) {
    require(n >= 1 && n <= scores.size(), "rank_top_n: n out of range");
    std::vector<int> idx(static_cast<std::size_t>(scores.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    idx.resize(static_cast<std::size_t>(n));
    return idx;
}

double mono_loss_inner(const MfcModel& model, const UserState& s,
                       const std::vector<PredictionVector>& candidates, int k,
                       std::optional<PairSampling> sampling) {
    const int n = static_cast<int>(candidates.size());
    require(n >= 2, "mono_loss_inner: need at least two candidates");
    require(k >= 0 && k < model.feedback_count(), "mono_loss_inner: feedback index out of range");

    Mat x = cell_inputs(candidates, k, s.features);
    Mat q = nn::forward_batch(model.inner_nets[static_cast<std::size_t>(k)], x);

    double loss = 0.0;
    for (auto [i, j] : candidate_pairs(n, sampling)) {
        double oi = candidates[static_cast<std::size_t>(i)].values[k];
        double oj = candidates[static_cast<std::size_t>(j)].values[k];
        if (oi == oj) continue;
        int lo = oi < oj ? i : j;
        int hi = oi < oj ? j : i;
        loss += std::max(0.0, q(0, lo) - q(0, hi));
    }
    return loss;
}

double transfer_loss(const Vec& z_inner, const Vec& z_full,
                     std::optional<PairSampling> sampling) {
    require(z_inner.size() == z_full.size(), "transfer_loss: length mismatch");
    require(z_inner.size() >= 2, "transfer_loss: need at least two candidates");
    const int n = static_cast<int>(z_inner.size());

    double loss = 0.0;
    for (auto [i, j] : candidate_pairs(n, sampling)) {
        if (z_full[i] == z_full[j]) continue;
        int lo = z_full[i] < z_full[j] ? i : j;
        int hi = z_full[i] < z_full[j] ? j : i;
        loss += neg_log_sigmoid(z_inner[hi] - z_inner[lo]);
    }
    return loss;
}

InnerLossReport inner_total_loss(const MfcModel& model, const UserState& s,
                                 const std::vector<PredictionVector>& candidates,
                                 const Vec& z_full_labels, double lambda,
                                 std::optional<PairSampling> sampling) {
    const int k_count = model.feedback_count();
    const int n = static_cast<int>(candidates.size());
    require(n >= 2, "inner_total_loss: need at least two candidates");
    require(lambda >= 0.0 && lambda <= 1.0, "inner_total_loss: lambda must lie in [0,1]");
    require(z_full_labels.size() == n, "inner_total_loss: label length mismatch");
    for (const auto& c : candidates) check_prediction(c, k_count);

    InnerLossReport report;
    report.grads.reserve(static_cast<std::size_t>(k_count));

    // Inner outputs per (candidate, cell) and the inputs used to produce them.
    std::vector<Mat> inputs(static_cast<std::size_t>(k_count));
    Mat q(n, k_count);
    for (int k = 0; k < k_count; ++k) {
        inputs[static_cast<std::size_t>(k)] = cell_inputs(candidates, k, s.features);
        Mat out = nn::forward_batch(model.inner_nets[static_cast<std::size_t>(k)],
                                    inputs[static_cast<std::size_t>(k)]);
        q.col(k) = out.row(0).transpose();
    }
    Vec z_inner = q.rowwise().sum();

    // Cotangents of the total loss with respect to each inner output.
    Mat cot = Mat::Zero(n, k_count);

    for (int k = 0; k < k_count; ++k) {
        for (auto [i, j] : candidate_pairs(n, sampling)) {
            double oi = candidates[static_cast<std::size_t>(i)].values[k];
            double oj = candidates[static_cast<std::size_t>(j)].values[k];
            if (oi == oj) continue;
            int lo = oi < oj ? i : j;
            int hi = oi < oj ? j : i;
            double diff = q(lo, k) - q(hi, k);
            if (diff > 0.0) {
                report.mono += diff;
                cot(lo, k) += lambda;
                cot(hi, k) -= lambda;
            }
        }
    }

    Vec cot_z = Vec::Zero(n);
    for (auto [i, j] : candidate_pairs(n, sampling)) {
        if (z_full_labels[i] == z_full_labels[j]) continue;
        int lo = z_full_labels[i] < z_full_labels[j] ? i : j;
        int hi = z_full_labels[i] < z_full_labels[j] ? j : i;
        double d = z_inner[hi] - z_inner[lo];
        report.transfer += neg_log_sigmoid(d);
        double g = sigmoid(d) - 1.0;  // d/dd of -log sigmoid(d)
        cot_z[hi] += (1.0 - lambda) * g;
        cot_z[lo] -= (1.0 - lambda) * g;
    }
    // z_inner[i] = sum_k q(i,k), so the transfer cotangent fans out to every cell.
    cot.colwise() += cot_z;

    report.total = lambda * report.mono + (1.0 - lambda) * report.transfer;

    for (int k = 0; k < k_count; ++k) {
        Mat out_grad = cot.col(k).transpose();
        auto back = nn::backward_batch(model.inner_nets[static_cast<std::size_t>(k)],
                                       inputs[static_cast<std::size_t>(k)], out_grad);
        report.grads.push_back(std::move(back.grads));
    }
    return report;
}

}  // namespace xmtf
