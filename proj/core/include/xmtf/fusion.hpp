#pragma once

// Formula-free fusion core: per-feedback-type monotonic cells (inner stage),
// the fixed second-order outer stage q*(1+a*q), the fused ranking score, and
// the pairwise losses that train the inner stage.

#include "xmtf/net.hpp"
#include "xmtf/types.hpp"

#include <optional>
#include <random>
#include <vector>

namespace xmtf {

/// K independent inner-stage cells. Cell k maps (o_k, s) to a scalar; its
/// input dimension is therefore 1 + dim(UserState).
struct MfcModel {
    std::vector<nn::DenseNet> inner_nets;

    int feedback_count() const { return static_cast<int>(inner_nets.size()); }
    int state_dim() const {
        return inner_nets.empty() ? 0 : inner_nets.front().input_dim() - 1;
    }
};

MfcModel make_mfc(int feedback_count, int state_dim, const std::vector<int>& hidden,
                  std::mt19937_64& rng);

/// Inner-stage value q_k for one prediction. Requires o_k in [0,1].
double inner_eval(const MfcModel& model, int k, double o_k, const UserState& s);

/// Outer stage: q * (1 + a_k * q).
inline double outer_eval(double q_inner, double a_k) {
    return q_inner * (1.0 + a_k * q_inner);
}

struct FusionScores {
    Vec z_inner;          // per candidate, sum over k of inner outputs
    Vec z_full;           // per candidate, sum over k of outer outputs
    Mat per_cell_inner;   // candidates x K
    Mat per_cell_outer;   // candidates x K
};

/// Scores every candidate: z_full[i] = sum_k outer(inner(o_ki, s), a_k).
FusionScores fuse(const MfcModel& model, const ActionVector& a, const UserState& s,
                  const std::vector<PredictionVector>& candidates);

/// The no-inner ablation: cells degenerate to the identity, so
/// z_full[i] = sum_k o_ki (1 + a_k o_ki).
FusionScores fuse_identity_inner(const ActionVector& a,
                                 const std::vector<PredictionVector>& candidates);

/// Indices of the n largest scores, descending; ties broken by lower index.
std::vector<int> rank_top_n(const Vec& scores, int n);

/// Caps quadratic pair enumeration: when the number of unordered candidate
/// pairs exceeds `cap`, a uniform sample of `cap` pairs is used instead.
struct PairSampling {
    int cap = 256;
    std::mt19937_64* rng = nullptr;
};

/// Pairwise hinge over candidate pairs ordered by o_k: penalizes inner
/// outputs that invert the prediction order. Zero iff every sampled pair is
/// respected. Strict indicator: equal predictions contribute nothing.
double mono_loss_inner(const MfcModel& model, const UserState& s,
                       const std::vector<PredictionVector>& candidates, int k,
                       std::optional<PairSampling> sampling = std::nullopt);

/// BPR-style knowledge transfer: -sum over pairs with z_full[i] < z_full[j]
/// of log sigmoid(z_inner[j] - z_inner[i]). z_full acts as constant labels.
double transfer_loss(const Vec& z_inner, const Vec& z_full,
                     std::optional<PairSampling> sampling = std::nullopt);

struct InnerLossReport {
    double total = 0.0;
    double mono = 0.0;      // sum over k of the monotonicity hinges
    double transfer = 0.0;
    std::vector<nn::NetGrad> grads;  // one per inner net
};

/// lambda * sum_k mono_k + (1 - lambda) * transfer, with exact gradients for
/// every inner net. Labels z_full are detached: no gradient flows into them.
InnerLossReport inner_total_loss(const MfcModel& model, const UserState& s,
                                 const std::vector<PredictionVector>& candidates,
                                 const Vec& z_full_labels, double lambda,
                                 std::optional<PairSampling> sampling = std::nullopt);

}  // namespace xmtf
