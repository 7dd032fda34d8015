#pragma once

#include "xmtf/common.hpp"

#include <vector>

namespace xmtf {

/// The K per-item feedback predictions produced upstream of fusion,
/// each in [0,1].
struct PredictionVector {
    Vec values;

    int size() const { return static_cast<int>(values.size()); }
};

/// Request context: user latent-profile block, behavior-history summary
/// block, normalized request index. Fixed dimension across a run.
struct UserState {
    Vec features;
};

/// The K outer-stage coefficients, one per feedback type; the RL action.
struct ActionVector {
    Vec a;
};

/// One replay-buffer record.
struct SessionTransition {
    UserState s;
    ActionVector a;
    double reward = 0.0;  // request watch time, seconds
    std::vector<PredictionVector> predictions;
    UserState s_next;
    bool done = false;
};

inline void check_prediction(const PredictionVector& p, int k_expected) {
    require(p.size() == k_expected, "prediction vector has wrong length");
    require(p.values.allFinite(), "prediction vector has non-finite entries");
    require((p.values.array() >= 0.0).all() && (p.values.array() <= 1.0).all(),
            "prediction values must lie in [0,1]");
}

}  // namespace xmtf
