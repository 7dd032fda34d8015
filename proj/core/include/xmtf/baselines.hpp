#pragma once

// Formula-based competitors: the classic fusion formulas, cross-entropy
// coefficient search, and the formula-based actor-critic baseline declared
// here and trained with the shared outer-stage machinery.

#include "xmtf/types.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace xmtf {

enum class FormulaKind { linear, log_offset, power };

std::string to_string(FormulaKind kind);
FormulaKind formula_kind_from_string(const std::string& name);

struct FusionFormula {
    FormulaKind kind = FormulaKind::linear;
    Vec a;     // coefficients
    Vec beta;  // offsets, log_offset only
};

FusionFormula make_formula(FormulaKind kind, const Vec& coefficients, double beta_offset = 0.01);

/// linear: sum a_k o_k; log_offset: sum a_k log(o_k + beta_k);
/// power: prod o_k^{a_k}. Domain violations (log of a nonpositive value,
/// power of a nonpositive base) are contract errors.
double formula_eval(const FusionFormula& formula, const PredictionVector& o);

struct CemConfig {
    int population = 64;
    double elite_fraction = 0.125;
    int iterations = 40;
    Vec init_mean;
    Vec init_std;
    // Samples are clamped into [low, high] before evaluation when high > low.
    double clamp_low = 0.0;
    double clamp_high = 0.0;
    double std_floor = 1e-4;
    int workers = 1;
};

struct CemIterRecord {
    int iteration = 0;
    Vec mean;
    Vec std;
    double best_objective = 0.0;  // best-ever after this iteration
};

struct CemResult {
    Vec best;
    double best_objective = 0.0;
    std::vector<CemIterRecord> history;
};

using Objective = std::function<double(const Vec&)>;

/// Maximizes the objective: sample N(mean, diag std^2), evaluate, refit the
/// Gaussian to the elite fraction, track best-ever.
CemResult cem_optimize(const Objective& objective, const CemConfig& config,
                       std::mt19937_64& rng);

}  // namespace xmtf
