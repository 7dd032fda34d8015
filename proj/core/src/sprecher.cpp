#include "xmtf/sprecher.hpp"

#include "xmtf/baselines.hpp"

#include <cmath>
#include <limits>

namespace xmtf {

namespace {

constexpr double kEps = 1e-12;

double h_term(int row, double a, double beta, double o) {
    switch (row) {
        case 1: return a * o;
        case 2: return a * std::log(o + beta);
        case 3: return a * std::log(o);
    }
    throw ContractViolation("verify_representation: row must be 1, 2 or 3");
}

double g_of(int row, double x) { return row == 3 ? std::exp(x) : x; }

FormulaKind row_kind(int row) {
    switch (row) {
        case 1: return FormulaKind::linear;
        case 2: return FormulaKind::log_offset;
        case 3: return FormulaKind::power;
    }
    throw ContractViolation("verify_representation: row must be 1, 2 or 3");
}

}  // namespace

DecompositionReport verify_representation(int row, const Vec& a, const Vec& beta,
                                          int samples, std::mt19937_64& rng) {
    require(row >= 1 && row <= 3, "verify_representation: row must be 1, 2 or 3");
    require(a.size() >= 2, "verify_representation: need at least two feedback types");
    require((a.array() > 0.0).all(), "verify_representation: coefficients must be positive");
    require(beta.size() == a.size(), "verify_representation: beta shape mismatch");
    if (row == 2)
        require((beta.array() > 0.0).all(), "verify_representation: offsets must be positive");

    FusionFormula formula;
    formula.kind = row_kind(row);
    formula.a = a;
    formula.beta = beta;

    // Row 3 needs strictly positive inputs; keep away from the log singularity.
    std::uniform_real_distribution<double> draw(row == 3 ? 1e-6 : 0.0, 1.0);

    DecompositionReport report;
    report.samples = samples;
    for (int s = 0; s < samples; ++s) {
        PredictionVector o;
        o.values = Vec(a.size());
        for (int k = 0; k < a.size(); ++k) o.values[k] = draw(rng);

        double f = formula_eval(formula, o);
        double h_sum = 0.0;
        for (int k = 0; k < a.size(); ++k) h_sum += h_term(row, a[k], beta[k], o.values[k]);
        double composed = g_of(row, h_sum);

        double discrepancy = std::abs(f - composed) / std::max(std::abs(f), kEps);
        report.max_relative_discrepancy = std::max(report.max_relative_discrepancy, discrepancy);
    }
    return report;
}

double h_monotonicity_margin(int row, const Vec& a, const Vec& beta, int grid_points) {
    require(grid_points >= 2, "h_monotonicity_margin: need at least two grid points");
    require((a.array() > 0.0).all(), "h_monotonicity_margin: coefficients must be positive");
    const double lo = (row == 1 || row == 2) ? 0.0 : 1e-6;
    double min_margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < a.size(); ++k) {
        double prev = h_term(row, a[k], beta.size() ? beta[k] : 0.0, lo);
        for (int g = 1; g < grid_points; ++g) {
            double o = lo + (1.0 - lo) * g / (grid_points - 1);
            double cur = h_term(row, a[k], beta.size() ? beta[k] : 0.0, o);
            min_margin = std::min(min_margin, cur - prev);
            prev = cur;
        }
    }
    return min_margin;
}

}  // namespace xmtf
