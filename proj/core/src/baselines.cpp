#include "xmtf/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace xmtf {

std::string to_string(FormulaKind kind) {
    switch (kind) {
        case FormulaKind::linear: return "linear";
        case FormulaKind::log_offset: return "log_offset";
        case FormulaKind::power: return "power";
    }
    return "linear";
}

FormulaKind formula_kind_from_string(const std::string& name) {
    if (name == "linear") return FormulaKind::linear;
    if (name == "log_offset") return FormulaKind::log_offset;
    if (name == "power") return FormulaKind::power;
    throw ContractViolation("unknown formula kind: " + name);
}

FusionFormula make_formula(FormulaKind kind, const Vec& coefficients, double beta_offset) {
    FusionFormula f;
    f.kind = kind;
    f.a = coefficients;
    f.beta = Vec::Constant(coefficients.size(), beta_offset);
    return f;
}

double formula_eval(const FusionFormula& formula, const PredictionVector& o) {
    require(o.values.size() == formula.a.size(), "formula_eval: dimension mismatch");
    switch (formula.kind) {
        case FormulaKind::linear:
            return formula.a.dot(o.values);
        case FormulaKind::log_offset: {
            double z = 0.0;
            for (int k = 0; k < o.values.size(); ++k) {
                double base = o.values[k] + formula.beta[k];
                require(base > 0.0, "formula_eval: log argument must be positive");
                z += formula.a[k] * std::log(base);
            }
            return z;
        }
        case FormulaKind::power: {
            double z = 1.0;
            for (int k = 0; k < o.values.size(); ++k) {
                require(o.values[k] > 0.0, "formula_eval: power base must be positive");
                z *= std::pow(o.values[k], formula.a[k]);
            }
            return z;
        }
    }
    return 0.0;
}

CemResult cem_optimize(const Objective& objective, const CemConfig& config,
                       std::mt19937_64& rng) {
    require(config.population >= 8, "cem_optimize: population must be at least 8");
    require(config.elite_fraction > 0.0 && config.elite_fraction <= 1.0,
            "cem_optimize: elite_fraction must lie in (0,1]");
    require(config.init_mean.size() > 0, "cem_optimize: init_mean is empty");
    require(config.init_std.size() == config.init_mean.size(),
            "cem_optimize: init_std shape mismatch");
    require((config.init_std.array() > 0.0).all(),
            "cem_optimize: init_std entries must be positive");

    const int dim = static_cast<int>(config.init_mean.size());
    const int elites = std::max(1, static_cast<int>(config.population * config.elite_fraction));

    Vec mean = config.init_mean;
    Vec stddev = config.init_std;

    CemResult result;
    result.best = mean;
    result.best_objective = -std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < config.iterations; ++iter) {
        std::vector<Vec> samples(static_cast<std::size_t>(config.population));
        {
            std::normal_distribution<double> unit(0.0, 1.0);
            for (auto& s : samples) {
                s = Vec(dim);
                for (int d = 0; d < dim; ++d) s[d] = mean[d] + stddev[d] * unit(rng);
                if (config.clamp_high > config.clamp_low)
                    s = s.cwiseMax(config.clamp_low).cwiseMin(config.clamp_high);
            }
        }

        std::vector<double> values(samples.size());
        parallel_for(config.population, config.workers, [&](int i) {
            values[static_cast<std::size_t>(i)] = objective(samples[static_cast<std::size_t>(i)]);
        });
        for (double v : values)
            require(std::isfinite(v), "cem_optimize: objective returned a non-finite value");

        std::vector<int> order(samples.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (values[static_cast<std::size_t>(a)] != values[static_cast<std::size_t>(b)])
                return values[static_cast<std::size_t>(a)] > values[static_cast<std::size_t>(b)];
            return a < b;
        });

        if (values[static_cast<std::size_t>(order[0])] > result.best_objective) {
            result.best_objective = values[static_cast<std::size_t>(order[0])];
            result.best = samples[static_cast<std::size_t>(order[0])];
        }

        Vec elite_mean = Vec::Zero(dim);
        for (int e = 0; e < elites; ++e)
            elite_mean += samples[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])];
        elite_mean /= elites;
        Vec elite_var = Vec::Zero(dim);
        for (int e = 0; e < elites; ++e) {
            Vec d = samples[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])] - elite_mean;
            elite_var += d.cwiseProduct(d);
        }
        elite_var /= std::max(1, elites);
        mean = elite_mean;
        stddev = elite_var.cwiseSqrt().cwiseMax(config.std_floor);

        result.history.push_back({iter, mean, stddev, result.best_objective});
    }
    return result;
}

}  // namespace xmtf
