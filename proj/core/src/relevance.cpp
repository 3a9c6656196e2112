#include "fri/relevance.hpp"

#include <cmath>
#include <stdexcept>

#include "fri/parallel.hpp"

namespace fri::relevance {

std::string to_string(ConstraintMode m) {
    return m == ConstraintMode::Combined ? "combined" : "split";
}

namespace {

void add_budget_rows(ordreg::MarginLp& mlp,
                     const ordreg::ModelSolution& baseline,
                     const RelevanceParams& params, int n) {
    auto& b = mlp.builder;
    if (params.constraint_mode == ConstraintMode::Combined) {
        // 1/2 sum w_hat + C * total slack <= (1+delta) mu_X
        b.begin_row(lp::Relation::LessEq, (1.0 + params.delta) * baseline.mu_X);
        for (int k = 0; k < n; ++k) b.add_term("w_hat", k, 0.5);
        for (int s = 0; s < mlp.n_chi; ++s) b.add_term("chi", s, params.C);
        for (int s = 0; s < mlp.n_xi; ++s) b.add_term("xi", s, params.C);
    } else {
        // Split budgets: the norm term against (1+delta)||w~||_1 and the
        // slack term against the baseline slack total.
        b.begin_row(lp::Relation::LessEq, (1.0 + params.delta) * baseline.w_l1);
        for (int k = 0; k < n; ++k) b.add_term("w_hat", k, 0.5);
        b.begin_row(lp::Relation::LessEq, baseline.slack_sum);
        for (int s = 0; s < mlp.n_chi; ++s) b.add_term("chi", s, 1.0);
        for (int s = 0; s < mlp.n_xi; ++s) b.add_term("xi", s, 1.0);
    }
}

void check_baseline(const ordreg::ModelSolution& baseline,
                    const RelevanceParams& params) {
    if (baseline.variant != params.variant)
        throw std::invalid_argument("relevance: baseline variant mismatch");
    if (std::abs(baseline.C - params.C) > 0.0)
        throw std::invalid_argument("relevance: baseline C mismatch");
    if (params.delta < 0.0)
        throw std::invalid_argument("relevance: delta must be >= 0");
}

enum class Sense { Min, MaxPos, MaxNeg };

/// One bound LP. Returns nullopt for an infeasible sign-restricted side.
std::optional<double> bound_lp(const data::Dataset& data,
                               const ordreg::ModelSolution& baseline,
                               int feature, const RelevanceParams& params,
                               Sense sense) {
    const int n = data.num_features();
    if (feature < 0 || feature >= n)
        throw std::invalid_argument("relevance: feature index out of range");

    ordreg::MarginLp mlp = ordreg::assemble_margin_lp(data, params.variant);
    add_budget_rows(mlp, baseline, params, n);
    auto& b = mlp.builder;

    if (sense == Sense::Min) {
        b.set_objective("w_hat", feature, 1.0);
    } else {
        // Maximization solved as minimizing the negation.
        b.set_objective("w_hat", feature, -1.0);
        // w_hat_f <= lambda * w_f pins w_hat_f to |w_f| on the chosen side.
        b.begin_row(lp::Relation::LessEq, 0.0);
        b.add_term("w_hat", feature, 1.0);
        b.add_term("w", feature, sense == Sense::MaxPos ? -1.0 : 1.0);
    }

    const lp::LpSolution sol = lp::solve(b.build());
    switch (sol.status) {
        case lp::Status::Optimal:
            return sense == Sense::Min ? *sol.objective_value
                                       : -*sol.objective_value;
        case lp::Status::Infeasible:
            if (sense == Sense::Min)
                throw std::runtime_error(
                    "minrel LP infeasible (budget drift) for feature " +
                    std::to_string(feature));
            return std::nullopt;
        default:
            throw std::runtime_error("relevance LP failed (" +
                                     lp::to_string(sol.status) +
                                     ") for feature " + std::to_string(feature));
    }
}

/// Bound values below LP feasibility noise are numerically zero.
double snap_zero(double v) { return v < 1e-9 ? 0.0 : v; }

}  // namespace

double min_relevance(const data::Dataset& data,
                     const ordreg::ModelSolution& baseline, int feature,
                     const RelevanceParams& params) {
    check_baseline(baseline, params);
    return snap_zero(*bound_lp(data, baseline, feature, params, Sense::Min));
}

double max_relevance(const data::Dataset& data,
                     const ordreg::ModelSolution& baseline, int feature,
                     const RelevanceParams& params) {
    check_baseline(baseline, params);
    const auto pos = bound_lp(data, baseline, feature, params, Sense::MaxPos);
    const auto neg = bound_lp(data, baseline, feature, params, Sense::MaxNeg);
    if (!pos && !neg)
        throw std::runtime_error("both maxrel sides infeasible for feature " +
                                 std::to_string(feature));
    double best = -lp::kInf;
    if (pos) best = std::max(best, *pos);
    if (neg) best = std::max(best, *neg);
    return snap_zero(best);
}

std::pair<double, double> implicit_relevance_bounds(
    const data::Dataset& data, const ordreg::ModelSolution& baseline,
    int feature, const RelevanceParams& params) {
    if (baseline.variant != ordreg::Variant::Implicit)
        throw std::invalid_argument(
            "implicit_relevance_bounds: baseline must be the implicit variant");
    RelevanceParams p = params;
    p.variant = ordreg::Variant::Implicit;
    return {min_relevance(data, baseline, feature, p),
            max_relevance(data, baseline, feature, p)};
}

ProfileResult relevance_profile(const data::Dataset& data,
                                const RelevanceParams& params, int parallelism,
                                bool normalize) {
    ProfileResult result;
    result.baseline = ordreg::fit(data, {params.C, params.variant});
    const int n = data.num_features();
    result.intervals.assign(n, {});
    const double norm =
        normalize && result.baseline.w_l1 > 0.0 ? result.baseline.w_l1 : 1.0;

    parallel_for(n, parallelism, [&](int j) {
        RelevanceInterval& iv = result.intervals[j];
        iv.feature = j;
        iv.normalized = normalize;
        iv.baseline_weight = std::abs(result.baseline.w[j]) / norm;
        try {
            iv.lower = min_relevance(data, result.baseline, j, params) / norm;
            iv.upper = max_relevance(data, result.baseline, j, params) / norm;
        } catch (const std::exception& e) {
            iv.failure = e.what();
        }
    });
    for (const auto& iv : result.intervals)
        if (iv.failure) result.any_failure = true;
    return result;
}

}  // namespace fri::relevance
