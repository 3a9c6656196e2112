#include "fri/lupi.hpp"

#include <cmath>
#include <stdexcept>

#include "fri/parallel.hpp"

namespace fri::lupi {

using data::LupiDataset;
using relevance::RelevanceInterval;

namespace {

// Shared constraint system of the privileged-information LP.
// Blocks: w / w_hat / b / ws_chi / ws_chi_hat / ws_xi / ws_xi_hat /
// d_chi / d_xi. Samples in bins 1..l-1 get a lower-side margin row whose
// slack is the chi function; bins 2..l get the upper-side row with the xi
// function; both functions are pinned non-negative at every sample where
// they appear.
lp::LpBuilder assemble_lupi_lp(const LupiDataset& data) {
    const auto& d = data.regular;
    const int n = d.num_features();
    const int ns = data.num_privileged();
    const int m = d.num_samples();
    const int l = d.l;

    lp::BlockLayout layout;
    layout.add_block("w", n);
    layout.add_block("w_hat", n);
    layout.add_block("b", l - 1);
    layout.add_block("ws_chi", ns);
    layout.add_block("ws_chi_hat", ns);
    layout.add_block("ws_xi", ns);
    layout.add_block("ws_xi_hat", ns);
    layout.add_block("d_chi", l - 1);
    layout.add_block("d_xi", l - 1);
    lp::LpBuilder builder(std::move(layout));

    for (int k = 0; k < n; ++k) builder.set_bounds("w_hat", k, 0.0, lp::kInf);
    for (int k = 0; k < ns; ++k) {
        builder.set_bounds("ws_chi_hat", k, 0.0, lp::kInf);
        builder.set_bounds("ws_xi_hat", k, 0.0, lp::kInf);
    }

    auto add_w_terms = [&](int i, double sign) {
        for (int k = 0; k < n; ++k)
            builder.add_term("w", k, sign * d.X(i, k));
    };
    auto add_star_terms = [&](const std::string& block, int i, double sign) {
        for (int k = 0; k < ns; ++k)
            builder.add_term(block, k, sign * data.X_star(i, k));
    };

    for (int i = 0; i < m; ++i) {
        const int j = d.y[i];
        if (j <= l - 1) {
            // w.x_i - b_j + 1 <= chi-slack function of sample i
            builder.begin_row(lp::Relation::LessEq, -1.0);
            add_w_terms(i, 1.0);
            builder.add_term("b", j - 1, -1.0);
            add_star_terms("ws_chi", i, -1.0);
            builder.add_term("d_chi", j - 1, -1.0);
            // slack function itself must be non-negative
            builder.begin_row(lp::Relation::GreaterEq, 0.0);
            add_star_terms("ws_chi", i, 1.0);
            builder.add_term("d_chi", j - 1, 1.0);
        }
        if (j >= 2) {
            // w.x_i - b_{j-1} >= 1 - xi-slack function of sample i
            builder.begin_row(lp::Relation::GreaterEq, 1.0);
            add_w_terms(i, 1.0);
            builder.add_term("b", j - 2, -1.0);
            add_star_terms("ws_xi", i, 1.0);
            builder.add_term("d_xi", j - 2, 1.0);
            builder.begin_row(lp::Relation::GreaterEq, 0.0);
            add_star_terms("ws_xi", i, 1.0);
            builder.add_term("d_xi", j - 2, 1.0);
        }
    }

    for (int j = 0; j + 1 < l - 1; ++j) {
        builder.begin_row(lp::Relation::LessEq, 0.0);
        builder.add_term("b", j, 1.0);
        builder.add_term("b", j + 1, -1.0);
    }

    // |.| linearization for every weight block.
    auto abs_rows = [&](const std::string& var, const std::string& hat,
                        int count) {
        for (int k = 0; k < count; ++k) {
            builder.begin_row(lp::Relation::LessEq, 0.0);
            builder.add_term(var, k, 1.0);
            builder.add_term(hat, k, -1.0);
            builder.begin_row(lp::Relation::LessEq, 0.0);
            builder.add_term(var, k, -1.0);
            builder.add_term(hat, k, -1.0);
        }
    };
    abs_rows("w", "w_hat", n);
    abs_rows("ws_chi", "ws_chi_hat", ns);
    abs_rows("ws_xi", "ws_xi_hat", ns);

    return builder;
}

// Total slack loss is linear: sum over lower-side samples of the chi
// function plus sum over upper-side samples of the xi function. Adds the
// coefficients to the given row/objective through the callback.
template <typename AddTerm>
void add_slack_loss_terms(const LupiDataset& data, double scale,
                          AddTerm&& add) {
    const auto& d = data.regular;
    const int ns = data.num_privileged();
    const int l = d.l;
    Eigen::VectorXd chi_cols = Eigen::VectorXd::Zero(ns);
    Eigen::VectorXd xi_cols = Eigen::VectorXd::Zero(ns);
    Eigen::VectorXd chi_counts = Eigen::VectorXd::Zero(l - 1);
    Eigen::VectorXd xi_counts = Eigen::VectorXd::Zero(l - 1);
    for (int i = 0; i < d.num_samples(); ++i) {
        const int j = d.y[i];
        if (j <= l - 1) {
            chi_cols += data.X_star.row(i);
            chi_counts[j - 1] += 1.0;
        }
        if (j >= 2) {
            xi_cols += data.X_star.row(i);
            xi_counts[j - 2] += 1.0;
        }
    }
    for (int k = 0; k < ns; ++k) {
        add("ws_chi", k, scale * chi_cols[k]);
        add("ws_xi", k, scale * xi_cols[k]);
    }
    for (int j = 0; j < l - 1; ++j) {
        add("d_chi", j, scale * chi_counts[j]);
        add("d_xi", j, scale * xi_counts[j]);
    }
}

void set_lupi_objective(lp::LpBuilder& builder, const LupiDataset& data,
                        const LupiHyperParams& params) {
    const int n = data.regular.num_features();
    const int ns = data.num_privileged();
    for (int k = 0; k < n; ++k) builder.set_objective("w_hat", k, 0.5);
    for (int k = 0; k < ns; ++k) {
        builder.set_objective("ws_chi_hat", k, 0.5 * params.gamma);
        builder.set_objective("ws_xi_hat", k, 0.5 * params.gamma);
    }
    add_slack_loss_terms(data, params.C,
                         [&](const std::string& block, int i, double coef) {
                             if (coef != 0.0) {
                                 // accumulate: slack columns may already
                                 // carry a value only via this path
                                 builder.set_objective(block, i, coef);
                             }
                         });
}

// Budget row: full objective <= (1+delta) * mu_X.
void add_budget_row(lp::LpBuilder& builder, const LupiDataset& data,
                    const LupiModelSolution& baseline,
                    const LupiRelevanceParams& params) {
    const int n = data.regular.num_features();
    const int ns = data.num_privileged();
    builder.begin_row(lp::Relation::LessEq,
                      (1.0 + params.delta) * baseline.mu_X);
    for (int k = 0; k < n; ++k) builder.add_term("w_hat", k, 0.5);
    for (int k = 0; k < ns; ++k) {
        builder.add_term("ws_chi_hat", k, 0.5 * params.gamma);
        builder.add_term("ws_xi_hat", k, 0.5 * params.gamma);
    }
    add_slack_loss_terms(data, params.C,
                         [&](const std::string& block, int i, double coef) {
                             builder.add_term(block, i, coef);
                         });
}

void check_params(const LupiHyperParams& p) {
    if (!(p.C > 0.0)) throw std::invalid_argument("lupi fit: C must be > 0");
    if (p.gamma < 0.0)
        throw std::invalid_argument("lupi fit: gamma must be >= 0");
}

Eigen::VectorXd block_values(const lp::BlockLayout& layout,
                             const Eigen::VectorXd& x,
                             const std::string& name) {
    const int size = layout.size(name);
    Eigen::VectorXd out(size);
    for (int i = 0; i < size; ++i) out[i] = x[layout.col(name, i)];
    return out;
}

enum class Side { Chi, Xi };

std::string weight_block(Side s) { return s == Side::Chi ? "ws_chi" : "ws_xi"; }
std::string hat_block(Side s) {
    return s == Side::Chi ? "ws_chi_hat" : "ws_xi_hat";
}

// One privileged bound LP; nullopt marks an infeasible sign-restricted
// side, minimization infeasibility is an error upstream.
std::optional<double> priv_bound_lp(const LupiDataset& data,
                                    const LupiModelSolution& baseline,
                                    int p, const LupiRelevanceParams& params,
                                    Side side, int lambda) {
    lp::LpBuilder builder = assemble_lupi_lp(data);
    add_budget_row(builder, data, baseline, params);
    if (lambda == 0) {
        builder.set_objective(hat_block(side), p, 1.0);
    } else {
        builder.set_objective(hat_block(side), p, -1.0);
        builder.begin_row(lp::Relation::LessEq, 0.0);
        builder.add_term(hat_block(side), p, 1.0);
        builder.add_term(weight_block(side), p, -static_cast<double>(lambda));
    }
    const auto sol = lp::solve(builder.build());
    if (sol.status == lp::Status::Optimal)
        return lambda == 0 ? *sol.objective_value : -*sol.objective_value;
    if (sol.status == lp::Status::Infeasible) return std::nullopt;
    throw std::runtime_error("privileged bound LP failed: " +
                             lp::to_string(sol.status));
}

std::optional<double> regular_bound_lp(const LupiDataset& data,
                                       const LupiModelSolution& baseline,
                                       int j,
                                       const LupiRelevanceParams& params,
                                       int lambda) {
    lp::LpBuilder builder = assemble_lupi_lp(data);
    add_budget_row(builder, data, baseline, params);
    if (lambda == 0) {
        builder.set_objective("w_hat", j, 1.0);
    } else {
        builder.set_objective("w_hat", j, -1.0);
        builder.begin_row(lp::Relation::LessEq, 0.0);
        builder.add_term("w_hat", j, 1.0);
        builder.add_term("w", j, -static_cast<double>(lambda));
    }
    const auto sol = lp::solve(builder.build());
    if (sol.status == lp::Status::Optimal)
        return lambda == 0 ? *sol.objective_value : -*sol.objective_value;
    if (sol.status == lp::Status::Infeasible) return std::nullopt;
    throw std::runtime_error("regular bound LP failed: " +
                             lp::to_string(sol.status));
}

void check_baseline(const LupiModelSolution& baseline,
                    const LupiRelevanceParams& params) {
    if (std::abs(baseline.C - params.C) > 0.0 ||
        std::abs(baseline.gamma - params.gamma) > 0.0)
        throw std::invalid_argument("lupi relevance: baseline params mismatch");
    if (params.delta < 0.0)
        throw std::invalid_argument("lupi relevance: delta must be >= 0");
}


/// Bound values below LP feasibility noise are numerically zero.
double snap_zero(double v) { return v < 1e-9 ? 0.0 : v; }
}  // namespace

LupiModelSolution fit_lupi(const LupiDataset& data,
                           const LupiHyperParams& params,
                           const lp::SolverTolerances& tol) {
    check_params(params);
    lp::LpBuilder builder = assemble_lupi_lp(data);
    set_lupi_objective(builder, data, params);
    const lp::LpProblem problem = builder.build();
    const lp::LpSolution sol = lp::solve(problem, tol);
    if (!sol.optimal())
        throw std::runtime_error("lupi baseline fit failed: " +
                                 lp::to_string(sol.status));
    const auto& layout = builder.layout();
    LupiModelSolution out;
    out.w = block_values(layout, *sol.point, "w");
    out.b = block_values(layout, *sol.point, "b");
    out.w_star_chi = block_values(layout, *sol.point, "ws_chi");
    out.w_star_xi = block_values(layout, *sol.point, "ws_xi");
    out.d_chi = block_values(layout, *sol.point, "d_chi");
    out.d_xi = block_values(layout, *sol.point, "d_xi");
    out.mu_X = *sol.objective_value;
    out.w_l1 = out.w.cwiseAbs().sum();
    out.w_star_l1 =
        out.w_star_chi.cwiseAbs().sum() + out.w_star_xi.cwiseAbs().sum();
    out.C = params.C;
    out.gamma = params.gamma;
    out.slack_loss =
        (out.mu_X - 0.5 * out.w_l1 - 0.5 * params.gamma * out.w_star_l1) /
        params.C;
    return out;
}

double minrel_privileged(const LupiDataset& data,
                         const LupiModelSolution& baseline, int p,
                         const LupiRelevanceParams& params) {
    check_baseline(baseline, params);
    double best = 0.0;
    bool any = false;
    for (Side side : {Side::Chi, Side::Xi}) {
        auto v = priv_bound_lp(data, baseline, p, params, side, 0);
        if (!v)
            throw std::runtime_error(
                "privileged minrel LP infeasible: baseline outside its own "
                "budget");
        best = any ? std::max(best, *v) : *v;
        any = true;
    }
    return snap_zero(best);
}

double maxrel_privileged(const LupiDataset& data,
                         const LupiModelSolution& baseline, int p,
                         const LupiRelevanceParams& params) {
    check_baseline(baseline, params);
    double best = 0.0;
    bool any = false;
    for (Side side : {Side::Chi, Side::Xi}) {
        for (int lambda : {1, -1}) {
            auto v = priv_bound_lp(data, baseline, p, params, side, lambda);
            if (!v) continue;
            best = any ? std::max(best, *v) : *v;
            any = true;
        }
    }
    if (!any)
        throw std::runtime_error(
            "privileged maxrel: all four sign-restricted LPs infeasible");
    return snap_zero(best);
}

double minrel_regular(const LupiDataset& data,
                      const LupiModelSolution& baseline, int j,
                      const LupiRelevanceParams& params) {
    check_baseline(baseline, params);
    auto v = regular_bound_lp(data, baseline, j, params, 0);
    if (!v)
        throw std::runtime_error(
            "regular minrel LP infeasible: baseline outside its own budget");
    return snap_zero(*v);
}

double maxrel_regular(const LupiDataset& data,
                      const LupiModelSolution& baseline, int j,
                      const LupiRelevanceParams& params) {
    check_baseline(baseline, params);
    double best = 0.0;
    bool any = false;
    for (int lambda : {1, -1}) {
        auto v = regular_bound_lp(data, baseline, j, params, lambda);
        if (!v) continue;
        best = any ? std::max(best, *v) : *v;
        any = true;
    }
    if (!any)
        throw std::runtime_error(
            "regular maxrel: both sign-restricted LPs infeasible");
    return snap_zero(best);
}

LupiProfileResult relevance_profile_lupi(const LupiDataset& data,
                                         const LupiRelevanceParams& params,
                                         int parallelism, bool normalize) {
    LupiProfileResult out;
    out.baseline = fit_lupi(data, {params.C, params.gamma});
    const int n = data.regular.num_features();
    const int ns = data.num_privileged();
    out.regular.resize(n);
    out.privileged.resize(ns);

    parallel_for(n + ns, parallelism, [&](int job) {
        if (job < n) {
            RelevanceInterval iv;
            iv.feature = job;
            iv.baseline_weight = std::abs(out.baseline.w[job]);
            try {
                iv.lower = minrel_regular(data, out.baseline, job, params);
                iv.upper = maxrel_regular(data, out.baseline, job, params);
            } catch (const std::exception& e) {
                iv.failure = e.what();
            }
            out.regular[job] = iv;
        } else {
            const int p = job - n;
            RelevanceInterval iv;
            iv.feature = p;
            iv.baseline_weight = std::max(std::abs(out.baseline.w_star_chi[p]),
                                          std::abs(out.baseline.w_star_xi[p]));
            try {
                iv.lower = minrel_privileged(data, out.baseline, p, params);
                iv.upper = maxrel_privileged(data, out.baseline, p, params);
            } catch (const std::exception& e) {
                iv.failure = e.what();
            }
            out.privileged[p] = iv;
        }
    });

    for (const auto& iv : out.regular)
        if (iv.failure) out.any_failure = true;
    for (const auto& iv : out.privileged)
        if (iv.failure) out.any_failure = true;

    if (normalize) {
        const double reg_norm = out.baseline.w_l1;
        const double priv_norm = out.baseline.w_star_l1;
        if (reg_norm > 0.0)
            for (auto& iv : out.regular) {
                iv.lower /= reg_norm;
                iv.upper /= reg_norm;
                iv.baseline_weight /= reg_norm;
                iv.normalized = true;
            }
        if (priv_norm > 0.0)
            for (auto& iv : out.privileged) {
                iv.lower /= priv_norm;
                iv.upper /= priv_norm;
                iv.baseline_weight /= priv_norm;
                iv.normalized = true;
            }
    }
    return out;
}

}  // namespace fri::lupi
