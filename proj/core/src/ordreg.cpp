#include "fri/ordreg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fri/rng.hpp"

namespace fri::ordreg {

std::string to_string(Variant v) {
    return v == Variant::Explicit ? "explicit" : "implicit";
}

MarginLp assemble_margin_lp(const data::Dataset& data, Variant variant) {
    const int n = data.num_features();
    const int m = data.num_samples();
    const int l = data.l;
    const auto bins = data.bin_members();

    // Slack layout.
    // Explicit: one chi per sample in bins 1..l-1, one xi per sample in
    // bins 2..l. Implicit: one slack per (sample, threshold) pair.
    int n_chi = 0, n_xi = 0;
    if (variant == Variant::Explicit) {
        for (int i = 0; i < m; ++i) {
            if (data.y[i] <= l - 1) ++n_chi;
            if (data.y[i] >= 2) ++n_xi;
        }
    } else {
        for (int j = 1; j <= l - 1; ++j) {
            for (int i = 0; i < m; ++i) {
                if (data.y[i] <= j) ++n_chi;
                else ++n_xi;
            }
        }
    }

    lp::BlockLayout layout;
    layout.add_block("w", n);
    layout.add_block("w_hat", n);
    layout.add_block("b", l - 1);
    layout.add_block("chi", n_chi);
    layout.add_block("xi", n_xi);
    lp::LpBuilder builder(std::move(layout));

    for (int k = 0; k < n; ++k) builder.set_bounds("w_hat", k, 0.0, lp::kInf);
    for (int s = 0; s < n_chi; ++s) builder.set_bounds("chi", s, 0.0, lp::kInf);
    for (int s = 0; s < n_xi; ++s) builder.set_bounds("xi", s, 0.0, lp::kInf);

    auto add_w_terms = [&](int i) {
        for (int k = 0; k < n; ++k) builder.add_term("w", k, data.X(i, k));
    };

    int chi_at = 0, xi_at = 0;
    if (variant == Variant::Explicit) {
        // w.x_i - b_j <= -1 + chi for samples in bin j (j <= l-1)
        // w.x_i - b_{j-1} >= 1 - xi for samples in bin j (j >= 2)
        for (int i = 0; i < m; ++i) {
            const int j = data.y[i];
            if (j <= l - 1) {
                builder.begin_row(lp::Relation::LessEq, -1.0);
                add_w_terms(i);
                builder.add_term("b", j - 1, -1.0);
                builder.add_term("chi", chi_at++, -1.0);
            }
            if (j >= 2) {
                builder.begin_row(lp::Relation::GreaterEq, 1.0);
                add_w_terms(i);
                builder.add_term("b", j - 2, -1.0);
                builder.add_term("xi", xi_at++, 1.0);
            }
        }
        for (int j = 0; j + 1 < l - 1; ++j) {
            builder.begin_row(lp::Relation::LessEq, 0.0);
            builder.add_term("b", j, 1.0);
            builder.add_term("b", j + 1, -1.0);
        }
    } else {
        // Every sample constrained against every threshold.
        for (int j = 1; j <= l - 1; ++j) {
            for (int i = 0; i < m; ++i) {
                if (data.y[i] <= j) {
                    builder.begin_row(lp::Relation::LessEq, -1.0);
                    add_w_terms(i);
                    builder.add_term("b", j - 1, -1.0);
                    builder.add_term("chi", chi_at++, -1.0);
                } else {
                    builder.begin_row(lp::Relation::GreaterEq, 1.0);
                    add_w_terms(i);
                    builder.add_term("b", j - 1, -1.0);
                    builder.add_term("xi", xi_at++, 1.0);
                }
            }
        }
    }

    // |w| linearization: w_k <= w_hat_k and -w_k <= w_hat_k.
    for (int k = 0; k < n; ++k) {
        builder.begin_row(lp::Relation::LessEq, 0.0);
        builder.add_term("w", k, 1.0);
        builder.add_term("w_hat", k, -1.0);
        builder.begin_row(lp::Relation::LessEq, 0.0);
        builder.add_term("w", k, -1.0);
        builder.add_term("w_hat", k, -1.0);
    }

    return MarginLp{std::move(builder), n_chi, n_xi};
}

namespace {

ModelSolution extract_solution(const lp::LpProblem& problem,
                               const lp::BlockLayout& layout,
                               const Eigen::VectorXd& x, double C,
                               Variant variant, double objective) {
    ModelSolution sol;
    sol.C = C;
    sol.variant = variant;
    sol.mu_X = objective;
    const int n = layout.size("w");
    sol.w = x.segment(layout.offset("w"), n);
    sol.b = x.segment(layout.offset("b"), layout.size("b"));
    sol.chi = x.segment(layout.offset("chi"), layout.size("chi"));
    sol.xi = x.segment(layout.offset("xi"), layout.size("xi"));
    sol.w_l1 = sol.w.cwiseAbs().sum();
    sol.slack_sum = sol.chi.sum() + sol.xi.sum();
    (void)problem;
    return sol;
}

}  // namespace

ModelSolution fit(const data::Dataset& data, const HyperParams& params,
                  const lp::SolverTolerances& tol) {
    if (params.C <= 0.0) throw std::invalid_argument("fit: C must be > 0");
    MarginLp mlp = assemble_margin_lp(data, params.variant);
    const int n = data.num_features();
    for (int k = 0; k < n; ++k) mlp.builder.set_objective("w_hat", k, 0.5);
    for (int s = 0; s < mlp.n_chi; ++s)
        mlp.builder.set_objective("chi", s, params.C);
    for (int s = 0; s < mlp.n_xi; ++s)
        mlp.builder.set_objective("xi", s, params.C);

    const lp::LpProblem problem = mlp.builder.build();
    const lp::LpSolution sol = lp::solve(problem, tol);
    if (!sol.optimal())
        throw std::runtime_error("baseline fit failed: " +
                                 lp::to_string(sol.status));
    return extract_solution(problem, mlp.builder.layout(), *sol.point, params.C,
                            params.variant, *sol.objective_value);
}

ModelSolution fit_explicit(const data::Dataset& data, double C,
                           const lp::SolverTolerances& tol) {
    return fit(data, {C, Variant::Explicit}, tol);
}

ModelSolution fit_implicit(const data::Dataset& data, double C,
                           const lp::SolverTolerances& tol) {
    return fit(data, {C, Variant::Implicit}, tol);
}

int predict(const ModelSolution& model, const Eigen::VectorXd& x) {
    if (x.size() != model.w.size())
        throw std::invalid_argument("predict: dimension mismatch");
    const double proj = model.w.dot(x);
    for (int j = 0; j < model.b.size(); ++j)
        if (proj < model.b[j]) return j + 1;
    return static_cast<int>(model.b.size()) + 1;
}

std::vector<int> predict_all(const ModelSolution& model,
                             const Eigen::MatrixXd& X) {
    std::vector<int> out(X.rows());
    for (int i = 0; i < X.rows(); ++i) out[i] = predict(model, X.row(i));
    return out;
}

std::vector<double> default_c_grid() {
    std::vector<double> grid;
    for (int e = -6; e <= 6; ++e) grid.push_back(std::pow(2.0, e));
    return grid;
}

namespace {

// MMAE over non-empty true bins only; validation folds may miss a bin.
double fold_mmae(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                 int l) {
    std::vector<double> err(l, 0.0);
    std::vector<int> count(l, 0);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        err[y_true[i] - 1] += std::abs(y_true[i] - y_pred[i]);
        ++count[y_true[i] - 1];
    }
    double total = 0.0;
    int present = 0;
    for (int j = 0; j < l; ++j) {
        if (count[j] == 0) continue;
        total += err[j] / count[j];
        ++present;
    }
    return present > 0 ? total / present : 0.0;
}

// Round-robin within each bin after a seeded shuffle.
std::vector<int> assign_folds(const data::Dataset& data, int k_folds,
                              std::uint64_t seed) {
    std::vector<int> fold(data.num_samples(), -1);
    Rng rng(seed);
    int next = 0;
    for (const auto& members : data.bin_members()) {
        std::vector<int> order = members;
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.below(i)]);
        for (int idx : order) fold[idx] = (next++) % k_folds;
    }
    return fold;
}

bool folds_keep_all_bins(const data::Dataset& data,
                         const std::vector<int>& fold, int k_folds) {
    // Training partition f loses a bin iff the whole bin sits in fold f.
    for (const auto& members : data.bin_members()) {
        std::vector<bool> in_fold(k_folds, false);
        for (int idx : members) in_fold[fold[idx]] = true;
        int distinct = 0;
        for (bool b : in_fold) distinct += b;
        if (distinct == 1 && static_cast<int>(members.size()) > 0 &&
            k_folds > 1) {
            // A single-fold bin means k-1 training partitions are fine but
            // one loses the bin entirely.
            return false;
        }
    }
    return true;
}

}  // namespace

CvResult cross_validate(const data::Dataset& data, Variant variant,
                        const std::vector<double>& C_grid, int k_folds,
                        std::uint64_t seed) {
    if (k_folds < 2) throw std::invalid_argument("cv: k_folds must be >= 2");
    if (C_grid.empty()) throw std::invalid_argument("cv: empty C grid");

    std::vector<int> fold;
    bool ok = false;
    for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
        fold = assign_folds(data, k_folds, Rng::derive(seed, "cv", attempt));
        ok = folds_keep_all_bins(data, fold, k_folds);
    }
    if (!ok)
        throw std::runtime_error(
            "cv: could not build folds keeping every bin in every training "
            "partition (10 attempts)");

    CvResult result;
    result.mean_mmae.assign(C_grid.size(), 0.0);
    for (std::size_t c = 0; c < C_grid.size(); ++c) {
        double total = 0.0;
        for (int f = 0; f < k_folds; ++f) {
            std::vector<int> train_rows, val_rows;
            for (int i = 0; i < data.num_samples(); ++i)
                (fold[i] == f ? val_rows : train_rows).push_back(i);
            Eigen::MatrixXd Xt(train_rows.size(), data.num_features());
            std::vector<int> yt(train_rows.size());
            for (std::size_t i = 0; i < train_rows.size(); ++i) {
                Xt.row(i) = data.X.row(train_rows[i]);
                yt[i] = data.y[train_rows[i]];
            }
            const data::Dataset train(std::move(Xt), std::move(yt), data.l);
            const ModelSolution model = fit(train, {C_grid[c], variant});
            std::vector<int> y_true, y_pred;
            for (int i : val_rows) {
                y_true.push_back(data.y[i]);
                y_pred.push_back(predict(model, data.X.row(i)));
            }
            total += fold_mmae(y_true, y_pred, data.l);
        }
        result.mean_mmae[c] = total / k_folds;
    }

    // Smaller C wins ties.
    std::vector<std::size_t> order(C_grid.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return C_grid[a] < C_grid[b]; });
    std::size_t best = order[0];
    for (std::size_t i : order)
        if (result.mean_mmae[i] < result.mean_mmae[best] - 1e-12) best = i;
    result.best_C = C_grid[best];
    return result;
}

}  // namespace fri::ordreg
