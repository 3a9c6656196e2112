#pragma once

#include <cstdint>
#include <vector>

#include "fri/data.hpp"
#include "fri/lp.hpp"

namespace fri::ordreg {

enum class Variant { Explicit, Implicit };

std::string to_string(Variant v);

struct HyperParams {
    double C = 1.0;
    Variant variant = Variant::Explicit;
};

/// Optimal solution of the baseline ordinal-regression LP.
struct ModelSolution {
    Eigen::VectorXd w;       // length n
    Eigen::VectorXd b;       // length l-1, non-decreasing
    Eigen::VectorXd chi;     // slack values, layout per variant
    Eigen::VectorXd xi;
    double mu_X = 0.0;       // optimal objective
    double w_l1 = 0.0;       // ||w||_1 at the optimum
    double slack_sum = 0.0;  // total slack
    double C = 1.0;
    Variant variant = Variant::Explicit;
};

/// Margin-constraint skeleton shared by the baseline fit and every
/// relevance-bound LP: blocks w / w_hat / b / chi / xi, the per-sample
/// margin rows, threshold ordering (explicit variant), and the
/// absolute-value split w_i <= w_hat_i, -w_i <= w_hat_i.
struct MarginLp {
    lp::LpBuilder builder;
    int n_chi = 0;
    int n_xi = 0;
};

MarginLp assemble_margin_lp(const data::Dataset& data, Variant variant);

/// Fits min 1/2||w||_1 + C * total slack under the chosen constraint set.
ModelSolution fit_explicit(const data::Dataset& data, double C,
                           const lp::SolverTolerances& tol = {});
ModelSolution fit_implicit(const data::Dataset& data, double C,
                           const lp::SolverTolerances& tol = {});
ModelSolution fit(const data::Dataset& data, const HyperParams& params,
                  const lp::SolverTolerances& tol = {});

/// Smallest j with w.x < b_j, else l.
int predict(const ModelSolution& model, const Eigen::VectorXd& x);
std::vector<int> predict_all(const ModelSolution& model,
                             const Eigen::MatrixXd& X);

struct CvResult {
    double best_C = 1.0;
    std::vector<double> mean_mmae;  // parallel to the grid
};

/// Default grid 2^-6..2^6, 13 log-spaced values.
std::vector<double> default_c_grid();

/// Stratified k-fold selection of C; ties go to the smaller (stronger
/// regularization) value. A fold assignment that strips a bin from some
/// training partition is redrawn, at most 10 times.
CvResult cross_validate(const data::Dataset& data, Variant variant,
                        const std::vector<double>& C_grid, int k_folds,
                        std::uint64_t seed);

}  // namespace fri::ordreg
