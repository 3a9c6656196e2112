#pragma once

#include <utility>
#include <vector>

#include "fri/data.hpp"
#include "fri/lp.hpp"
#include "fri/relevance.hpp"

namespace fri::lupi {

struct LupiHyperParams {
    double C = 1.0;
    double gamma = 1.0;  // scale of the privileged-weight penalty
};

/// Optimum of the privileged-information ordinal-regression LP, where the
/// per-sample slacks are linear functions of the privileged block:
/// lower-side slack <w*_chi, x*_i> + d_chi[j], upper-side slack
/// <w*_xi, x*_i> + d_xi[j], both constrained non-negative at every
/// training sample.
struct LupiModelSolution {
    Eigen::VectorXd w;           // length n
    Eigen::VectorXd b;           // length l-1, non-decreasing
    Eigen::VectorXd w_star_chi;  // length n*
    Eigen::VectorXd w_star_xi;   // length n*
    Eigen::VectorXd d_chi;       // length l-1
    Eigen::VectorXd d_xi;        // length l-1
    double mu_X = 0.0;           // optimal objective
    double w_l1 = 0.0;
    double w_star_l1 = 0.0;      // ||w*_chi||_1 + ||w*_xi||_1
    double slack_loss = 0.0;     // total slack-function value
    double C = 1.0;
    double gamma = 1.0;
};

/// Minimizes 1/2||w||_1 + (gamma/2)(||w*_chi||_1 + ||w*_xi||_1)
/// + C * (total slack loss) under the explicit-order margin constraints.
LupiModelSolution fit_lupi(const data::LupiDataset& data,
                           const LupiHyperParams& params,
                           const lp::SolverTolerances& tol = {});

struct LupiRelevanceParams {
    double delta = 0.001;
    double C = 1.0;
    double gamma = 1.0;
};

/// Lower relevance bound of privileged feature p: the larger of the two
/// LPs minimizing the chi-side and xi-side weight magnitude under the
/// full-objective budget <= (1+delta) * mu_X.
double minrel_privileged(const data::LupiDataset& data,
                         const LupiModelSolution& baseline, int p,
                         const LupiRelevanceParams& params);

/// Upper bound: maximum of four sign-restricted LPs (chi/xi x +-).
double maxrel_privileged(const data::LupiDataset& data,
                         const LupiModelSolution& baseline, int p,
                         const LupiRelevanceParams& params);

/// Regular-feature bounds under the same budget (3 LPs, mirroring the
/// non-privileged construction).
double minrel_regular(const data::LupiDataset& data,
                      const LupiModelSolution& baseline, int j,
                      const LupiRelevanceParams& params);
double maxrel_regular(const data::LupiDataset& data,
                      const LupiModelSolution& baseline, int j,
                      const LupiRelevanceParams& params);

struct LupiProfileResult {
    LupiModelSolution baseline;
    std::vector<relevance::RelevanceInterval> regular;
    std::vector<relevance::RelevanceInterval> privileged;
    bool any_failure = false;
};

/// 3 LPs per regular feature, 6 per privileged feature, independent jobs
/// merged by index.
LupiProfileResult relevance_profile_lupi(const data::LupiDataset& data,
                                         const LupiRelevanceParams& params,
                                         int parallelism = 1,
                                         bool normalize = false);

}  // namespace fri::lupi
