#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fri/data.hpp"
#include "fri/ordreg.hpp"

namespace fri::relevance {

enum class ConstraintMode { Combined, Split };

std::string to_string(ConstraintMode m);

struct RelevanceParams {
    double delta = 0.001;
    double C = 1.0;
    ConstraintMode constraint_mode = ConstraintMode::Split;
    ordreg::Variant variant = ordreg::Variant::Explicit;
};

struct RelevanceInterval {
    int feature = 0;
    double lower = 0.0;   // minrel
    double upper = 0.0;   // maxrel
    bool normalized = false;
    double baseline_weight = 0.0;  // |w~_feature| (normalized if requested)
    std::optional<std::string> failure;  // set when an LP failed
};

/// minrel*(j): minimum of w_hat_j over the equivalent-hypothesis budget.
double min_relevance(const data::Dataset& data,
                     const ordreg::ModelSolution& baseline, int feature,
                     const RelevanceParams& params);

/// maxrel*(j): maximum of the sign-restricted pair of LPs. A single
/// infeasible side is skipped; both infeasible is an error.
double max_relevance(const data::Dataset& data,
                     const ordreg::ModelSolution& baseline, int feature,
                     const RelevanceParams& params);

/// Implicit-variant bounds; baseline must be Implicit.
std::pair<double, double> implicit_relevance_bounds(
    const data::Dataset& data, const ordreg::ModelSolution& baseline,
    int feature, const RelevanceParams& params);

struct ProfileResult {
    ordreg::ModelSolution baseline;
    std::vector<RelevanceInterval> intervals;
    bool any_failure = false;
};

/// Fits the baseline once, then solves 3 LPs per feature (1 minrel +
/// 2 maxrel) on a worker pool; per-feature failures are recorded, not
/// thrown. Results are placed by feature index, independent of schedule.
ProfileResult relevance_profile(const data::Dataset& data,
                                const RelevanceParams& params,
                                int parallelism = 1, bool normalize = false);

}  // namespace fri::relevance
