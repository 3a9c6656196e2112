#include "fri/thresholding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "fri/parallel.hpp"
#include "fri/rng.hpp"
#include "fri/student_t.hpp"

namespace fri::thresholding {

using data::Dataset;
using relevance::RelevanceParams;

namespace {

std::vector<int> permutation_order(int m, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    for (int i = m - 1; i > 0; --i)
        std::swap(order[i], order[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    return order;
}

}  // namespace

Dataset permute_feature(const Dataset& d, int j, std::uint64_t seed) {
    if (j < 0 || j >= d.num_features())
        throw std::invalid_argument("permute_feature: bad feature index");
    const int m = d.num_samples();
    const std::vector<int> order = permutation_order(m, seed);
    Eigen::MatrixXd X = d.X;
    for (int i = 0; i < m; ++i) X(i, j) = d.X(order[i], j);
    return Dataset(std::move(X), d.y, d.l, d.feature_names);
}

data::LupiDataset permute_regular_feature(const data::LupiDataset& d, int j,
                                          std::uint64_t seed) {
    return data::LupiDataset(permute_feature(d.regular, j, seed), d.X_star,
                             d.privileged_names);
}

data::LupiDataset permute_privileged_feature(const data::LupiDataset& d,
                                             int p, std::uint64_t seed) {
    if (p < 0 || p >= d.num_privileged())
        throw std::invalid_argument(
            "permute_privileged_feature: bad feature index");
    const int m = d.regular.num_samples();
    const std::vector<int> order = permutation_order(m, seed);
    Eigen::MatrixXd Xs = d.X_star;
    for (int i = 0; i < m; ++i) Xs(i, p) = d.X_star(order[i], p);
    return data::LupiDataset(d.regular, std::move(Xs), d.privileged_names);
}

namespace {

// [minrel, maxrel] of one feature against a freshly fitted baseline.
std::pair<double, double> refit_bounds(const Dataset& d, int j,
                                       const RelevanceParams& params) {
    if (params.variant == ordreg::Variant::Implicit) {
        auto base = ordreg::fit_implicit(d, params.C);
        return relevance::implicit_relevance_bounds(d, base, j, params);
    }
    auto base = ordreg::fit_explicit(d, params.C);
    return {relevance::min_relevance(d, base, j, params),
            relevance::max_relevance(d, base, j, params)};
}

using Attempt =
    std::function<std::optional<std::pair<double, double>>(int index)>;

// Runs the first n_perm attempts in parallel, then deterministically
// replaces failed draws with further attempt indices; an attempt is a pure
// function of its index so the result is schedule-independent.
NoisePopulations fill_population(int n_perm, std::uint64_t seed,
                                 int parallelism, const Attempt& attempt) {
    if (n_perm < 2)
        throw std::invalid_argument("noise_populations: need n_perm >= 2");
    NoisePopulations out;
    out.n_perm = n_perm;
    out.seed = seed;
    out.minrel_samples.assign(n_perm, 0.0);
    out.maxrel_samples.assign(n_perm, 0.0);

    const int max_attempts = 3 * n_perm;
    std::vector<std::optional<std::pair<double, double>>> results(n_perm);
    parallel_for(n_perm, parallelism, [&](int i) { results[i] = attempt(i); });
    int filled = 0;
    int next_attempt = n_perm;
    for (int i = 0; i < n_perm; ++i) {
        auto r = results[i];
        while (!r) {
            if (next_attempt >= max_attempts)
                throw std::runtime_error(
                    "noise_populations: too many failed permutation draws");
            r = attempt(next_attempt++);
        }
        out.minrel_samples[filled] = r->first;
        out.maxrel_samples[filled] = r->second;
        ++filled;
    }
    return out;
}

}  // namespace

NoisePopulations noise_populations(const Dataset& d,
                                   const RelevanceParams& params, int n_perm,
                                   std::uint64_t seed, int parallelism) {
    auto attempt = [&](int index) -> std::optional<std::pair<double, double>> {
        Rng pick(Rng::derive(seed, "perm-pick", index));
        const int j = static_cast<int>(pick.below(d.num_features()));
        Dataset perm = permute_feature(d, j, Rng::derive(seed, "perm", index));
        try {
            return refit_bounds(perm, j, params);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };
    return fill_population(n_perm, seed, parallelism, attempt);
}

LupiNoisePopulations lupi_noise_populations(
    const data::LupiDataset& d, const lupi::LupiRelevanceParams& params,
    int n_perm, std::uint64_t seed, int parallelism) {
    auto regular_attempt =
        [&](int index) -> std::optional<std::pair<double, double>> {
        Rng pick(Rng::derive(seed, "perm-pick", index));
        const int j = static_cast<int>(pick.below(d.regular.num_features()));
        auto perm =
            permute_regular_feature(d, j, Rng::derive(seed, "perm", index));
        try {
            auto base = lupi::fit_lupi(perm, {params.C, params.gamma});
            return std::pair{lupi::minrel_regular(perm, base, j, params),
                             lupi::maxrel_regular(perm, base, j, params)};
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };
    auto privileged_attempt =
        [&](int index) -> std::optional<std::pair<double, double>> {
        Rng pick(Rng::derive(seed, "perm-pick-priv", index));
        const int p = static_cast<int>(pick.below(d.num_privileged()));
        auto perm = permute_privileged_feature(
            d, p, Rng::derive(seed, "perm-priv", index));
        try {
            auto base = lupi::fit_lupi(perm, {params.C, params.gamma});
            return std::pair{lupi::minrel_privileged(perm, base, p, params),
                             lupi::maxrel_privileged(perm, base, p, params)};
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };
    LupiNoisePopulations out;
    out.regular = fill_population(n_perm, seed, parallelism, regular_attempt);
    out.privileged =
        fill_population(n_perm, seed, parallelism, privileged_attempt);
    return out;
}

double prediction_interval(const std::vector<double>& population, double p) {
    const int n = static_cast<int>(population.size());
    if (n < 2)
        throw std::invalid_argument("prediction_interval: need >= 2 samples");
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("prediction_interval: p in (0, 1)");
    const double mean =
        std::accumulate(population.begin(), population.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : population) ss += (v - mean) * (v - mean);
    const double stdev = std::sqrt(ss / (n - 1));
    if (stdev == 0.0) return std::max(0.0, mean);
    const double t = stats::student_t_quantile(0.5 * (1.0 + p), n - 1);
    return std::max(0.0, mean + t * stdev * std::sqrt(1.0 + 1.0 / n));
}

PredictionIntervals prediction_intervals(const NoisePopulations& pops,
                                         double p) {
    PredictionIntervals pis;
    pis.p = p;
    pis.upper_minrel = prediction_interval(pops.minrel_samples, p);
    pis.upper_maxrel = prediction_interval(pops.maxrel_samples, p);
    return pis;
}

data::Relevance classify_one(double lower, double upper,
                             const PredictionIntervals& pis, bool* warning) {
    const bool upper_out = upper > pis.upper_maxrel;
    const bool lower_out = lower > pis.upper_minrel;
    if (upper_out && lower_out) return data::Relevance::Strong;
    if (upper_out) return data::Relevance::Weak;
    if (!lower_out) return data::Relevance::Irrelevant;
    // lower above its threshold but upper below: inconsistent thresholds.
    if (warning) *warning = true;
    return data::Relevance::Weak;
}

ClassificationResult classify(
    const std::vector<relevance::RelevanceInterval>& intervals,
    const PredictionIntervals& pis) {
    ClassificationResult out;
    out.classes.reserve(intervals.size());
    for (const auto& iv : intervals)
        out.classes.push_back(
            classify_one(iv.lower, iv.upper, pis, &out.warning));
    return out;
}

}  // namespace fri::thresholding
