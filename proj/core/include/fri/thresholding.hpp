#pragma once

#include <cstdint>
#include <vector>

#include "fri/data.hpp"
#include "fri/lupi.hpp"
#include "fri/relevance.hpp"

namespace fri::thresholding {

/// Relevance bounds observed on randomly permuted (hence irrelevant)
/// columns; the empirical null for the classification step.
struct NoisePopulations {
    std::vector<double> minrel_samples;
    std::vector<double> maxrel_samples;
    int n_perm = 0;
    std::uint64_t seed = 0;
};

struct PredictionIntervals {
    double upper_minrel = 0.0;
    double upper_maxrel = 0.0;
    double p = 0.999;
};

/// Returns a copy of the dataset with column j replaced by a seeded
/// uniform permutation of its own values.
data::Dataset permute_feature(const data::Dataset& data, int j,
                              std::uint64_t seed);

/// For each draw: pick a feature uniformly, permute it, refit the
/// baseline, and record the permuted column's [minrel, maxrel]. Draws
/// whose LPs fail are re-sampled; more than 3*n_perm total attempts is an
/// error. Per-draw seeds derive from (seed, draw index), so results do not
/// depend on evaluation order.
NoisePopulations noise_populations(const data::Dataset& data,
                                   const relevance::RelevanceParams& params,
                                   int n_perm, std::uint64_t seed,
                                   int parallelism = 1);

/// Separate nulls for the two LUPI blocks: each regular draw permutes a
/// regular column and records its regular-side bounds; each privileged
/// draw permutes a privileged column and records its privileged-side
/// bounds. Both refit the LUPI baseline per draw.
struct LupiNoisePopulations {
    NoisePopulations regular;
    NoisePopulations privileged;
};

data::LupiDataset permute_regular_feature(const data::LupiDataset& data,
                                          int j, std::uint64_t seed);
data::LupiDataset permute_privileged_feature(const data::LupiDataset& data,
                                             int p, std::uint64_t seed);

LupiNoisePopulations lupi_noise_populations(
    const data::LupiDataset& data, const lupi::LupiRelevanceParams& params,
    int n_perm, std::uint64_t seed, int parallelism = 1);

/// One-sided normal-theory prediction interval upper bound:
/// mean + t_{(1+p)/2, n-1} * stdev * sqrt(1 + 1/n), clamped below at 0.
/// A degenerate population (stdev 0) yields its mean.
double prediction_interval(const std::vector<double>& population, double p);

PredictionIntervals prediction_intervals(const NoisePopulations& pops,
                                         double p);

/// Decision rule per feature interval [lower, upper]:
///   Strong     iff upper > upper_maxrel and lower > upper_minrel
///   Weak       iff upper > upper_maxrel and lower <= upper_minrel
///   Irrelevant iff upper <= upper_maxrel and lower <= upper_minrel
/// The leftover combination cannot occur with ordered thresholds; it maps
/// to Weak and sets the warning flag.
struct ClassificationResult {
    std::vector<data::Relevance> classes;
    bool warning = false;
};

data::Relevance classify_one(double lower, double upper,
                             const PredictionIntervals& pis, bool* warning);

ClassificationResult classify(
    const std::vector<relevance::RelevanceInterval>& intervals,
    const PredictionIntervals& pis);

}  // namespace fri::thresholding
