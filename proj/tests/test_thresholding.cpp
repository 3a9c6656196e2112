#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "fri/rng.hpp"
#include "fri/student_t.hpp"
#include "fri/thresholding.hpp"

using namespace fri;
using namespace fri::data;
using namespace fri::thresholding;

namespace {

Dataset margin_set(std::uint64_t seed, int m, int n) {
    // Labels follow a clean margin in feature 0; remaining columns noise.
    Rng rng(seed);
    Eigen::MatrixXd X(m, n);
    std::vector<int> y(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) X(i, j) = rng.gaussian();
        y[i] = X(i, 0) < 0 ? 1 : 2;
        if (std::abs(X(i, 0)) < 0.3) X(i, 0) += X(i, 0) < 0 ? -0.5 : 0.5;
    }
    return Dataset(X, y, 2);
}

}  // namespace

TEST_CASE("student t quantiles match published tables") {
    // Frozen values from standard t tables (4-5 significant digits).
    CHECK(stats::student_t_quantile(0.975, 10) == doctest::Approx(2.2281).epsilon(1e-4));
    CHECK(stats::student_t_quantile(0.95, 5) == doctest::Approx(2.0150).epsilon(1e-4));
    CHECK(stats::student_t_quantile(0.9995, 49) == doctest::Approx(3.5004).epsilon(1e-4));
    CHECK(stats::student_t_quantile(0.999, 30) == doctest::Approx(3.3852).epsilon(1e-4));
    CHECK(stats::student_t_quantile(0.5, 7) == doctest::Approx(0.0));
    // Symmetry and inversion round-trip.
    CHECK(stats::student_t_quantile(0.025, 10) ==
          doctest::Approx(-2.2281).epsilon(1e-4));
    for (double p : {0.6, 0.9, 0.99, 0.9999}) {
        const double t = stats::student_t_quantile(p, 12);
        CHECK(stats::student_t_cdf(t, 12) == doctest::Approx(p).epsilon(1e-9));
    }
    // Large nu approaches the normal quantile.
    CHECK(stats::student_t_quantile(0.975, 1e6) ==
          doctest::Approx(1.95996).epsilon(1e-4));
}

TEST_CASE("incomplete beta sanity") {
    CHECK(stats::incomplete_beta(2.0, 3.0, 0.0) == doctest::Approx(0.0));
    CHECK(stats::incomplete_beta(2.0, 3.0, 1.0) == doctest::Approx(1.0));
    // I_x(1, 1) = x.
    CHECK(stats::incomplete_beta(1.0, 1.0, 0.37) == doctest::Approx(0.37));
    // Symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
    CHECK(stats::incomplete_beta(2.5, 4.0, 0.3) ==
          doctest::Approx(1.0 - stats::incomplete_beta(4.0, 2.5, 0.7)).epsilon(1e-12));
}

TEST_CASE("permute feature keeps the multiset and other columns") {
    auto d = margin_set(3, 20, 3);
    auto pd = permute_feature(d, 1, 99);
    CHECK(pd.X.col(0) == d.X.col(0));
    CHECK(pd.X.col(2) == d.X.col(2));
    CHECK(pd.y == d.y);
    std::vector<double> a(d.X.col(1).data(), d.X.col(1).data() + 20);
    std::vector<double> b(pd.X.col(1).data(), pd.X.col(1).data() + 20);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    // Determinism and seed sensitivity.
    CHECK(permute_feature(d, 1, 99).X == pd.X);
    CHECK(permute_feature(d, 1, 100).X != pd.X);
    // A constant column permutes to itself.
    Eigen::MatrixXd Xc = d.X;
    Xc.col(2).setConstant(4.0);
    Dataset dc(Xc, d.y, 2);
    CHECK(permute_feature(dc, 2, 5).X == dc.X);
}

TEST_CASE("prediction interval formula") {
    SUBCASE("all zeros collapse to zero") {
        CHECK(prediction_interval(std::vector<double>(50, 0.0), 0.999) ==
              doctest::Approx(0.0));
    }
    SUBCASE("49 zeros and a one at p=0.999") {
        std::vector<double> pop(50, 0.0);
        pop.back() = 1.0;
        const double mean = 0.02;
        const double stdev = std::sqrt((49 * 0.0004 + 0.9604) / 49.0);
        const double expect = mean + 3.5004 * stdev * std::sqrt(1.02);
        CHECK(prediction_interval(pop, 0.999) ==
              doctest::Approx(expect).epsilon(1e-4));
    }
    SUBCASE("degenerate nonzero population returns its mean") {
        CHECK(prediction_interval(std::vector<double>(10, 0.7), 0.999) ==
              doctest::Approx(0.7));
    }
    SUBCASE("clamped at zero") {
        // Strongly negative mean with tiny spread: bound would be negative.
        std::vector<double> pop(20, -5.0);
        pop.back() = -5.001;
        CHECK(prediction_interval(pop, 0.9) == doctest::Approx(0.0));
    }
}

TEST_CASE("classification decision rules") {
    PredictionIntervals pis;
    pis.upper_minrel = 0.01;
    pis.upper_maxrel = 0.02;
    bool warn = false;
    CHECK(classify_one(0.3, 0.5, pis, &warn) == Relevance::Strong);
    CHECK(classify_one(0.0, 0.5, pis, &warn) == Relevance::Weak);
    CHECK(classify_one(0.0, 0.015, pis, &warn) == Relevance::Irrelevant);
    CHECK(!warn);
    // Impossible combination maps to Weak with a warning.
    CHECK(classify_one(0.5, 0.015, pis, &warn) == Relevance::Weak);
    CHECK(warn);
}

TEST_CASE("classification is monotone in the interval") {
    PredictionIntervals pis;
    pis.upper_minrel = 0.1;
    pis.upper_maxrel = 0.2;
    auto rank = [&](double lo, double hi) {
        switch (classify_one(lo, hi, pis, nullptr)) {
            case Relevance::Irrelevant: return 0;
            case Relevance::Weak: return 1;
            case Relevance::Strong: return 2;
        }
        return -1;
    };
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        double lo = rng.uniform(0.0, 0.3);
        double hi = lo + rng.uniform(0.0, 0.3);
        double lo2 = lo + rng.uniform(0.0, 0.2);
        double hi2 = std::max(lo2, hi) + rng.uniform(0.0, 0.2);
        CHECK(rank(lo2, hi2) >= rank(lo, hi));
    }
}

TEST_CASE("noise populations on a clean-margin dataset") {
    auto d = margin_set(11, 60, 4);
    relevance::RelevanceParams params;
    auto pops = noise_populations(d, params, 8, 2024);
    REQUIRE(pops.minrel_samples.size() == 8);
    REQUIRE(pops.maxrel_samples.size() == 8);
    for (int i = 0; i < 8; ++i) {
        CHECK(pops.minrel_samples[i] >= -1e-12);
        CHECK(pops.maxrel_samples[i] >= pops.minrel_samples[i] - 1e-9);
    }
    // Draws that permute one of the pure-noise columns keep a separable
    // problem, where the permuted column's minimum relevance is ~0.
    CHECK(*std::min_element(pops.minrel_samples.begin(),
                            pops.minrel_samples.end()) < 0.01);
    // Reproducibility, byte for byte.
    auto again = noise_populations(d, params, 8, 2024);
    CHECK(again.minrel_samples == pops.minrel_samples);
    CHECK(again.maxrel_samples == pops.maxrel_samples);
    // Schedule independence.
    auto par = noise_populations(d, params, 8, 2024, 4);
    CHECK(par.minrel_samples == pops.minrel_samples);
    CHECK(par.maxrel_samples == pops.maxrel_samples);
}

TEST_CASE("end-to-end classification separates signal from noise") {
    auto d = margin_set(21, 80, 4);
    relevance::RelevanceParams params;
    auto prof = relevance::relevance_profile(d, params, 1, false);
    auto pops = noise_populations(d, params, 12, 7);
    auto pis = prediction_intervals(pops, 0.999);
    auto cls = classify(prof.intervals, pis);
    REQUIRE(cls.classes.size() == 4);
    CHECK(cls.classes[0] == Relevance::Strong);
    CHECK(cls.classes[1] == Relevance::Irrelevant);
    CHECK(cls.classes[2] == Relevance::Irrelevant);
    CHECK(cls.classes[3] == Relevance::Irrelevant);
}

TEST_CASE("lupi noise populations: block permutation, determinism") {
    // Small LUPI set: one informative regular column, one privileged
    // column recording realized noise on half the rows.
    Rng rng(5);
    const int m = 24;
    Eigen::MatrixXd X(m, 2);
    Eigen::MatrixXd Xs(m, 1);
    std::vector<double> score(m);
    for (int i = 0; i < m; ++i) {
        const double s = rng.gaussian();
        const double noise = i % 2 == 0 ? 1.5 * rng.gaussian() : 0.0;
        X(i, 0) = s + noise;
        X(i, 1) = rng.gaussian();
        Xs(i, 0) = noise;
        score[i] = s;
    }
    data::LupiDataset d(data::Dataset(X, data::equal_frequency_binning(score, 2), 2), Xs);

    SUBCASE("permute helpers touch only the chosen block") {
        auto pr = permute_regular_feature(d, 1, 99);
        CHECK(pr.X_star == d.X_star);
        CHECK(pr.regular.X.col(0) == d.regular.X.col(0));
        CHECK(pr.regular.X.col(1) != d.regular.X.col(1));
        auto pp = permute_privileged_feature(d, 0, 99);
        CHECK(pp.regular.X == d.regular.X);
        CHECK(pp.X_star != d.X_star);
        CHECK_THROWS_AS(permute_privileged_feature(d, 3, 1),
                        std::invalid_argument);
    }

    SUBCASE("populations are sized, nonnegative, and schedule-independent") {
        lupi::LupiRelevanceParams params;
        auto pops = lupi_noise_populations(d, params, 4, 11);
        REQUIRE(pops.regular.minrel_samples.size() == 4);
        REQUIRE(pops.privileged.minrel_samples.size() == 4);
        for (int i = 0; i < 4; ++i) {
            CHECK(pops.regular.minrel_samples[i] >= -1e-12);
            CHECK(pops.regular.maxrel_samples[i] >=
                  pops.regular.minrel_samples[i] - 1e-9);
            CHECK(pops.privileged.minrel_samples[i] >= -1e-12);
            CHECK(pops.privileged.maxrel_samples[i] >=
                  pops.privileged.minrel_samples[i] - 1e-9);
        }
        auto par = lupi_noise_populations(d, params, 4, 11, 4);
        CHECK(par.regular.minrel_samples == pops.regular.minrel_samples);
        CHECK(par.regular.maxrel_samples == pops.regular.maxrel_samples);
        CHECK(par.privileged.minrel_samples == pops.privileged.minrel_samples);
        CHECK(par.privileged.maxrel_samples == pops.privileged.maxrel_samples);
    }
}
