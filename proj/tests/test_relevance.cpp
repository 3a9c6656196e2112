#include "doctest.h"

#include <cmath>

#include "fri/relevance.hpp"
#include "fri/rng.hpp"
#include "grid_oracle.hpp"

using namespace fri;
using namespace fri::data;
using namespace fri::ordreg;
using namespace fri::relevance;

namespace {

Dataset one_dim_set() {
    Eigen::MatrixXd X(4, 1);
    X << -2.0, -1.0, 1.0, 2.0;
    return Dataset(X, {1, 1, 2, 2}, 2);
}

Dataset random_set(std::uint64_t seed, int m, int n, int l,
                   double noise = 0.3) {
    Rng rng(seed);
    Eigen::MatrixXd X(m, n);
    Eigen::VectorXd w(n);
    for (int j = 0; j < n; ++j) {
        do w[j] = rng.uniform(-1.0, 1.0);
        while (std::abs(w[j]) < 0.3);  // keep every true weight informative
    }
    std::vector<double> score(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) X(i, j) = rng.gaussian();
        score[i] = w.dot(X.row(i)) + noise * rng.gaussian();
    }
    return Dataset(X, equal_frequency_binning(score, l), l);
}

RelevanceParams combined(double delta) {
    RelevanceParams p;
    p.delta = delta;
    p.constraint_mode = ConstraintMode::Combined;
    return p;
}

}  // namespace

TEST_CASE("one-dimensional interval matches the closed form") {
    // Baseline: w=1, b=0, mu=0.5, no slack. Under the combined budget
    // 0.5*w + max(0, 2(1-w)) <= (1+delta)/2 the smallest feasible w is
    // 1 - delta/3 and the largest is 1 + delta.
    auto d = one_dim_set();
    auto base = fit_explicit(d, 1.0);
    REQUIRE(base.mu_X == doctest::Approx(0.5));
    auto p = combined(0.03);
    CHECK(min_relevance(d, base, 0, p) == doctest::Approx(0.99).epsilon(1e-6));
    CHECK(max_relevance(d, base, 0, p) == doctest::Approx(1.03).epsilon(1e-6));
}

TEST_CASE("intervals sandwich the baseline weight") {
    auto d = random_set(3, 30, 4, 3);
    auto base = fit_explicit(d, 1.0);
    auto p = combined(0.01);
    for (int f = 0; f < 4; ++f) {
        const double lo = min_relevance(d, base, f, p);
        const double hi = max_relevance(d, base, f, p);
        CHECK(lo <= std::abs(base.w[f]) + 1e-7);
        CHECK(hi >= std::abs(base.w[f]) - 1e-7);
        CHECK(lo >= -1e-12);
    }
}

TEST_CASE("split budget also sandwiches the baseline") {
    auto d = random_set(4, 30, 4, 3);
    auto base = fit_explicit(d, 1.0);
    RelevanceParams p;  // defaults: split mode
    REQUIRE(p.constraint_mode == ConstraintMode::Split);
    for (int f = 0; f < 4; ++f) {
        CHECK(min_relevance(d, base, f, p) <= std::abs(base.w[f]) + 1e-7);
        CHECK(max_relevance(d, base, f, p) >= std::abs(base.w[f]) - 1e-7);
    }
}

TEST_CASE("grid oracle agrees with the LP bounds") {
    // Tiny problems where a dense (w, b) grid is exhaustive enough to act
    // as an independent reference for the combined-budget intervals.
    SUBCASE("one feature") {
        auto d = one_dim_set();
        auto base = fit_explicit(d, 1.0);
        auto p = combined(0.05);
        auto g = testing::grid_relevance_2bin(d, 1.0, 0.05, base.mu_X, 0.002);
        REQUIRE(g.found_feasible);
        CHECK(g.best_objective == doctest::Approx(base.mu_X).epsilon(1e-2));
        CHECK(std::abs(min_relevance(d, base, 0, p) - g.minrel[0]) < 2e-2);
        CHECK(std::abs(max_relevance(d, base, 0, p) - g.maxrel[0]) < 2e-2);
    }
    SUBCASE("two features, random data") {
        for (std::uint64_t seed : {50u, 51u, 52u}) {
            auto d = random_set(seed, 6, 2, 2, 0.5);
            auto base = fit_explicit(d, 1.0);
            auto p = combined(0.05);
            auto g = testing::grid_relevance_2bin(d, 1.0, 0.05, base.mu_X, 0.005);
            CAPTURE(seed);
            REQUIRE(g.found_feasible);
            for (int f = 0; f < 2; ++f) {
                const double lo = min_relevance(d, base, f, p);
                const double hi = max_relevance(d, base, f, p);
                // The grid explores a subset of the feasible region, so its
                // extremes cannot beat the exact LP ones...
                CHECK(g.minrel[f] >= lo - 1e-6);
                CHECK(g.maxrel[f] <= hi + 1e-6);
                // ...but with fine spacing they must come close.
                CHECK(std::abs(lo - g.minrel[f]) < 2e-2);
                CHECK(std::abs(hi - g.maxrel[f]) < 2e-2);
            }
        }
    }
}

TEST_CASE("duplicated feature is substitutable") {
    // Copy a relevant column: either copy can take over, so the minimum
    // relevance of both drops to zero while the maximum stays positive.
    auto d0 = random_set(8, 30, 2, 2, 0.2);
    Eigen::MatrixXd X(30, 3);
    X << d0.X, d0.X.col(0);
    Dataset d(X, d0.y, 2);
    auto base = fit_explicit(d, 1.0);
    auto p = combined(0.001);
    for (int f : {0, 2}) {
        CHECK(min_relevance(d, base, f, p) == doctest::Approx(0.0).epsilon(1e-6));
        CHECK(max_relevance(d, base, f, p) > 0.01);
    }
}

TEST_CASE("pure noise feature has a near-zero lower bound") {
    // Labels follow a clean margin in the first two features, so the model
    // has no use for the third column and its minimum relevance collapses.
    Rng rng(77);
    const int m = 200;
    Eigen::MatrixXd X(m, 3);
    std::vector<int> y(m);
    for (int i = 0; i < m; ++i) {
        X(i, 0) = rng.gaussian();
        X(i, 1) = rng.gaussian();
        X(i, 2) = rng.gaussian();
        const double s = X(i, 0) + 0.7 * X(i, 1);
        y[i] = s < 0 ? 1 : 2;
        if (std::abs(s) < 0.3) X(i, 0) += s < 0 ? -0.5 : 0.5;
    }
    Dataset d(X, y, 2);
    auto base = fit_explicit(d, 1.0);
    CHECK(std::abs(base.w[2]) < 0.1);
    CHECK(min_relevance(d, base, 2, combined(0.001)) < 0.01);
}

TEST_CASE("bounds widen monotonically with delta") {
    auto d = random_set(13, 25, 3, 3);
    auto base = fit_explicit(d, 1.0);
    for (int f = 0; f < 3; ++f) {
        double prev_lo = 1e18, prev_hi = -1e18;
        for (double delta : {0.0, 0.001, 0.01, 0.1}) {
            auto p = combined(delta);
            const double lo = min_relevance(d, base, f, p);
            const double hi = max_relevance(d, base, f, p);
            CHECK(lo <= prev_lo + 1e-7);
            CHECK(hi >= prev_hi - 1e-7);
            prev_lo = lo;
            prev_hi = hi;
        }
    }
}

TEST_CASE("sum of lower bounds respects the weight budget") {
    // Every feasible point has 0.5*||w||_1 <= (1+delta)*mu, so the summed
    // minima cannot exceed 2(1+delta)*mu.
    auto d = random_set(21, 30, 5, 3);
    auto base = fit_explicit(d, 1.0);
    auto p = combined(0.01);
    double total = 0.0;
    for (int f = 0; f < 5; ++f) total += min_relevance(d, base, f, p);
    CHECK(total <= 2.0 * 1.01 * base.mu_X + 1e-6);
}

TEST_CASE("profile solves exactly 3 LPs per feature plus the baseline") {
    auto d = random_set(33, 20, 4, 2);
    const auto before = lp::solve_invocations();
    auto prof = relevance_profile(d, RelevanceParams{}, 1, false);
    CHECK(lp::solve_invocations() - before == 1 + 3 * 4);
    CHECK(!prof.any_failure);
    REQUIRE(prof.intervals.size() == 4);
    for (int f = 0; f < 4; ++f) CHECK(prof.intervals[f].feature == f);
}

TEST_CASE("profile results do not depend on worker count") {
    auto d = random_set(41, 25, 5, 3);
    auto a = relevance_profile(d, RelevanceParams{}, 1, true);
    auto b = relevance_profile(d, RelevanceParams{}, 4, true);
    REQUIRE(a.intervals.size() == b.intervals.size());
    for (std::size_t f = 0; f < a.intervals.size(); ++f) {
        CHECK(a.intervals[f].lower == b.intervals[f].lower);  // bitwise
        CHECK(a.intervals[f].upper == b.intervals[f].upper);
    }
}

TEST_CASE("normalized profile divides by the baseline weight norm") {
    auto d = random_set(45, 25, 3, 2);
    auto raw = relevance_profile(d, RelevanceParams{}, 1, false);
    auto norm = relevance_profile(d, RelevanceParams{}, 1, true);
    const double w1 = raw.baseline.w_l1;
    REQUIRE(w1 > 0.0);
    for (std::size_t f = 0; f < raw.intervals.size(); ++f) {
        CHECK(norm.intervals[f].lower ==
              doctest::Approx(raw.intervals[f].lower / w1));
        CHECK(norm.intervals[f].upper ==
              doctest::Approx(raw.intervals[f].upper / w1));
        CHECK(norm.intervals[f].normalized);
    }
}

TEST_CASE("implicit-variant bounds sandwich the implicit baseline") {
    auto d = random_set(55, 24, 3, 3);
    auto base = fit_implicit(d, 1.0);
    RelevanceParams p;
    p.variant = Variant::Implicit;
    p.constraint_mode = ConstraintMode::Combined;
    p.delta = 0.01;
    for (int f = 0; f < 3; ++f) {
        auto [lo, hi] = implicit_relevance_bounds(d, base, f, p);
        CHECK(lo <= std::abs(base.w[f]) + 1e-7);
        CHECK(hi >= std::abs(base.w[f]) - 1e-7);
    }
}

TEST_CASE("two-bin implicit and explicit intervals coincide") {
    auto d = random_set(61, 20, 3, 2);
    auto be = fit_explicit(d, 1.0);
    auto bi = fit_implicit(d, 1.0);
    auto pe = combined(0.01);
    auto pi = pe;
    pi.variant = Variant::Implicit;
    for (int f = 0; f < 3; ++f) {
        auto [lo, hi] = implicit_relevance_bounds(d, bi, f, pi);
        CHECK(lo == doctest::Approx(min_relevance(d, be, f, pe)).epsilon(1e-5));
        CHECK(hi == doctest::Approx(max_relevance(d, be, f, pe)).epsilon(1e-5));
    }
}
