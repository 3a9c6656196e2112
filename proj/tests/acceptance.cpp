// Acceptance gate: one criterion per invocation (argv[1] = 1..12), one
// pass/fail line per criterion on stdout, exit 0 iff the criterion holds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fri/data.hpp"
#include "fri/datagen.hpp"
#include "fri/lp.hpp"
#include "fri/lupi.hpp"
#include "fri/ordreg.hpp"
#include "fri/relevance.hpp"
#include "fri/rng.hpp"
#include "fri/thresholding.hpp"

namespace {

using namespace fri;
namespace fs = std::filesystem;

constexpr int kWorkers = 2;

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0
                     : std::accumulate(v.begin(), v.end(), 0.0) /
                           static_cast<double>(v.size());
}

/// Full pipeline on a plain dataset: profile, permutation thresholds,
/// classification; returns selection scores against the ground truth.
data::SelectionScores run_selection(const data::Dataset& data,
                                    const data::GroundTruth& truth,
                                    ordreg::Variant variant, int n_perm,
                                    std::uint64_t seed, double p = 0.999,
                                    double C = 1.0) {
    relevance::RelevanceParams params;
    params.variant = variant;
    params.C = C;
    const auto prof = relevance::relevance_profile(data, params, kWorkers);
    if (prof.any_failure) throw std::runtime_error("LP failure in profile");
    const auto pops =
        thresholding::noise_populations(data, params, n_perm, seed, kWorkers);
    const auto pis = thresholding::prediction_intervals(pops, p);
    const auto cls = thresholding::classify(prof.intervals, pis);
    std::set<int> predicted;
    for (int j = 0; j < data.num_features(); ++j)
        if (cls.classes[j] != data::Relevance::Irrelevant) predicted.insert(j);
    return data::selection_scores(predicted, truth.regular);
}

struct LupiScores {
    data::SelectionScores regular;
    data::SelectionScores privileged;
};

LupiScores run_lupi_selection(const data::LupiDataset& data,
                              const data::GroundTruth& truth, double gamma,
                              int n_perm, std::uint64_t seed) {
    lupi::LupiRelevanceParams params;
    params.gamma = gamma;
    const auto prof = lupi::relevance_profile_lupi(data, params, kWorkers);
    if (prof.any_failure) throw std::runtime_error("LP failure in profile");
    const auto pops = thresholding::lupi_noise_populations(data, params,
                                                           n_perm, seed,
                                                           kWorkers);
    const auto reg_cls = thresholding::classify(
        prof.regular, thresholding::prediction_intervals(pops.regular, 0.999));
    const auto priv_cls = thresholding::classify(
        prof.privileged,
        thresholding::prediction_intervals(pops.privileged, 0.999));
    std::set<int> reg_pred, priv_pred;
    for (std::size_t j = 0; j < reg_cls.classes.size(); ++j)
        if (reg_cls.classes[j] != data::Relevance::Irrelevant)
            reg_pred.insert(static_cast<int>(j));
    for (std::size_t p = 0; p < priv_cls.classes.size(); ++p)
        if (priv_cls.classes[p] != data::Relevance::Irrelevant)
            priv_pred.insert(static_cast<int>(p));
    return {data::selection_scores(reg_pred, truth.regular),
            data::selection_scores(priv_pred, truth.privileged)};
}

// ------------------------------------------------------------ criterion 1

bool criterion_clean_recovery(std::string& detail) {
    const int n_perm = 12;
    bool ok = true;
    std::ostringstream msg;
    for (const auto variant :
         {ordreg::Variant::Explicit, ordreg::Variant::Implicit}) {
        for (const std::string name : {"set1", "set3", "set5"}) {
            std::vector<double> f1, prec, rec;
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                auto spec = datagen::preset(name);
                spec.seed = seed;
                const auto [data, truth] = datagen::generate(spec);
                const auto s =
                    run_selection(data, truth, variant, n_perm, seed);
                f1.push_back(s.f1);
                prec.push_back(s.precision);
                rec.push_back(s.recall);
            }
            const bool pass = mean(f1) >= 0.95 && mean(prec) >= 0.95 &&
                              mean(rec) >= 0.95;
            ok = ok && pass;
            msg << ' ' << name << '/' << ordreg::to_string(variant)
                << " F1=" << mean(f1) << " P=" << mean(prec)
                << " R=" << mean(rec);
        }
    }
    detail = msg.str();
    return ok;
}

// ------------------------------------------------------------ criterion 2

bool criterion_noisy_recovery(std::string& detail) {
    const int n_perm = 24;
    bool ok = true;
    std::ostringstream msg;
    for (const std::string name : {"set1", "set2", "set3", "set4", "set5"}) {
        std::vector<double> f1;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto spec = datagen::preset(name);
            spec.seed = seed;
            spec.noise_sigma = 0.5;
            const auto [data, truth] = datagen::generate(spec);
            // Noisy data needs a tuned slack penalty, as in the reference
            // procedure; C = 1 costs ~0.05 mean F1 on the redundant sets.
            const double C =
                ordreg::cross_validate(data, ordreg::Variant::Explicit,
                                       ordreg::default_c_grid(), 5,
                                       Rng::derive(seed, "cv"))
                    .best_C;
            f1.push_back(run_selection(data, truth,
                                       ordreg::Variant::Explicit, n_perm,
                                       seed, 0.999, C)
                             .f1);
        }
        ok = ok && mean(f1) >= 0.85;
        msg << ' ' << name << " F1=" << mean(f1);
    }
    detail = msg.str();
    return ok;
}

// ------------------------------------------------------------ criterion 3

bool criterion_lupi_recovery(std::string& detail) {
    const int n_perm = 10;
    const double gamma = 0.1;
    bool ok = true;
    std::ostringstream msg;
    for (const std::string name : {"lupi-set1", "lupi-set3", "lupi-set7"}) {
        std::vector<double> reg_f1, priv_f1;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto spec = datagen::preset(name);
            spec.seed = seed;
            const auto [data, truth] = datagen::generate_lupi(spec);
            const auto s =
                run_lupi_selection(data, truth, gamma, n_perm, seed);
            reg_f1.push_back(s.regular.f1);
            priv_f1.push_back(s.privileged.f1);
        }
        const bool pass =
            std::abs(mean(reg_f1) - 1.0) <= 0.05 && mean(priv_f1) >= 0.95;
        ok = ok && pass;
        msg << ' ' << name << " regF1=" << mean(reg_f1)
            << " privF1=" << mean(priv_f1);
    }
    if (!ok)
        msg << " | note: with privileged features x* and regular features "
               "x = x* + N(0,1), the per-sample slack is driven by noise "
               "that is independent of x*, so the linear slack-function "
               "model degenerates to w = 0 on the clean-privileged sets; "
               "no (C, gamma) setting avoids this";
    detail = msg.str();
    return ok;
}

// ------------------------------------------------------------ criterion 4

data::Dataset random_dataset(Rng& rng, int m, int n, int l) {
    Eigen::MatrixXd X(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) X(i, j) = rng.gaussian();
    Eigen::VectorXd w(n);
    for (int j = 0; j < n; ++j) w(j) = rng.uniform(-1.0, 1.0);
    std::vector<double> score(m);
    for (int i = 0; i < m; ++i)
        score[i] = X.row(i).dot(w) + 0.3 * rng.gaussian();
    data::Dataset d;
    d.X = data::standardize_matrix(X).first;
    d.y = data::equal_frequency_binning(score, l);
    d.l = l;
    return d;
}

bool criterion_two_bin_equivalence(std::string& detail) {
    Rng rng(404);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 8 + static_cast<int>(rng.below(20));
        const int n = 2 + static_cast<int>(rng.below(4));
        const auto d = random_dataset(rng, m, n, 2);
        const double mu_e = ordreg::fit_explicit(d, 1.0).mu_X;
        const double mu_i = ordreg::fit_implicit(d, 1.0).mu_X;
        worst = std::max(worst, std::abs(mu_e - mu_i));
    }
    detail = " max |mu_explicit - mu_implicit| = " + std::to_string(worst) +
             " over 100 two-bin datasets";
    return worst <= 1e-6;
}

// ------------------------------------------------------------ criterion 5

/// Exact minimum total slack over the threshold b for a fixed w on a
/// two-bin dataset (piecewise-linear in b; minimum at a kink).
double min_slack_over_b(const data::Dataset& d, const Eigen::VectorXd& w) {
    std::vector<double> kinks;
    for (int i = 0; i < d.num_samples(); ++i) {
        const double s = d.X.row(i).dot(w);
        kinks.push_back(d.y[i] == 1 ? s + 1.0 : s - 1.0);
    }
    double best = std::numeric_limits<double>::infinity();
    for (double b : kinks) {
        double slack = 0.0;
        for (int i = 0; i < d.num_samples(); ++i) {
            const double s = d.X.row(i).dot(w);
            slack += d.y[i] == 1 ? std::max(0.0, s - b + 1.0)
                                 : std::max(0.0, b + 1.0 - s);
        }
        best = std::min(best, slack);
    }
    return best;
}

bool criterion_grid_oracle(std::string& detail) {
    Rng rng(505);
    relevance::RelevanceParams params;  // Split mode, delta = 0.001, C = 1
    double worst = 0.0;
    int checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 4 + static_cast<int>(rng.below(3));
        const auto d = random_dataset(rng, m, 2, 2);
        const auto baseline = ordreg::fit_explicit(d, params.C);
        // Split budget: 1/2 * sum |w| <= (1+delta) * ||w~||_1, so the L1
        // norm itself may reach twice that.
        const double w_budget = 2.0 * (1.0 + params.delta) * baseline.w_l1;
        const double slack_budget = baseline.slack_sum + 1e-6;
        if (w_budget < 1e-6) continue;  // all-zero optimum, nothing to bound

        const double lim = w_budget + 0.02;
        const int half = 800;
        const double step = lim / half;
        Eigen::VectorXd w(2);
        double min0 = 1e30, max0 = 0.0, min1 = 1e30, max1 = 0.0;
        // Grid centered on the baseline weights so the (feasible) optimum
        // itself is a grid point even when the budget region is thin.
        for (int a = -half; a <= half; ++a) {
            w(0) = baseline.w(0) + a * step;
            for (int bidx = -half; bidx <= half; ++bidx) {
                w(1) = baseline.w(1) + bidx * step;
                if (std::abs(w(0)) + std::abs(w(1)) > w_budget) continue;
                if (min_slack_over_b(d, w) > slack_budget) continue;
                min0 = std::min(min0, std::abs(w(0)));
                max0 = std::max(max0, std::abs(w(0)));
                min1 = std::min(min1, std::abs(w(1)));
                max1 = std::max(max1, std::abs(w(1)));
            }
        }
        const double oracle[2][2] = {{min0, max0}, {min1, max1}};
        for (int j = 0; j < 2; ++j) {
            const double lo =
                relevance::min_relevance(d, baseline, j, params);
            const double hi =
                relevance::max_relevance(d, baseline, j, params);
            worst = std::max(worst, std::abs(lo - oracle[j][0]));
            worst = std::max(worst, std::abs(hi - oracle[j][1]));
        }
        ++checked;
    }
    detail = " max |LP - grid oracle| = " + std::to_string(worst) + " over " +
             std::to_string(checked) + " datasets";
    return checked >= 15 && worst <= 2e-2;
}

// ------------------------------------------------------------ criterion 6

bool criterion_duplicated_feature(std::string& detail) {
    int good = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto spec = datagen::preset("set3");
        spec.seed = seed;
        auto [d, truth] = datagen::generate(spec);
        int strong_col = -1;
        for (std::size_t j = 0; j < truth.regular.size(); ++j)
            if (truth.regular[j] == data::Relevance::Strong) {
                strong_col = static_cast<int>(j);
                break;
            }
        d.X.conservativeResize(Eigen::NoChange, d.X.cols() + 1);
        d.X.col(d.X.cols() - 1) = d.X.col(strong_col);
        d.feature_names.clear();

        relevance::RelevanceParams params;
        const auto prof = relevance::relevance_profile(d, params, kWorkers);
        const auto pops = thresholding::noise_populations(d, params, 12, seed,
                                                          kWorkers);
        const auto pis = thresholding::prediction_intervals(pops, 0.999);
        const auto cls = thresholding::classify(prof.intervals, pis);
        if (cls.classes[strong_col] == data::Relevance::Weak &&
            cls.classes[d.num_features() - 1] == data::Relevance::Weak)
            ++good;
    }
    detail = " both copies Weak in " + std::to_string(good) + "/10 trials";
    return good == 10;
}

// ------------------------------------------------------------ criterion 7

bool criterion_interval_sandwich(std::string& detail) {
    const std::vector<double> deltas = {0.0, 0.001, 0.01, 0.1};
    bool ok = true;
    std::ostringstream msg;
    for (const std::string name : {"set1", "set3", "set5"}) {
        auto spec = datagen::preset(name);
        spec.seed = 1;
        const auto [d, truth] = datagen::generate(spec);
        std::vector<relevance::ProfileResult> profiles;
        for (double delta : deltas) {
            relevance::RelevanceParams params;
            params.delta = delta;
            profiles.push_back(
                relevance::relevance_profile(d, params, kWorkers));
            if (profiles.back().any_failure) {
                msg << ' ' << name << ": LP failure at delta=" << delta;
                ok = false;
            }
        }
        for (int j = 0; j < d.num_features(); ++j) {
            const double wj = std::abs(profiles[0].baseline.w(j));
            for (std::size_t k = 0; k < deltas.size(); ++k) {
                const auto& iv = profiles[k].intervals[j];
                if (iv.lower > wj + 1e-6 || wj > iv.upper + 1e-6) {
                    msg << ' ' << name << " f" << j << " delta=" << deltas[k]
                        << " violates lower<=|w|<=upper";
                    ok = false;
                }
                if (k > 0) {
                    const auto& prev = profiles[k - 1].intervals[j];
                    if (iv.lower > prev.lower + 1e-6 ||
                        iv.upper + 1e-6 < prev.upper) {
                        msg << ' ' << name << " f" << j
                            << " not monotone at delta=" << deltas[k];
                        ok = false;
                    }
                }
            }
        }
        msg << ' ' << name << " checked";
    }
    detail = msg.str();
    return ok;
}

// ------------------------------------------------------------ criterion 8

bool criterion_false_positive_control(std::string& detail) {
    std::vector<double> fractions;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(Rng::derive(seed, "pure-noise"));
        const int m = 150, n = 20;
        Eigen::MatrixXd X(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) X(i, j) = rng.gaussian();
        std::vector<double> score(m);
        for (auto& s : score) s = rng.uniform();
        data::Dataset d;
        d.X = data::standardize_matrix(X).first;
        d.y = data::equal_frequency_binning(score, 3);
        d.l = 3;

        relevance::RelevanceParams params;
        const auto prof = relevance::relevance_profile(d, params, kWorkers);
        const auto pops = thresholding::noise_populations(d, params, 12, seed,
                                                          kWorkers);
        const auto pis = thresholding::prediction_intervals(pops, 0.999);
        const auto cls = thresholding::classify(prof.intervals, pis);
        int positives = 0;
        for (const auto c : cls.classes)
            if (c != data::Relevance::Irrelevant) ++positives;
        fractions.push_back(static_cast<double>(positives) / n);
    }
    detail = " mean non-Irrelevant fraction = " +
             std::to_string(mean(fractions)) + " over 100 pure-noise sets";
    return mean(fractions) <= 0.02;
}

// ------------------------------------------------------------ criterion 9

bool criterion_lp_accounting(std::string& detail) {
    std::ostringstream msg;
    bool ok = true;

    auto spec = datagen::preset("set3");
    spec.seed = 5;
    const auto [d, truth] = datagen::generate(spec);
    relevance::RelevanceParams params;
    const int n_perm = 7;

    std::uint64_t before = lp::solve_invocations();
    relevance::relevance_profile(d, params, kWorkers);
    const auto profile_lps =
        static_cast<std::int64_t>(lp::solve_invocations() - before);
    const std::int64_t profile_expected = 1 + 3 * d.num_features();
    ok = ok && profile_lps == profile_expected;
    msg << " profile " << profile_lps << "/" << profile_expected;

    before = lp::solve_invocations();
    thresholding::noise_populations(d, params, n_perm, 5, kWorkers);
    const auto perm_lps =
        static_cast<std::int64_t>(lp::solve_invocations() - before);
    const std::int64_t perm_expected = n_perm * (1 + 3);
    ok = ok && perm_lps == perm_expected;
    msg << " permutation " << perm_lps << "/" << perm_expected;

    // Seed chosen so the deterministic draw schedule needs no failure
    // redraws; redraws would add their documented per-attempt overhead.
    auto lspec = datagen::preset("lupi-set7");
    lspec.seed = 0;
    const auto [ld, ltruth] = datagen::generate_lupi(lspec);
    lupi::LupiRelevanceParams lparams;
    lparams.gamma = 0.1;

    before = lp::solve_invocations();
    lupi::relevance_profile_lupi(ld, lparams, kWorkers);
    const auto lupi_lps =
        static_cast<std::int64_t>(lp::solve_invocations() - before);
    const std::int64_t lupi_expected =
        1 + 3 * ld.regular.num_features() + 6 * ld.num_privileged();
    ok = ok && lupi_lps == lupi_expected;
    msg << " lupi-profile " << lupi_lps << "/" << lupi_expected;

    before = lp::solve_invocations();
    thresholding::lupi_noise_populations(ld, lparams, n_perm, 0, kWorkers);
    const auto lupi_perm =
        static_cast<std::int64_t>(lp::solve_invocations() - before);
    const std::int64_t lupi_perm_expected =
        n_perm * (1 + 3) + n_perm * (1 + 6);
    ok = ok && lupi_perm == lupi_perm_expected;
    msg << " lupi-permutation " << lupi_perm << "/" << lupi_perm_expected;

    detail = msg.str();
    return ok;
}

// ----------------------------------------------------------- criterion 10

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool criterion_parallel_determinism(std::string& detail) {
    const char* cli = std::getenv("FRI_CLI");
    if (!cli) {
        detail = " FRI_CLI not set";
        return false;
    }
    bool ok = true;
    std::ostringstream msg;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const fs::path base =
            fs::temp_directory_path() / ("fri_acc10_" + std::to_string(seed));
        for (int workers : {1, 8}) {
            const fs::path out = base / std::to_string(workers);
            fs::remove_all(out);
            const std::string cmd =
                std::string(cli) + " run --preset set3 --n-perm 6 --seed " +
                std::to_string(seed) + " --workers " +
                std::to_string(workers) + " --out " + out.string() +
                " > /dev/null 2>&1";
            if (std::system(cmd.c_str()) != 0) {
                msg << " seed " << seed << ": run failed";
                ok = false;
            }
        }
        for (const char* name : {"report.json", "profile.csv", "plot.svg"}) {
            if (slurp(base / "1" / name) != slurp(base / "8" / name)) {
                msg << " seed " << seed << ": " << name << " differs";
                ok = false;
            }
        }
    }
    msg << " 5 seeds, workers 1 vs 8, report.json/profile.csv/plot.svg"
        << " byte-compared";
    detail = msg.str();
    return ok;
}

// ----------------------------------------------------------- criterion 11

bool criterion_semantic_scenario(std::string& detail) {
    const int n_perm = 10;
    int rank_ok = 0;
    int classes_ok = 0;
    std::ostringstream msg;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto [d, truth] = datagen::generate_semantic_scenario(seed);
        lupi::LupiRelevanceParams params;
        params.gamma = 0.1;
        const auto prof = lupi::relevance_profile_lupi(d, params, kWorkers);
        // Privileged columns 0/1/2 carry sigma 0.1 / 0.5 / 2 noise.
        const double u01 = prof.privileged[0].upper;
        const double u05 = prof.privileged[1].upper;
        const double u2 = prof.privileged[2].upper;
        if (u2 >= u05 && u05 >= u01) ++rank_ok;

        const auto pops = thresholding::lupi_noise_populations(
            d, params, n_perm, seed, kWorkers);
        const auto cls = thresholding::classify(
            prof.regular,
            thresholding::prediction_intervals(pops.regular, 0.999));
        bool all_correct = true;
        for (int j = 0; j < 3; ++j)
            if (cls.classes[j] != data::Relevance::Strong) all_correct = false;
        for (int j = 3; j < 6; ++j)
            if (cls.classes[j] != data::Relevance::Irrelevant)
                all_correct = false;
        if (all_correct) ++classes_ok;
    }
    msg << " rank order held in " << rank_ok << "/10 seeds;"
        << " regular classes fully correct in " << classes_ok << "/10";
    detail = msg.str();
    return rank_ok >= 9 && classes_ok >= 9;
}

// ----------------------------------------------------------- criterion 12

bool criterion_mmae_reference(std::string& detail) {
    Rng rng(1212);
    for (int trial = 0; trial < 1000; ++trial) {
        const int l = 2 + static_cast<int>(rng.below(5));
        const int m = l + static_cast<int>(rng.below(40));
        std::vector<int> y_true(m), y_pred(m);
        for (int i = 0; i < m; ++i) {
            y_true[i] = i < l ? i + 1  // every bin occupied
                              : 1 + static_cast<int>(rng.below(l));
            y_pred[i] = 1 + static_cast<int>(rng.below(l));
        }
        double reference = 0.0;
        for (int j = 1; j <= l; ++j) {
            double err = 0.0;
            int count = 0;
            for (int i = 0; i < m; ++i)
                if (y_true[i] == j) {
                    err += std::abs(j - y_pred[i]);
                    ++count;
                }
            reference += err / count;
        }
        reference /= l;
        if (data::mmae(y_true, y_pred, l) != reference) {
            detail = " mismatch at trial " + std::to_string(trial);
            return false;
        }
    }
    detail = " exact match on 1000 random label pairs";
    return true;
}

struct Criterion {
    const char* title;
    bool (*run)(std::string&);
};

const Criterion kCriteria[12] = {
    {"clean recovery, sets 1/3/5, both variants", criterion_clean_recovery},
    {"noisy recovery (sigma 0.5), sets 1-5", criterion_noisy_recovery},
    {"privileged-information recovery", criterion_lupi_recovery},
    {"two-bin explicit/implicit equivalence", criterion_two_bin_equivalence},
    {"relevance bounds vs grid-search oracle", criterion_grid_oracle},
    {"duplicated strong feature becomes weak", criterion_duplicated_feature},
    {"interval sandwich and delta monotonicity",
     criterion_interval_sandwich},
    {"false-positive control on pure noise",
     criterion_false_positive_control},
    {"LP-count accounting", criterion_lp_accounting},
    {"parallel determinism of run artifacts",
     criterion_parallel_determinism},
    {"semantic noise scenario", criterion_semantic_scenario},
    {"MMAE against double-loop reference", criterion_mmae_reference},
};

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: acceptance <criterion 1..12>\n";
        return 2;
    }
    const int idx = std::atoi(argv[1]);
    if (idx < 1 || idx > 12) {
        std::cerr << "criterion out of range\n";
        return 2;
    }
    const auto& crit = kCriteria[idx - 1];
    std::string detail;
    bool pass = false;
    try {
        pass = crit.run(detail);
    } catch (const std::exception& e) {
        detail = std::string(" exception: ") + e.what();
    }
    std::cout << "criterion " << idx << " (" << crit.title << "): "
              << (pass ? "PASS" : "FAIL") << " —" << detail << '\n';
    return pass ? 0 : 1;
}
