#include "fri/datagen.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fri/rng.hpp"

namespace fri::datagen {

namespace {

using data::Dataset;
using data::GroundTruth;
using data::LupiDataset;
using data::Relevance;

double informative_weight(Rng& rng) {
    double w = rng.uniform(-1.0, 1.0);
    while (std::abs(w) < 0.1) w = rng.uniform(-1.0, 1.0);
    return w;
}

Eigen::VectorXd gaussian_column(Rng& rng, int m) {
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v(i) = rng.gaussian();
    return v;
}

std::vector<std::string> default_names(const std::string& stem, int n) {
    std::vector<std::string> names;
    names.reserve(n);
    for (int i = 0; i < n; ++i) names.push_back(stem + std::to_string(i));
    return names;
}

/// Clean feature matrix plus the generating score. Weak features come in
/// groups (pairs, plus one triple if n_weak is odd) of positively scaled
/// copies of s = a*p + b*q over withheld parents, so the score depends on
/// the group only through s and every copy substitutes for the others.
struct Structured {
    Eigen::MatrixXd X;
    Eigen::VectorXd score;
    std::vector<Relevance> truth;
};

Structured structured_features(const GenSpec& spec, Rng& rng) {
    const int m = spec.n_samples;
    const int n = spec.n_strong + spec.n_weak + spec.n_irrelevant;
    Structured out;
    out.X.resize(m, n);
    out.score = Eigen::VectorXd::Zero(m);
    out.truth.assign(n, Relevance::Irrelevant);

    int col = 0;
    for (int j = 0; j < spec.n_strong; ++j, ++col) {
        const double w = informative_weight(rng);
        const Eigen::VectorXd x = gaussian_column(rng, m);
        out.X.col(col) = x;
        out.score += w * x;
        out.truth[col] = Relevance::Strong;
    }

    int remaining = spec.n_weak;
    while (remaining > 0) {
        const int group = (remaining == 3) ? 3 : 2;
        const double w = informative_weight(rng);
        const double a = rng.uniform(0.5, 1.5);
        const double b = rng.uniform(0.5, 1.5);
        const Eigen::VectorXd s =
            a * gaussian_column(rng, m) + b * gaussian_column(rng, m);
        out.score += w * s;
        for (int k = 0; k < group; ++k, ++col) {
            out.X.col(col) = rng.uniform(0.5, 1.5) * s;
            out.truth[col] = Relevance::Weak;
        }
        remaining -= group;
    }

    for (int j = 0; j < spec.n_irrelevant; ++j, ++col) {
        out.X.col(col) = gaussian_column(rng, m);
    }
    return out;
}

void validate_spec(const GenSpec& spec) {
    if (spec.n_samples < 2 * spec.n_bins)
        throw std::invalid_argument("datagen: too few samples for n_bins");
    if (spec.n_strong + spec.n_weak + spec.n_irrelevant <= 0)
        throw std::invalid_argument("datagen: no features requested");
    if (spec.n_weak == 1)
        throw std::invalid_argument(
            "datagen: weak features require groups of at least two");
    if (spec.n_bins < 2)
        throw std::invalid_argument("datagen: n_bins must be at least 2");
}

Dataset finish_dataset(Eigen::MatrixXd X, const Eigen::VectorXd& score,
                       int n_bins, const std::vector<std::string>& names) {
    const std::vector<double> s(score.data(), score.data() + score.size());
    return Dataset(data::standardize_matrix(X).first,
                   data::equal_frequency_binning(s, n_bins), n_bins, names);
}

}  // namespace

std::pair<Dataset, GroundTruth> generate(const GenSpec& spec) {
    validate_spec(spec);
    Rng rng(Rng::derive(spec.seed, "datagen"));
    Structured st = structured_features(spec, rng);
    if (spec.noise_sigma > 0.0) {
        for (int j = 0; j < st.X.cols(); ++j)
            st.X.col(j) += spec.noise_sigma * gaussian_column(rng, spec.n_samples);
    }
    GroundTruth truth;
    truth.regular = st.truth;
    const int n = static_cast<int>(st.X.cols());
    return {finish_dataset(std::move(st.X), st.score, spec.n_bins,
                           default_names("x", n)),
            std::move(truth)};
}

std::pair<LupiDataset, GroundTruth> generate_lupi_clean(const GenSpec& spec) {
    validate_spec(spec);
    Rng rng(Rng::derive(spec.seed, "datagen-lupi-clean"));
    Structured st = structured_features(spec, rng);
    Eigen::MatrixXd X_reg = st.X;
    for (int j = 0; j < X_reg.cols(); ++j)
        X_reg.col(j) += gaussian_column(rng, spec.n_samples);
    if (spec.noise_sigma > 0.0) {
        for (int j = 0; j < X_reg.cols(); ++j)
            X_reg.col(j) +=
                spec.noise_sigma * gaussian_column(rng, spec.n_samples);
    }
    const int n = static_cast<int>(st.X.cols());
    GroundTruth truth;
    truth.regular = st.truth;
    truth.privileged = st.truth;
    Dataset regular = finish_dataset(std::move(X_reg), st.score, spec.n_bins,
                                     default_names("x", n));
    return {LupiDataset(std::move(regular),
                        data::standardize_matrix(st.X).first,
                        default_names("xs", n)),
            std::move(truth)};
}

std::pair<LupiDataset, GroundTruth> generate_lupi_noise_priv(
    const GenSpec& spec) {
    if (spec.n_priv_irrelevant <= 0)
        throw std::invalid_argument(
            "datagen: NoisePrivileged needs n_priv_irrelevant > 0");
    auto [regular, truth] = generate(spec);
    Rng rng(Rng::derive(spec.seed, "datagen-lupi-noise"));
    Eigen::MatrixXd Xs(spec.n_samples, spec.n_priv_irrelevant);
    for (int j = 0; j < spec.n_priv_irrelevant; ++j)
        Xs.col(j) = gaussian_column(rng, spec.n_samples);
    truth.privileged.assign(spec.n_priv_irrelevant, Relevance::Irrelevant);
    return {LupiDataset(std::move(regular), data::standardize_matrix(Xs).first,
                        default_names("xs", spec.n_priv_irrelevant)),
            std::move(truth)};
}

std::pair<LupiDataset, GroundTruth> generate_lupi(const GenSpec& spec) {
    switch (spec.lupi_mode) {
        case LupiMode::CleanPrivileged: return generate_lupi_clean(spec);
        case LupiMode::NoisePrivileged: return generate_lupi_noise_priv(spec);
        case LupiMode::None: break;
    }
    throw std::invalid_argument("datagen: generate_lupi requires a LUPI mode");
}

std::pair<LupiDataset, GroundTruth> generate_semantic_scenario(
    std::uint64_t seed) {
    constexpr int kGroup = 100;
    constexpr int kGroups = 4;
    constexpr int m = kGroup * kGroups;
    constexpr int kStrong = 3;
    constexpr int kNoiseCols = 3;
    const double sigmas[kStrong] = {0.1, 0.5, 2.0};

    Rng rng(Rng::derive(seed, "datagen-semantic"));
    Eigen::MatrixXd clean(m, kStrong + kNoiseCols);
    Eigen::VectorXd score = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < kStrong; ++j) {
        const double w = informative_weight(rng);
        clean.col(j) = gaussian_column(rng, m);
        score += w * clean.col(j);
    }
    for (int j = kStrong; j < kStrong + kNoiseCols; ++j)
        clean.col(j) = gaussian_column(rng, m);

    // Group g (0..2) corrupts strong feature g; the privileged column g
    // records the realized noise. Group 3 stays clean.
    Eigen::MatrixXd X = clean;
    Eigen::MatrixXd Xs = Eigen::MatrixXd::Zero(m, kStrong);
    for (int g = 0; g < kStrong; ++g) {
        for (int i = g * kGroup; i < (g + 1) * kGroup; ++i) {
            const double eps = sigmas[g] * rng.gaussian();
            X(i, g) += eps;
            Xs(i, g) = eps;
        }
    }

    GroundTruth truth;
    truth.regular.assign(kStrong + kNoiseCols, Relevance::Irrelevant);
    for (int j = 0; j < kStrong; ++j) truth.regular[j] = Relevance::Strong;
    truth.privileged.assign(kStrong, Relevance::Strong);

    Dataset regular = finish_dataset(std::move(X), score, 5,
                                     default_names("x", kStrong + kNoiseCols));
    return {LupiDataset(std::move(regular), data::standardize_matrix(Xs).first,
                        default_names("xs", kStrong)),
            std::move(truth)};
}

GenSpec preset(const std::string& name) {
    struct Row {
        const char* name;
        int m, str, weak, irr;
        LupiMode mode;
        int pstr, pweak, pirr;
    };
    // For CleanPrivileged rows the privileged block mirrors the regular
    // structure; pstr/pweak are informational. NoisePrivileged rows carry
    // pirr pure-noise privileged columns.
    static const Row rows[] = {
        {"set1", 150, 6, 0, 6, LupiMode::None, 0, 0, 0},
        {"set2", 150, 0, 6, 6, LupiMode::None, 0, 0, 0},
        {"set3", 150, 3, 4, 3, LupiMode::None, 0, 0, 0},
        {"set4", 256, 6, 6, 6, LupiMode::None, 0, 0, 0},
        {"set5", 512, 1, 2, 11, LupiMode::None, 0, 0, 0},
        {"set6", 200, 1, 20, 0, LupiMode::None, 0, 0, 0},
        {"set7", 200, 1, 20, 20, LupiMode::None, 0, 0, 0},
        {"set8", 1000, 10, 20, 10, LupiMode::None, 0, 0, 0},
        {"set9", 1000, 10, 20, 200, LupiMode::None, 0, 0, 0},
        {"lupi-set1", 200, 6, 0, 3, LupiMode::CleanPrivileged, 6, 0, 3},
        {"lupi-set2", 200, 0, 12, 3, LupiMode::CleanPrivileged, 0, 12, 3},
        {"lupi-set3", 200, 6, 6, 0, LupiMode::CleanPrivileged, 6, 6, 0},
        {"lupi-set4", 200, 3, 6, 0, LupiMode::CleanPrivileged, 3, 6, 0},
        {"lupi-set5", 200, 1, 4, 0, LupiMode::CleanPrivileged, 1, 4, 0},
        {"lupi-set6", 200, 1, 40, 10, LupiMode::CleanPrivileged, 1, 40, 10},
        {"lupi-set7", 200, 4, 2, 2, LupiMode::NoisePrivileged, 0, 0, 3},
        {"lupi-set8", 200, 0, 4, 2, LupiMode::NoisePrivileged, 0, 0, 3},
    };
    for (const Row& r : rows) {
        if (name != r.name) continue;
        GenSpec spec;
        spec.n_samples = r.m;
        spec.n_strong = r.str;
        spec.n_weak = r.weak;
        spec.n_irrelevant = r.irr;
        spec.lupi_mode = r.mode;
        spec.n_priv_irrelevant = r.pirr;
        return spec;
    }
    std::string msg = "unknown preset '" + name + "'; available:";
    for (const Row& r : rows) msg += std::string(" ") + r.name;
    throw std::invalid_argument(msg);
}

}  // namespace fri::datagen
