#include "fri/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fri::data {

Dataset::Dataset(Eigen::MatrixXd X_, std::vector<int> y_, int l_,
                 std::vector<std::string> names)
    : X(std::move(X_)), y(std::move(y_)), l(l_), feature_names(std::move(names)) {
    if (l < 2) throw std::invalid_argument("dataset: need at least 2 bins");
    if (static_cast<int>(y.size()) != X.rows())
        throw std::invalid_argument("dataset: label count != row count");
    if (!feature_names.empty() &&
        static_cast<int>(feature_names.size()) != X.cols())
        throw std::invalid_argument("dataset: feature_names length mismatch");
    if (!X.allFinite())
        throw std::invalid_argument("dataset: non-finite entry in X");
    std::vector<int> counts(l, 0);
    for (int lab : y) {
        if (lab < 1 || lab > l)
            throw std::invalid_argument("dataset: label outside 1..l");
        ++counts[lab - 1];
    }
    for (int j = 0; j < l; ++j)
        if (counts[j] == 0)
            throw std::invalid_argument("dataset: empty bin " +
                                        std::to_string(j + 1));
}

std::vector<std::vector<int>> Dataset::bin_members() const {
    std::vector<std::vector<int>> bins(l);
    for (int i = 0; i < num_samples(); ++i) bins[y[i] - 1].push_back(i);
    return bins;
}

std::string Dataset::feature_name(int j) const {
    if (j >= 0 && j < static_cast<int>(feature_names.size()))
        return feature_names[j];
    return "f" + std::to_string(j);
}

LupiDataset::LupiDataset(Dataset reg, Eigen::MatrixXd xs,
                         std::vector<std::string> names)
    : regular(std::move(reg)), X_star(std::move(xs)),
      privileged_names(std::move(names)) {
    if (X_star.rows() != regular.X.rows())
        throw std::invalid_argument("lupi dataset: row counts differ");
    if (!X_star.allFinite())
        throw std::invalid_argument("lupi dataset: non-finite entry in X*");
}

std::string LupiDataset::privileged_name(int p) const {
    if (p >= 0 && p < static_cast<int>(privileged_names.size()))
        return privileged_names[p];
    return "p" + std::to_string(p);
}

std::string to_string(Relevance r) {
    switch (r) {
        case Relevance::Strong: return "strong";
        case Relevance::Weak: return "weak";
        case Relevance::Irrelevant: return "irrelevant";
    }
    return "?";
}

std::set<int> GroundTruth::relevant_regular() const {
    std::set<int> out;
    for (std::size_t j = 0; j < regular.size(); ++j)
        if (regular[j] != Relevance::Irrelevant) out.insert(static_cast<int>(j));
    return out;
}

std::set<int> GroundTruth::relevant_privileged() const {
    std::set<int> out;
    for (std::size_t p = 0; p < privileged.size(); ++p)
        if (privileged[p] != Relevance::Irrelevant)
            out.insert(static_cast<int>(p));
    return out;
}

Eigen::MatrixXd Standardization::apply(const Eigen::MatrixXd& X) const {
    if (X.cols() != mean.size())
        throw std::invalid_argument("standardization: column count mismatch");
    return (X.rowwise() - mean.transpose()).array().rowwise() /
           scale.transpose().array();
}

std::pair<Eigen::MatrixXd, Standardization> standardize_matrix(
    const Eigen::MatrixXd& X) {
    const int m = static_cast<int>(X.rows());
    const int n = static_cast<int>(X.cols());
    Standardization params;
    params.mean.resize(n);
    params.scale.resize(n);
    for (int j = 0; j < n; ++j) {
        const double mean = X.col(j).mean();
        const double var = (X.col(j).array() - mean).square().sum() / m;
        if (var <= 0.0)
            throw std::invalid_argument("standardize: zero-variance feature " +
                                        std::to_string(j));
        params.mean[j] = mean;
        params.scale[j] = std::sqrt(var);
    }
    return {params.apply(X), params};
}

std::pair<Dataset, Standardization> standardize(const Dataset& data) {
    auto [X, params] = standardize_matrix(data.X);
    return {Dataset(std::move(X), data.y, data.l, data.feature_names),
            std::move(params)};
}

std::vector<int> equal_frequency_binning(const std::vector<double>& y_cont,
                                         int l) {
    const int m = static_cast<int>(y_cont.size());
    if (l < 2) throw std::invalid_argument("binning: need l >= 2");
    if (m < l) throw std::invalid_argument("binning: fewer samples than bins");
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return y_cont[a] < y_cont[b];
    });
    std::vector<int> labels(m);
    const int base = m / l, extra = m % l;
    int pos = 0;
    for (int bin = 1; bin <= l; ++bin) {
        const int size = base + (bin <= extra ? 1 : 0);
        for (int k = 0; k < size; ++k) labels[order[pos++]] = bin;
    }
    return labels;
}

double mmae(const std::vector<int>& y_true, const std::vector<int>& y_pred,
            int l) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("mmae: length mismatch");
    std::vector<double> err(l, 0.0);
    std::vector<int> count(l, 0);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i], p = y_pred[i];
        if (t < 1 || t > l || p < 1 || p > l)
            throw std::invalid_argument("mmae: label outside 1..l");
        err[t - 1] += std::abs(t - p);
        ++count[t - 1];
    }
    double total = 0.0;
    for (int j = 0; j < l; ++j) {
        if (count[j] == 0)
            throw std::invalid_argument("mmae: empty true bin " +
                                        std::to_string(j + 1));
        total += err[j] / count[j];
    }
    return total / l;
}

SelectionScores selection_scores(const std::set<int>& predicted_relevant,
                                 const std::vector<Relevance>& truth) {
    int tp = 0, fp = 0, fn = 0;
    for (int j : predicted_relevant) {
        if (j < 0 || j >= static_cast<int>(truth.size()))
            throw std::invalid_argument("selection_scores: index out of range");
        if (truth[j] != Relevance::Irrelevant) ++tp;
        else ++fp;
    }
    for (std::size_t j = 0; j < truth.size(); ++j)
        if (truth[j] != Relevance::Irrelevant &&
            !predicted_relevant.count(static_cast<int>(j)))
            ++fn;
    SelectionScores s;
    if (tp + fp + fn == 0) {  // nothing relevant, nothing selected
        s.precision = s.recall = s.f1 = 1.0;
        return s;
    }
    s.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    s.recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

}  // namespace fri::data
