#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fri::data {

/// Ordinal training set: rows are samples, labels live in {1..l} with every
/// bin occupied. Immutable after construction.
struct Dataset {
    Eigen::MatrixXd X;            // m x n
    std::vector<int> y;           // size m, values 1..l
    int l = 0;                    // bin count
    std::vector<std::string> feature_names;  // optional, size n or empty

    Dataset() = default;
    Dataset(Eigen::MatrixXd X_, std::vector<int> y_, int l_,
            std::vector<std::string> names = {});

    int num_samples() const { return static_cast<int>(X.rows()); }
    int num_features() const { return static_cast<int>(X.cols()); }

    /// Sample indices per bin (1-based bins).
    std::vector<std::vector<int>> bin_members() const;

    std::string feature_name(int j) const;
};

/// Regular features plus a privileged block only available at training time.
struct LupiDataset {
    Dataset regular;
    Eigen::MatrixXd X_star;  // m x n*
    std::vector<std::string> privileged_names;

    LupiDataset() = default;
    LupiDataset(Dataset reg, Eigen::MatrixXd xs,
                std::vector<std::string> names = {});

    int num_privileged() const { return static_cast<int>(X_star.cols()); }
    std::string privileged_name(int p) const;
};

enum class Relevance { Strong, Weak, Irrelevant };

std::string to_string(Relevance r);

struct GroundTruth {
    std::vector<Relevance> regular;
    std::vector<Relevance> privileged;  // empty for non-LUPI data

    std::set<int> relevant_regular() const;
    std::set<int> relevant_privileged() const;
};

struct Standardization {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;  // population standard deviation

    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

/// Centers and scales every column to zero mean / unit variance
/// (population convention, divide by m). Throws on a constant column.
std::pair<Dataset, Standardization> standardize(const Dataset& data);

/// Column-wise standardization of a raw matrix.
std::pair<Eigen::MatrixXd, Standardization> standardize_matrix(
    const Eigen::MatrixXd& X);

/// Equal-frequency discretization of a continuous target into l bins;
/// ties ordered by original index (stable), bin sizes differ by at most 1.
std::vector<int> equal_frequency_binning(const std::vector<double>& y_cont,
                                         int l);

/// Macro-averaged mean absolute error over bins:
/// (1/l) * sum_j mean_{i in bin j} |j - pred_i|.
double mmae(const std::vector<int>& y_true, const std::vector<int>& y_pred,
            int l);

struct SelectionScores {
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

/// Compares a predicted relevant-feature set against the ground-truth
/// relevant set (Strong union Weak).
SelectionScores selection_scores(const std::set<int>& predicted_relevant,
                                 const std::vector<Relevance>& truth);

/// Loads a rectangular numeric CSV (header row required). Labels are
/// remapped to contiguous 1..l preserving order. privileged columns (by
/// header name or 0-based index) are split into the X* block.
Dataset load_csv(const std::string& path, const std::string& label_column);
LupiDataset load_csv_lupi(const std::string& path,
                          const std::string& label_column,
                          const std::vector<std::string>& privileged_columns);

}  // namespace fri::data
