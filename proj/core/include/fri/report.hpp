#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fri::report {

/// One feature's interval plus its classification. `block` is "regular"
/// or "privileged"; non-LUPI reports only carry regular rows.
struct FeatureRow {
    std::string name;
    std::string block = "regular";
    double lower = 0.0;
    double upper = 0.0;
    double baseline_weight = 0.0;
    std::string relevance;  // "strong" | "weak" | "irrelevant"
    bool failure = false;

    bool operator==(const FeatureRow&) const = default;
};

/// Permutation-null thresholds and the populations they came from.
struct BlockThresholds {
    std::string block = "regular";
    double upper_minrel = 0.0;
    double upper_maxrel = 0.0;
    std::vector<double> minrel_population;
    std::vector<double> maxrel_population;

    bool operator==(const BlockThresholds&) const = default;
};

struct SelectionMetrics {
    double f1 = 0.0;
    double precision = 0.0;
    double recall = 0.0;

    bool operator==(const SelectionMetrics&) const = default;
};

struct Metrics {
    double train_mmae = 0.0;
    std::optional<SelectionMetrics> regular;     // needs ground truth
    std::optional<SelectionMetrics> privileged;  // needs LUPI ground truth

    bool operator==(const Metrics&) const = default;
};

/// report.json deliberately contains only deterministic results (no
/// wall-clock values, no worker count): the determinism contract makes it
/// byte-identical across --workers settings. Timings go to timings.csv.
struct Report {
    std::string dataset;  // preset name or CSV path
    std::string variant = "explicit";
    bool lupi = false;
    double C = 1.0;
    double delta = 0.001;
    double gamma = 1.0;
    double p = 0.999;
    int n_perm = 50;
    std::uint64_t seed = 0;
    bool normalized = false;
    double mu = 0.0;  // baseline objective

    std::vector<FeatureRow> features;
    std::vector<BlockThresholds> thresholds;
    Metrics metrics;
    std::int64_t lp_count = 0;
    bool any_failure = false;
    std::vector<std::string> errors;

    bool operator==(const Report&) const = default;
};

std::string to_json(const Report& report);
Report from_json(const std::string& text);

void write_report(const Report& report, const std::string& path);
Report read_report(const std::string& path);

/// One row per feature: name,block,lower,upper,baseline_weight,relevance.
void write_profile_csv(const Report& report, const std::string& path);

/// Generic timing table for the `scale` subcommand.
struct TimingRow {
    int samples = 0;
    int features = 0;
    int workers = 1;
    double seconds = 0.0;

    bool operator==(const TimingRow&) const = default;
};

void write_timings_csv(const std::vector<TimingRow>& rows,
                       const std::string& path);

/// Per-stage wall-clock table written next to report.json by `run`.
void write_stage_timings_csv(
    const std::vector<std::pair<std::string, double>>& stages,
    const std::string& path);

}  // namespace fri::report
