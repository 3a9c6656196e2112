#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "fri/data.hpp"
#include "fri/datagen.hpp"
#include "fri/lp.hpp"
#include "fri/lupi.hpp"
#include "fri/ordreg.hpp"
#include "fri/relevance.hpp"
#include "fri/report.hpp"
#include "fri/rng.hpp"
#include "fri/svg.hpp"
#include "fri/thresholding.hpp"

namespace {

using namespace fri;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct CommonOpts {
    std::string preset;
    std::string csv;
    std::string label_col = "label";
    std::vector<std::string> priv_cols;
    std::string variant = "explicit";
    double C = 1.0;
    std::string c_grid;  // empty = fixed C; "default" or comma list
    double delta = 0.001;
    double gamma = 1.0;
    double p = 0.999;
    double noise_sigma = 0.0;
    int n_perm = 50;
    int workers = static_cast<int>(
        std::max(1u, std::thread::hardware_concurrency()));
    std::uint64_t seed = 0;
    std::string out = ".";
    bool normalize = false;
};

void add_dataset_flags(CLI::App* app, CommonOpts& o) {
    app->add_option("--preset", o.preset, "named synthetic preset");
    app->add_option("--csv", o.csv, "CSV dataset path");
    app->add_option("--label-col", o.label_col, "label column (CSV input)");
    app->add_option("--privileged-cols", o.priv_cols,
                    "privileged columns (CSV input)")
        ->delimiter(',');
    app->add_option("--seed", o.seed, "master seed");
    app->add_option("--noise-sigma", o.noise_sigma, "predictor noise sigma")
        ->check(CLI::NonNegativeNumber);
}

void add_model_flags(CLI::App* app, CommonOpts& o) {
    app->add_option("--variant", o.variant, "explicit|implicit")
        ->check(CLI::IsMember({"explicit", "implicit"}));
    app->add_option("--c", o.C, "fixed C")->check(CLI::PositiveNumber);
    app->add_option("--c-grid", o.c_grid,
                    "cross-validate C: 'default' or comma-separated values");
    app->add_option("--delta", o.delta, "budget slack delta")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--gamma", o.gamma, "privileged regularization (LUPI)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--p", o.p, "prediction-interval coverage");
    app->add_option("--n-perm", o.n_perm, "permutation draws");
    app->add_option("--workers", o.workers, "worker threads")
        ->check(CLI::PositiveNumber);
    app->add_option("--out", o.out, "output directory");
    app->add_flag("--normalize", o.normalize,
                  "normalize intervals by the baseline L1 norm");
}

struct LoadedData {
    std::variant<data::Dataset, data::LupiDataset> data;
    std::optional<data::GroundTruth> truth;
    std::string name;

    bool is_lupi() const {
        return std::holds_alternative<data::LupiDataset>(data);
    }
    const data::Dataset& regular() const {
        return is_lupi() ? std::get<data::LupiDataset>(data).regular
                         : std::get<data::Dataset>(data);
    }
};

LoadedData load_data(const CommonOpts& o) {
    if (o.preset.empty() == o.csv.empty())
        throw std::invalid_argument("need exactly one of --preset / --csv");
    LoadedData out;
    if (!o.preset.empty()) {
        datagen::GenSpec spec = datagen::preset(o.preset);
        spec.seed = o.seed;
        spec.noise_sigma = o.noise_sigma;
        out.name = o.preset;
        if (spec.lupi_mode == datagen::LupiMode::None) {
            auto [d, truth] = datagen::generate(spec);
            out.data = std::move(d);
            out.truth = std::move(truth);
        } else {
            auto [d, truth] = datagen::generate_lupi(spec);
            out.data = std::move(d);
            out.truth = std::move(truth);
        }
        return out;
    }
    out.name = o.csv;
    if (o.priv_cols.empty())
        out.data = data::load_csv(o.csv, o.label_col);
    else
        out.data = data::load_csv_lupi(o.csv, o.label_col, o.priv_cols);
    return out;
}

std::vector<double> parse_c_grid(const std::string& text) {
    if (text == "default") return ordreg::default_c_grid();
    std::vector<double> grid;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) grid.push_back(std::stod(item));
    if (grid.empty()) throw std::invalid_argument("empty --c-grid");
    return grid;
}

int lupi_predict_one(const Eigen::VectorXd& w, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& x) {
    const double score = w.dot(x);
    for (int j = 0; j < b.size(); ++j)
        if (score < b(j)) return j + 1;
    return static_cast<int>(b.size()) + 1;
}

std::string class_name(data::Relevance r) { return data::to_string(r); }

report::SelectionMetrics scores_for(
    const std::vector<data::Relevance>& classes,
    const std::vector<data::Relevance>& truth) {
    std::set<int> predicted;
    for (int j = 0; j < static_cast<int>(classes.size()); ++j)
        if (classes[j] != data::Relevance::Irrelevant) predicted.insert(j);
    const auto s = data::selection_scores(predicted, truth);
    return {s.f1, s.precision, s.recall};
}

void scale_block(std::vector<report::FeatureRow>& rows,
                 report::BlockThresholds& thresholds,
                 const std::string& block, double norm) {
    const double f = norm > 1e-12 ? norm : 1.0;
    for (auto& row : rows)
        if (row.block == block) {
            row.lower /= f;
            row.upper /= f;
            row.baseline_weight /= f;
        }
    thresholds.upper_minrel /= f;
    thresholds.upper_maxrel /= f;
    for (auto& v : thresholds.minrel_population) v /= f;
    for (auto& v : thresholds.maxrel_population) v /= f;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct StageTimer {
    std::vector<std::pair<std::string, double>> stages;
    Clock::time_point total_start = Clock::now();

    template <typename F>
    auto time(const std::string& name, F&& fn) {
        const auto start = Clock::now();
        try {
            auto result = fn();
            stages.emplace_back(name, seconds_since(start));
            return result;
        } catch (const std::exception& e) {
            throw std::runtime_error("stage '" + name + "': " + e.what());
        }
    }
};

// ---------------------------------------------------------------- generate

int cmd_generate(const CommonOpts& o) {
    const LoadedData loaded = load_data(o);
    fs::create_directories(o.out);
    const auto& reg = loaded.regular();
    std::ofstream csv(fs::path(o.out) / "data.csv");
    if (!csv) throw std::runtime_error("cannot write data.csv");
    csv.precision(17);
    for (int j = 0; j < reg.num_features(); ++j)
        csv << reg.feature_name(j) << ',';
    const data::LupiDataset* lupi_data =
        loaded.is_lupi() ? &std::get<data::LupiDataset>(loaded.data) : nullptr;
    if (lupi_data)
        for (int p = 0; p < lupi_data->num_privileged(); ++p)
            csv << lupi_data->privileged_name(p) << ',';
    csv << "label\n";
    for (int i = 0; i < reg.num_samples(); ++i) {
        for (int j = 0; j < reg.num_features(); ++j) csv << reg.X(i, j) << ',';
        if (lupi_data)
            for (int p = 0; p < lupi_data->num_privileged(); ++p)
                csv << lupi_data->X_star(i, p) << ',';
        csv << reg.y[i] << '\n';
    }

    std::ofstream manifest(fs::path(o.out) / "manifest.json");
    if (!manifest) throw std::runtime_error("cannot write manifest.json");
    manifest << "{\n  \"dataset\": \"" << loaded.name << "\",\n  \"seed\": "
             << o.seed << ",\n  \"noise_sigma\": " << o.noise_sigma
             << ",\n  \"bins\": " << reg.l;
    auto dump_truth = [&](const char* key,
                          const std::vector<data::Relevance>& t) {
        manifest << ",\n  \"" << key << "\": [";
        for (std::size_t j = 0; j < t.size(); ++j)
            manifest << (j ? ", " : "") << '"' << class_name(t[j]) << '"';
        manifest << ']';
    };
    if (loaded.truth) {
        dump_truth("truth_regular", loaded.truth->regular);
        if (!loaded.truth->privileged.empty())
            dump_truth("truth_privileged", loaded.truth->privileged);
    }
    manifest << "\n}\n";
    std::cout << "wrote " << (fs::path(o.out) / "data.csv").string() << " ("
              << reg.num_samples() << " samples)\n";
    return 0;
}

// --------------------------------------------------------------------- run

struct RunResult {
    report::Report report;
    std::vector<std::pair<std::string, double>> stages;
};

RunResult run_pipeline(const CommonOpts& o, const LoadedData& loaded) {
    const std::uint64_t lp_start = lp::solve_invocations();
    StageTimer timer;
    report::Report r;
    r.dataset = loaded.name;
    r.variant = o.variant;
    r.lupi = loaded.is_lupi();
    r.C = o.C;
    r.delta = o.delta;
    r.gamma = o.gamma;
    r.p = o.p;
    r.n_perm = o.n_perm;
    r.seed = o.seed;
    r.normalized = o.normalize;

    const ordreg::Variant variant = o.variant == "implicit"
                                        ? ordreg::Variant::Implicit
                                        : ordreg::Variant::Explicit;

    if (!o.c_grid.empty()) {
        if (r.lupi)
            throw std::invalid_argument(
                "--c-grid is not supported with privileged data; pass --c");
        r.C = timer.time("cv", [&] {
            const auto grid = parse_c_grid(o.c_grid);
            return ordreg::cross_validate(loaded.regular(), variant, grid, 5,
                                          Rng::derive(o.seed, "cv"))
                .best_C;
        });
    }

    if (!r.lupi) {
        const auto& d = std::get<data::Dataset>(loaded.data);
        relevance::RelevanceParams params;
        params.delta = o.delta;
        params.C = r.C;
        params.variant = variant;

        auto prof = timer.time("profile", [&] {
            return relevance::relevance_profile(d, params, o.workers, false);
        });
        auto pops = timer.time("thresholds", [&] {
            return thresholding::noise_populations(d, params, o.n_perm, o.seed,
                                                   o.workers);
        });
        const auto pis = thresholding::prediction_intervals(pops, o.p);
        const auto cls = thresholding::classify(prof.intervals, pis);

        r.mu = prof.baseline.mu_X;
        r.any_failure = prof.any_failure;
        for (int j = 0; j < d.num_features(); ++j) {
            const auto& iv = prof.intervals[j];
            r.features.push_back({d.feature_name(j), "regular", iv.lower,
                                  iv.upper, std::abs(prof.baseline.w(j)),
                                  class_name(cls.classes[j]),
                                  iv.failure.has_value()});
            if (iv.failure) r.errors.push_back(*iv.failure);
        }
        r.thresholds.push_back({"regular", pis.upper_minrel, pis.upper_maxrel,
                                pops.minrel_samples, pops.maxrel_samples});
        r.metrics.train_mmae = data::mmae(
            d.y, ordreg::predict_all(prof.baseline, d.X), d.l);
        if (loaded.truth)
            r.metrics.regular = scores_for(cls.classes, loaded.truth->regular);
        if (o.normalize)
            scale_block(r.features, r.thresholds[0], "regular",
                        prof.baseline.w_l1);
    } else {
        const auto& d = std::get<data::LupiDataset>(loaded.data);
        if (variant == ordreg::Variant::Implicit)
            throw std::invalid_argument(
                "privileged data supports only --variant explicit");
        lupi::LupiRelevanceParams params{o.delta, r.C, o.gamma};

        auto prof = timer.time("profile", [&] {
            return lupi::relevance_profile_lupi(d, params, o.workers, false);
        });
        auto pops = timer.time("thresholds", [&] {
            return thresholding::lupi_noise_populations(d, params, o.n_perm,
                                                        o.seed, o.workers);
        });
        const auto reg_pis =
            thresholding::prediction_intervals(pops.regular, o.p);
        const auto priv_pis =
            thresholding::prediction_intervals(pops.privileged, o.p);
        const auto reg_cls = thresholding::classify(prof.regular, reg_pis);
        const auto priv_cls =
            thresholding::classify(prof.privileged, priv_pis);

        r.mu = prof.baseline.mu_X;
        r.any_failure = prof.any_failure;
        for (int j = 0; j < d.regular.num_features(); ++j) {
            const auto& iv = prof.regular[j];
            r.features.push_back({d.regular.feature_name(j), "regular",
                                  iv.lower, iv.upper,
                                  std::abs(prof.baseline.w(j)),
                                  class_name(reg_cls.classes[j]),
                                  iv.failure.has_value()});
            if (iv.failure) r.errors.push_back(*iv.failure);
        }
        for (int p = 0; p < d.num_privileged(); ++p) {
            const auto& iv = prof.privileged[p];
            const double bw = std::max(std::abs(prof.baseline.w_star_chi(p)),
                                       std::abs(prof.baseline.w_star_xi(p)));
            r.features.push_back({d.privileged_name(p), "privileged", iv.lower,
                                  iv.upper, bw,
                                  class_name(priv_cls.classes[p]),
                                  iv.failure.has_value()});
            if (iv.failure) r.errors.push_back(*iv.failure);
        }
        r.thresholds.push_back({"regular", reg_pis.upper_minrel,
                                reg_pis.upper_maxrel,
                                pops.regular.minrel_samples,
                                pops.regular.maxrel_samples});
        r.thresholds.push_back({"privileged", priv_pis.upper_minrel,
                                priv_pis.upper_maxrel,
                                pops.privileged.minrel_samples,
                                pops.privileged.maxrel_samples});
        std::vector<int> preds(d.regular.num_samples());
        for (int i = 0; i < d.regular.num_samples(); ++i)
            preds[i] = lupi_predict_one(prof.baseline.w, prof.baseline.b,
                                        d.regular.X.row(i).transpose());
        r.metrics.train_mmae = data::mmae(d.regular.y, preds, d.regular.l);
        if (loaded.truth) {
            r.metrics.regular =
                scores_for(reg_cls.classes, loaded.truth->regular);
            if (!loaded.truth->privileged.empty())
                r.metrics.privileged =
                    scores_for(priv_cls.classes, loaded.truth->privileged);
        }
        if (o.normalize) {
            scale_block(r.features, r.thresholds[0], "regular",
                        prof.baseline.w_l1);
            scale_block(r.features, r.thresholds[1], "privileged",
                        prof.baseline.w_star_l1);
        }
    }

    r.lp_count =
        static_cast<std::int64_t>(lp::solve_invocations() - lp_start);
    timer.stages.emplace_back("total", seconds_since(timer.total_start));
    return {std::move(r), std::move(timer.stages)};
}

int cmd_run(const CommonOpts& o) {
    const LoadedData loaded = load_data(o);
    RunResult result = run_pipeline(o, loaded);
    fs::create_directories(o.out);
    report::write_report(result.report,
                         (fs::path(o.out) / "report.json").string());
    report::write_profile_csv(result.report,
                              (fs::path(o.out) / "profile.csv").string());
    svg::emit_plot(result.report, (fs::path(o.out) / "plot.svg").string());
    report::write_stage_timings_csv(
        result.stages, (fs::path(o.out) / "timings.csv").string());

    int strong = 0, weak = 0, irrelevant = 0;
    for (const auto& f : result.report.features) {
        if (f.relevance == "strong") ++strong;
        else if (f.relevance == "weak") ++weak;
        else ++irrelevant;
    }
    std::cout << "dataset=" << result.report.dataset
              << " features=" << result.report.features.size()
              << " strong=" << strong << " weak=" << weak
              << " irrelevant=" << irrelevant
              << " lp_count=" << result.report.lp_count
              << " mmae=" << result.report.metrics.train_mmae << '\n';
    if (result.report.metrics.regular)
        std::cout << "regular F1=" << result.report.metrics.regular->f1
                  << '\n';
    if (result.report.metrics.privileged)
        std::cout << "privileged F1=" << result.report.metrics.privileged->f1
                  << '\n';
    if (result.report.any_failure) {
        std::cerr << "LP failures occurred; see report errors\n";
        return 1;
    }
    return 0;
}

// ------------------------------------------------------------------- bench

int cmd_bench(const CommonOpts& base, const std::vector<std::string>& presets,
              int repeats) {
    fs::create_directories(base.out);
    std::ofstream table(fs::path(base.out) / "bench.csv");
    if (!table) throw std::runtime_error("cannot write bench.csv");
    table << "preset,block,runs,failed,f1_mean,f1_std,precision_mean,"
             "recall_mean\n";
    for (const auto& preset : presets) {
        struct Acc {
            std::vector<double> f1, precision, recall;
        };
        Acc regular, privileged;
        int failed = 0;
        bool has_priv = false;
        for (int rep = 0; rep < repeats; ++rep) {
            CommonOpts o = base;
            o.preset = preset;
            o.csv.clear();
            o.seed = base.seed + static_cast<std::uint64_t>(rep);
            try {
                const LoadedData loaded = load_data(o);
                const RunResult result = run_pipeline(o, loaded);
                if (result.report.any_failure) throw std::runtime_error(
                    "LP failure markers in report");
                if (result.report.metrics.regular) {
                    regular.f1.push_back(result.report.metrics.regular->f1);
                    regular.precision.push_back(
                        result.report.metrics.regular->precision);
                    regular.recall.push_back(
                        result.report.metrics.regular->recall);
                }
                if (result.report.metrics.privileged) {
                    has_priv = true;
                    privileged.f1.push_back(
                        result.report.metrics.privileged->f1);
                    privileged.precision.push_back(
                        result.report.metrics.privileged->precision);
                    privileged.recall.push_back(
                        result.report.metrics.privileged->recall);
                }
            } catch (const std::exception& e) {
                ++failed;
                std::cerr << preset << " rep " << rep << " failed: "
                          << e.what() << '\n';
            }
        }
        auto emit = [&](const std::string& block, const Acc& acc) {
            const int n = static_cast<int>(acc.f1.size());
            auto mean = [&](const std::vector<double>& v) {
                return v.empty() ? 0.0
                                 : std::accumulate(v.begin(), v.end(), 0.0) /
                                       static_cast<double>(v.size());
            };
            const double f1_mean = mean(acc.f1);
            double ss = 0.0;
            for (double v : acc.f1) ss += (v - f1_mean) * (v - f1_mean);
            const double f1_std = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
            table << preset << ',' << block << ',' << n << ',' << failed
                  << ',' << f1_mean << ',' << (n > 1 ? std::to_string(f1_std)
                                                     : std::string())
                  << ',' << mean(acc.precision) << ',' << mean(acc.recall)
                  << '\n';
            std::cout << preset << " [" << block << "] F1=" << f1_mean
                      << " precision=" << mean(acc.precision)
                      << " recall=" << mean(acc.recall) << " (" << n
                      << " runs, " << failed << " failed)\n";
        };
        emit("regular", regular);
        if (has_priv) emit("privileged", privileged);
    }
    return 0;
}

// ------------------------------------------------------------------- scale

int cmd_scale(const CommonOpts& base, const std::vector<int>& samples,
              const std::vector<int>& features) {
    if (samples.empty() || features.empty())
        throw std::invalid_argument("--samples and --features must be given");
    fs::create_directories(base.out);
    std::vector<report::TimingRow> rows;
    for (int m : samples) {
        for (int d : features) {
            datagen::GenSpec spec;
            spec.n_samples = m;
            spec.n_strong = std::min(2, d);
            spec.n_irrelevant = d - spec.n_strong;
            spec.n_bins = std::min(5, m / 2);
            spec.seed = base.seed;
            const auto [ds, truth] = datagen::generate(spec);
            relevance::RelevanceParams params;
            params.C = base.C;
            params.delta = base.delta;
            for (int workers : {1, base.workers}) {
                const auto start = Clock::now();
                auto prof =
                    relevance::relevance_profile(ds, params, workers, false);
                if (prof.any_failure)
                    throw std::runtime_error("LP failure during scaling run");
                rows.push_back({m, d, workers, seconds_since(start)});
                std::cout << "samples=" << m << " features=" << d
                          << " workers=" << workers << " seconds="
                          << rows.back().seconds << '\n';
                if (workers == base.workers && base.workers == 1) break;
            }
        }
    }
    report::write_timings_csv(
        rows, (fs::path(base.out) / "timings.csv").string());
    return 0;
}

// -------------------------------------------------------------------- plot

int cmd_plot(const std::string& report_path, const std::string& out_dir) {
    const report::Report r = report::read_report(report_path);
    fs::create_directories(out_dir);
    svg::emit_plot(r, (fs::path(out_dir) / "plot.svg").string());
    std::cout << "wrote " << (fs::path(out_dir) / "plot.svg").string()
              << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feature relevance intervals for ordinal regression"};
    app.require_subcommand(1);
    CommonOpts opts;

    auto* gen = app.add_subcommand("generate", "emit a synthetic dataset");
    add_dataset_flags(gen, opts);
    gen->add_option("--out", opts.out, "output directory");

    auto* run = app.add_subcommand("run", "full relevance-interval pipeline");
    add_dataset_flags(run, opts);
    add_model_flags(run, opts);

    std::vector<std::string> bench_presets = {"set1", "set2", "set3", "set4",
                                              "set5"};
    int repeats = 10;
    auto* bench = app.add_subcommand("bench", "preset benchmark table");
    add_dataset_flags(bench, opts);
    add_model_flags(bench, opts);
    bench->add_option("--presets", bench_presets, "presets to run")
        ->delimiter(',');
    bench->add_option("--repeats", repeats, "seeded repeats per preset")
        ->check(CLI::PositiveNumber);

    std::vector<int> scale_samples, scale_features;
    auto* scale = app.add_subcommand("scale", "timing across problem sizes");
    add_dataset_flags(scale, opts);
    add_model_flags(scale, opts);
    scale->add_option("--samples", scale_samples, "sample-count grid")
        ->delimiter(',')
        ->required();
    scale->add_option("--features", scale_features, "feature-count grid")
        ->delimiter(',')
        ->required();

    std::string report_path;
    auto* plot = app.add_subcommand("plot", "render plot.svg from a report");
    plot->add_option("--report", report_path, "report.json path")->required();
    plot->add_option("--out", opts.out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(opts);
        if (run->parsed()) return cmd_run(opts);
        if (bench->parsed()) return cmd_bench(opts, bench_presets, repeats);
        if (scale->parsed()) return cmd_scale(opts, scale_samples,
                                              scale_features);
        if (plot->parsed()) return cmd_plot(report_path, opts.out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
