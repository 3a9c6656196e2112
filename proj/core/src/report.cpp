#include "fri/report.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace fri::report {

using nlohmann::json;

namespace {

json to_json_obj(const SelectionMetrics& m) {
    return {{"f1", m.f1}, {"precision", m.precision}, {"recall", m.recall}};
}

SelectionMetrics selection_from(const json& j) {
    SelectionMetrics m;
    m.f1 = j.at("f1").get<double>();
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    return m;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

}  // namespace

std::string to_json(const Report& r) {
    json features = json::array();
    for (const auto& f : r.features)
        features.push_back({{"name", f.name},
                            {"block", f.block},
                            {"lower", f.lower},
                            {"upper", f.upper},
                            {"baseline_weight", f.baseline_weight},
                            {"relevance", f.relevance},
                            {"failure", f.failure}});
    json thresholds = json::array();
    for (const auto& t : r.thresholds)
        thresholds.push_back({{"block", t.block},
                              {"upper_minrel", t.upper_minrel},
                              {"upper_maxrel", t.upper_maxrel},
                              {"minrel_population", t.minrel_population},
                              {"maxrel_population", t.maxrel_population}});
    json metrics = {{"train_mmae", r.metrics.train_mmae}};
    if (r.metrics.regular) metrics["regular"] = to_json_obj(*r.metrics.regular);
    if (r.metrics.privileged)
        metrics["privileged"] = to_json_obj(*r.metrics.privileged);
    json j = {{"dataset", r.dataset},
              {"variant", r.variant},
              {"lupi", r.lupi},
              {"C", r.C},
              {"delta", r.delta},
              {"gamma", r.gamma},
              {"p", r.p},
              {"n_perm", r.n_perm},
              {"seed", r.seed},
              {"normalized", r.normalized},
              {"mu", r.mu},
              {"features", features},
              {"thresholds", thresholds},
              {"metrics", metrics},
              {"lp_count", r.lp_count},
              {"any_failure", r.any_failure},
              {"errors", r.errors}};
    return j.dump(2) + "\n";
}

Report from_json(const std::string& text) {
    const json j = json::parse(text);
    Report r;
    r.dataset = j.at("dataset").get<std::string>();
    r.variant = j.at("variant").get<std::string>();
    r.lupi = j.at("lupi").get<bool>();
    r.C = j.at("C").get<double>();
    r.delta = j.at("delta").get<double>();
    r.gamma = j.at("gamma").get<double>();
    r.p = j.at("p").get<double>();
    r.n_perm = j.at("n_perm").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.normalized = j.at("normalized").get<bool>();
    r.mu = j.at("mu").get<double>();
    for (const auto& f : j.at("features")) {
        FeatureRow row;
        row.name = f.at("name").get<std::string>();
        row.block = f.at("block").get<std::string>();
        row.lower = f.at("lower").get<double>();
        row.upper = f.at("upper").get<double>();
        row.baseline_weight = f.at("baseline_weight").get<double>();
        row.relevance = f.at("relevance").get<std::string>();
        row.failure = f.at("failure").get<bool>();
        r.features.push_back(std::move(row));
    }
    for (const auto& t : j.at("thresholds")) {
        BlockThresholds bt;
        bt.block = t.at("block").get<std::string>();
        bt.upper_minrel = t.at("upper_minrel").get<double>();
        bt.upper_maxrel = t.at("upper_maxrel").get<double>();
        bt.minrel_population =
            t.at("minrel_population").get<std::vector<double>>();
        bt.maxrel_population =
            t.at("maxrel_population").get<std::vector<double>>();
        r.thresholds.push_back(std::move(bt));
    }
    const auto& metrics = j.at("metrics");
    r.metrics.train_mmae = metrics.at("train_mmae").get<double>();
    if (metrics.contains("regular"))
        r.metrics.regular = selection_from(metrics.at("regular"));
    if (metrics.contains("privileged"))
        r.metrics.privileged = selection_from(metrics.at("privileged"));
    r.lp_count = j.at("lp_count").get<std::int64_t>();
    r.any_failure = j.at("any_failure").get<bool>();
    r.errors = j.at("errors").get<std::vector<std::string>>();
    return r;
}

void write_report(const Report& report, const std::string& path) {
    open_out(path) << to_json(report);
}

Report read_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return from_json(text);
}

void write_profile_csv(const Report& report, const std::string& path) {
    auto out = open_out(path);
    out << "name,block,lower,upper,baseline_weight,relevance\n";
    out.precision(17);
    for (const auto& f : report.features)
        out << f.name << ',' << f.block << ',' << f.lower << ',' << f.upper
            << ',' << f.baseline_weight << ',' << f.relevance << '\n';
}

void write_timings_csv(const std::vector<TimingRow>& rows,
                       const std::string& path) {
    auto out = open_out(path);
    out << "samples,features,workers,seconds\n";
    out.precision(17);
    for (const auto& r : rows)
        out << r.samples << ',' << r.features << ',' << r.workers << ','
            << r.seconds << '\n';
}

void write_stage_timings_csv(
    const std::vector<std::pair<std::string, double>>& stages,
    const std::string& path) {
    auto out = open_out(path);
    out << "stage,seconds\n";
    out.precision(6);
    for (const auto& [stage, seconds] : stages)
        out << stage << ',' << std::fixed << seconds << '\n';
}

}  // namespace fri::report
