#include "fri/svg.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fri::svg {

namespace {

constexpr double kPanelWidth = 560.0;
constexpr double kPanelHeight = 360.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 80.0;
constexpr double kMarginRight = 20.0;

const char* bar_color(const std::string& relevance) {
    if (relevance == "strong") return "#2e7d32";
    if (relevance == "weak") return "#f9a825";
    return "#9e9e9e";
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Panel {
    std::string title;
    std::vector<const report::FeatureRow*> rows;
    double threshold = 0.0;
    bool has_threshold = false;
};

void render_panel(std::ostringstream& out, const Panel& panel,
                  double x_offset) {
    const double plot_w = kPanelWidth - kMarginLeft - kMarginRight;
    const double plot_h = kPanelHeight - kMarginTop - kMarginBottom;
    const double x0 = x_offset + kMarginLeft;
    const double y0 = kMarginTop;

    double max_val = panel.has_threshold ? panel.threshold : 0.0;
    for (const auto* f : panel.rows) max_val = std::max(max_val, f->upper);
    if (max_val <= 0.0) max_val = 1.0;
    max_val *= 1.1;

    auto y_of = [&](double v) { return y0 + plot_h * (1.0 - v / max_val); };

    out << "<text x=\"" << x_offset + kPanelWidth / 2 << "\" y=\"20\" "
        << "text-anchor=\"middle\" font-size=\"14\">" << escape(panel.title)
        << "</text>\n";
    // Axes.
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0
        << "\" y2=\"" << y0 + plot_h << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 + plot_h << "\" x2=\""
        << x0 + plot_w << "\" y2=\"" << y0 + plot_h
        << "\" stroke=\"black\"/>\n";
    // Y ticks: 0, max/2, max.
    for (double v : {0.0, max_val / 2.0, max_val}) {
        out << "<text x=\"" << x0 - 6 << "\" y=\"" << y_of(v) + 4
            << "\" text-anchor=\"end\" font-size=\"10\">";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3g", v);
        out << buf << "</text>\n";
    }

    const int n = static_cast<int>(panel.rows.size());
    const double slot = plot_w / std::max(1, n);
    const double bar_w = std::min(24.0, slot * 0.6);
    for (int i = 0; i < n; ++i) {
        const auto* f = panel.rows[i];
        const double cx = x0 + slot * (i + 0.5);
        const double top = y_of(f->upper);
        // Zero-height intervals still get a visible sliver.
        const double bottom = std::max(y_of(f->lower), top + 1.0);
        out << "<rect class=\"bar\" x=\"" << cx - bar_w / 2 << "\" y=\"" << top
            << "\" width=\"" << bar_w << "\" height=\"" << bottom - top
            << "\" fill=\"" << bar_color(f->relevance) << "\"/>\n";
        out << "<text x=\"" << cx << "\" y=\"" << y0 + plot_h + 12
            << "\" font-size=\"10\" text-anchor=\"end\" transform=\"rotate(-45 "
            << cx << ' ' << y0 + plot_h + 12 << ")\">" << escape(f->name)
            << "</text>\n";
    }
    if (panel.has_threshold) {
        out << "<line class=\"threshold\" x1=\"" << x0 << "\" y1=\""
            << y_of(panel.threshold) << "\" x2=\"" << x0 + plot_w
            << "\" y2=\"" << y_of(panel.threshold)
            << "\" stroke=\"#c62828\" stroke-dasharray=\"6,4\"/>\n";
    }
}

}  // namespace

std::string render_plot(const report::Report& report) {
    if (report.features.empty())
        throw std::invalid_argument("render_plot: report has no features");
    std::vector<Panel> panels;
    for (const std::string& block : {"regular", "privileged"}) {
        Panel panel;
        panel.title = block + std::string(" features");
        for (const auto& f : report.features)
            if (f.block == block) panel.rows.push_back(&f);
        for (const auto& t : report.thresholds)
            if (t.block == block) {
                panel.threshold = t.upper_maxrel;
                panel.has_threshold = true;
            }
        if (!panel.rows.empty()) panels.push_back(std::move(panel));
    }

    std::ostringstream out;
    const double width = kPanelWidth * panels.size();
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << kPanelHeight << "\" viewBox=\"0 0 " << width
        << ' ' << kPanelHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i)
        render_panel(out, panels[i], kPanelWidth * i);
    out << "</svg>\n";
    return out.str();
}

void emit_plot(const report::Report& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << render_plot(report);
}

}  // namespace fri::svg
