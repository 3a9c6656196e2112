#pragma once

#include <string>

#include "fri/report.hpp"

namespace fri::svg {

/// Renders the relevance profile as a self-contained SVG: one vertical bar
/// per feature spanning [lower, upper], a dashed horizontal line at the
/// block's maxrel threshold, bar color by classification, feature names on
/// the axis. LUPI reports get two panels (regular / privileged).
std::string render_plot(const report::Report& report);

void emit_plot(const report::Report& report, const std::string& path);

}  // namespace fri::svg
