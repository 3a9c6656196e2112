#include "fri/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fri::data {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim whitespace and CR
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> cells;  // row-major
};

Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);
    t.header = split_line(line);
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != t.header.size())
            throw std::runtime_error(path + ":" + std::to_string(row) +
                                     ": expected " +
                                     std::to_string(t.header.size()) + " cells");
        std::vector<double> vals(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string& s = cells[c];
            char* end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (s.empty() || end != s.c_str() + s.size() || std::isnan(v) ||
                !std::isfinite(v))
                throw std::runtime_error(path + ": non-numeric cell at row " +
                                         std::to_string(row) + ", column " +
                                         std::to_string(c + 1) + " ('" + s +
                                         "')");
            vals[c] = v;
        }
        t.cells.push_back(std::move(vals));
    }
    if (t.cells.empty()) throw std::runtime_error("no data rows in " + path);
    return t;
}

int resolve_column(const Table& t, const std::string& key,
                   const std::string& path) {
    for (std::size_t c = 0; c < t.header.size(); ++c)
        if (t.header[c] == key) return static_cast<int>(c);
    // Fall back to a 0-based index.
    int idx = -1;
    const auto res =
        std::from_chars(key.data(), key.data() + key.size(), idx);
    if (res.ec == std::errc{} && res.ptr == key.data() + key.size() &&
        idx >= 0 && idx < static_cast<int>(t.header.size()))
        return idx;
    throw std::runtime_error(path + ": no column '" + key + "'");
}

/// Remaps raw labels to contiguous 1..l preserving order.
std::pair<std::vector<int>, int> remap_labels(const std::vector<double>& raw,
                                              const std::string& path) {
    std::map<double, int> distinct;
    for (double v : raw) distinct[v] = 0;
    if (distinct.size() < 2)
        throw std::runtime_error(path + ": label column has a single class");
    int next = 1;
    for (auto& [v, id] : distinct) id = next++;
    std::vector<int> y(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) y[i] = distinct[raw[i]];
    return {y, static_cast<int>(distinct.size())};
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column) {
    const Table t = read_table(path);
    const int label_col = resolve_column(t, label_column, path);
    const int m = static_cast<int>(t.cells.size());
    const int n = static_cast<int>(t.header.size()) - 1;

    std::vector<double> raw_labels(m);
    Eigen::MatrixXd X(m, n);
    std::vector<std::string> names;
    for (int c = 0, out = 0; c < static_cast<int>(t.header.size()); ++c) {
        if (c == label_col) continue;
        names.push_back(t.header[c]);
        for (int i = 0; i < m; ++i) X(i, out) = t.cells[i][c];
        ++out;
    }
    for (int i = 0; i < m; ++i) raw_labels[i] = t.cells[i][label_col];
    auto [y, l] = remap_labels(raw_labels, path);
    return Dataset(std::move(X), std::move(y), l, std::move(names));
}

LupiDataset load_csv_lupi(const std::string& path,
                          const std::string& label_column,
                          const std::vector<std::string>& privileged_columns) {
    const Table t = read_table(path);
    const int label_col = resolve_column(t, label_column, path);
    std::vector<int> priv;
    for (const auto& key : privileged_columns) {
        const int c = resolve_column(t, key, path);
        if (c == label_col)
            throw std::runtime_error(path + ": label column marked privileged");
        priv.push_back(c);
    }
    std::sort(priv.begin(), priv.end());
    priv.erase(std::unique(priv.begin(), priv.end()), priv.end());

    const int m = static_cast<int>(t.cells.size());
    const int total = static_cast<int>(t.header.size());
    const int n_star = static_cast<int>(priv.size());
    const int n = total - 1 - n_star;
    if (n < 1) throw std::runtime_error(path + ": no regular features left");

    Eigen::MatrixXd X(m, n), Xs(m, n_star);
    std::vector<std::string> names, priv_names;
    int out = 0, pout = 0;
    for (int c = 0; c < total; ++c) {
        if (c == label_col) continue;
        const bool is_priv = std::binary_search(priv.begin(), priv.end(), c);
        for (int i = 0; i < m; ++i)
            (is_priv ? Xs(i, pout) : X(i, out)) = t.cells[i][c];
        (is_priv ? priv_names : names).push_back(t.header[c]);
        (is_priv ? pout : out)++;
    }
    std::vector<double> raw_labels(m);
    for (int i = 0; i < m; ++i) raw_labels[i] = t.cells[i][label_col];
    auto [y, l] = remap_labels(raw_labels, path);
    return LupiDataset(Dataset(std::move(X), std::move(y), l, std::move(names)),
                       std::move(Xs), std::move(priv_names));
}

}  // namespace fri::data
