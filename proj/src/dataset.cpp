#include "kscale/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string_view>

#include "kscale/error.hpp"

namespace kscale {

Grid::Grid(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) throw usage_error("Grid: value count does not match shape");
}

DataMatrix::DataMatrix(std::size_t n_entities, std::size_t n_features, std::vector<double> values,
                       bool standardized)
    : n_(n_entities), v_(n_features), values_(std::move(values)), standardized_(standardized) {
    if (n_ < 2) throw data_error("data matrix needs at least 2 entities, got " + std::to_string(n_));
    if (v_ < 1) throw data_error("data matrix needs at least 1 feature");
    if (values_.size() != n_ * v_) throw data_error("data matrix value count does not match its shape");
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
        if (!std::isfinite(values_[idx])) {
            throw data_error("non-finite value at row " + std::to_string(idx / v_) + ", feature " +
                             std::to_string(idx % v_));
        }
    }
}

DataMatrix DataMatrix::from_rows(const std::vector<std::vector<double>>& rows, bool standardized) {
    if (rows.empty()) throw data_error("data matrix has no rows");
    const std::size_t v = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * v);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != v) throw data_error("row " + std::to_string(i) + " has a different length");
        values.insert(values.end(), rows[i].begin(), rows[i].end());
    }
    return DataMatrix(rows.size(), v, std::move(values), standardized);
}

std::vector<double> DataMatrix::column(std::size_t v) const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = values_[i * v_ + v];
    return out;
}

DataMatrix standardize_range(const DataMatrix& raw, std::vector<std::size_t>* constant_features) {
    if (raw.standardized()) throw usage_error("standardize_range: data is already standardized");
    const std::size_t n = raw.n_entities();
    const std::size_t nv = raw.n_features();
    std::vector<double> out(raw.values());
    for (std::size_t v = 0; v < nv; ++v) {
        double lo = raw(0, v), hi = raw(0, v), sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = raw(i, v);
            lo = std::min(lo, y);
            hi = std::max(hi, y);
            sum += y;
        }
        const double mean = sum / static_cast<double>(n);
        const double range = hi - lo;
        if (range == 0.0) {
            std::cerr << "warning: feature " << v << " is constant; mapped to zero\n";
            if (constant_features) constant_features->push_back(v);
            for (std::size_t i = 0; i < n; ++i) out[i * nv + v] = 0.0;
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) out[i * nv + v] = (raw(i, v) - mean) / range;
    }
    return DataMatrix(n, nv, std::move(out), true);
}

DataMatrix ensure_standardized(const DataMatrix& data) {
    return data.standardized() ? data : standardize_range(data);
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
        s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view cell, double& out) {
    cell = trim(cell);
    if (cell.empty()) return false;
    if (cell.front() == '+') cell.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size();
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + path.string());
    return in;
}

}  // namespace

bool csv_has_header(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) return false;
    double dummy = 0.0;
    for (const auto cell : split_commas(line)) {
        if (!parse_double(cell, dummy)) return true;
    }
    return false;
}

LabeledData read_labeled_csv(const std::filesystem::path& path, bool has_header) {
    auto in = open_input(path);
    std::string line;
    std::vector<std::string> names;
    bool label_column = false;
    std::size_t width = 0;
    std::size_t line_no = 0;

    if (has_header) {
        if (!std::getline(in, line)) throw data_error(path.string() + ": empty file");
        ++line_no;
        for (const auto cell : split_commas(line)) names.emplace_back(trim(cell));
        width = names.size();
        if (!names.empty() && names.back() == "label") {
            label_column = true;
            names.pop_back();
        }
    }

    std::vector<double> values;
    std::vector<int> labels;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_commas(line);
        if (width == 0) width = cells.size();
        if (cells.size() != width) {
            throw data_error(path.string() + ": row " + std::to_string(line_no) + " has " +
                             std::to_string(cells.size()) + " cells, expected " + std::to_string(width));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double x = 0.0;
            if (!parse_double(cells[c], x)) {
                throw data_error(path.string() + ": cannot parse row " + std::to_string(line_no) + ", column " +
                                 std::to_string(c + 1) + " ('" + std::string(trim(cells[c])) + "')");
            }
            if (label_column && c + 1 == cells.size()) {
                if (x != std::floor(x)) {
                    throw data_error(path.string() + ": non-integer label at row " + std::to_string(line_no));
                }
                labels.push_back(static_cast<int>(x));
            } else {
                if (!std::isfinite(x)) {
                    throw data_error(path.string() + ": non-finite value at row " + std::to_string(line_no) +
                                     ", column " + std::to_string(c + 1));
                }
                values.push_back(x);
            }
        }
        ++rows;
    }
    const std::size_t nv = label_column ? width - 1 : width;
    if (rows == 0 || nv == 0) throw data_error(path.string() + ": no data rows");
    LabeledData out{DataMatrix(rows, nv, std::move(values), false), std::nullopt, std::move(names)};
    if (label_column) out.labels = std::move(labels);
    return out;
}

DataMatrix read_csv(const std::filesystem::path& path, bool has_header) {
    return read_labeled_csv(path, has_header).data;
}

void write_csv(const DataMatrix& data, const std::filesystem::path& path, const std::vector<int>* labels,
               const std::vector<std::string>* feature_names) {
    if (labels && labels->size() != data.n_entities()) throw usage_error("write_csv: label count mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write " + path.string());

    const std::size_t nv = data.n_features();
    if (labels || feature_names) {
        for (std::size_t v = 0; v < nv; ++v) {
            if (v) out << ',';
            if (feature_names && feature_names->size() == nv)
                out << (*feature_names)[v];
            else
                out << 'f' << v;
        }
        if (labels) out << ",label";
        out << '\n';
    }
    char buf[64];
    for (std::size_t i = 0; i < data.n_entities(); ++i) {
        for (std::size_t v = 0; v < nv; ++v) {
            if (v) out << ',';
            const auto res = std::to_chars(buf, buf + sizeof buf, data(i, v), std::chars_format::general, 17);
            out.write(buf, res.ptr - buf);
        }
        if (labels) out << ',' << (*labels)[i];
        out << '\n';
    }
    if (!out) throw data_error("I/O failure while writing " + path.string());
}

}  // namespace kscale
