#include "kscale/validity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kscale/error.hpp"
#include "kscale/metric.hpp"

namespace kscale {

PairwiseDistances::PairwiseDistances(const DataMatrix& data, double p)
    : n_(data.n_entities()), p_(p), d_(n_ * (n_ - 1) / 2) {
    validate_exponent(p);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        const auto yi = data.row(i);
        for (std::size_t j = i + 1; j < n_; ++j) d_[idx++] = minkowski_p(yi, data.row(j), p);
    }
}

double PairwiseDistances::operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    return d_[offset(i) + (j - i - 1)];
}

namespace {

std::vector<std::size_t> checked_sizes(std::size_t n, std::span<const std::size_t> assignments, std::size_t k,
                                       const char* what) {
    if (k < 2) throw usage_error(std::string(what) + " needs at least 2 clusters");
    if (assignments.size() != n) throw usage_error(std::string(what) + ": assignment count does not match entity count");
    std::vector<std::size_t> sizes(k, 0);
    for (const std::size_t a : assignments) {
        if (a >= k) throw usage_error(std::string(what) + ": cluster id out of range");
        ++sizes[a];
    }
    for (std::size_t c = 0; c < k; ++c)
        if (sizes[c] == 0) throw usage_error(std::string(what) + ": cluster " + std::to_string(c) + " is empty");
    return sizes;
}

}  // namespace

std::vector<double> silhouette_values(const PairwiseDistances& dist, std::span<const std::size_t> assignments,
                                      std::size_t k) {
    const std::size_t n = dist.size();
    const auto sizes = checked_sizes(n, assignments, k, "silhouette");
    std::vector<double> s(n, 0.0);
    std::vector<double> sums(k);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = assignments[i];
        if (sizes[own] == 1) continue;  // singleton: neutral score
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) sums[assignments[j]] += dist(i, j);
        const double a = sums[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c)
            if (c != own) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
        const double denom = std::max(a, b);
        s[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return s;
}

double silhouette(const PairwiseDistances& dist, std::span<const std::size_t> assignments, std::size_t k) {
    const auto s = silhouette_values(dist, assignments, k);
    double total = 0.0;
    for (const double x : s) total += x;
    return total / static_cast<double>(s.size());
}

double silhouette(const DataMatrix& data, std::span<const std::size_t> assignments, std::size_t k, double p) {
    return silhouette(PairwiseDistances(data, p), assignments, k);
}

double dunn(const PairwiseDistances& dist, std::span<const std::size_t> assignments, std::size_t k) {
    const std::size_t n = dist.size();
    checked_sizes(n, assignments, k, "dunn");
    double separation = std::numeric_limits<double>::infinity();
    double diameter = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = dist(i, j);
            if (assignments[i] == assignments[j]) diameter = std::max(diameter, d);
            else separation = std::min(separation, d);
        }
    }
    if (diameter == 0.0) throw numerical_error("dunn: every cluster has zero diameter");
    return separation / diameter;
}

double dunn(const DataMatrix& data, std::span<const std::size_t> assignments, std::size_t k, double p) {
    return dunn(PairwiseDistances(data, p), assignments, k);
}

double total_scatter(const DataMatrix& data) {
    const std::size_t n = data.n_entities();
    double t = 0.0;
    for (std::size_t v = 0; v < data.n_features(); ++v) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += data(i, v);
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = data(i, v) - mean;
            t += d * d;
        }
    }
    return t;
}

double calinski_harabasz(double total, double wk, std::size_t n, std::size_t k) {
    if (k < 2 || k + 1 > n) throw usage_error("calinski_harabasz needs 2 <= K <= N - 1");
    if (!(wk > 0.0)) throw numerical_error("calinski_harabasz: within-cluster scatter is zero");
    return ((total - wk) / static_cast<double>(k - 1)) / (wk / static_cast<double>(n - k));
}

double calinski_harabasz(const DataMatrix& data, std::span<const std::size_t> assignments, std::size_t k) {
    return calinski_harabasz(total_scatter(data), euclidean_wk(data, assignments, k), data.n_entities(), k);
}

double hartigan_statistic(double wk, double wk_next, std::size_t n, std::size_t k) {
    return (wk / wk_next - 1.0) * (static_cast<double>(n) - static_cast<double>(k) - 1.0);
}

KSelectionReport hartigan_select(const std::map<std::size_t, double>& wk_trace, std::size_t n, KRange range) {
    if (range.size() == 0) throw usage_error("hartigan_select: empty K range");
    for (std::size_t k = range.min; k <= range.max + 1; ++k) {
        if (!wk_trace.contains(k)) {
            throw numerical_error("hartigan_select: W_K trace lacks K = " + std::to_string(k) +
                                  " (needs " + std::to_string(range.min) + ".." + std::to_string(range.max + 1) + ")");
        }
    }
    KSelectionReport report;
    report.index_name = "hartigan";
    report.rule = SelectionRule::hartigan_threshold;
    for (std::size_t k = range.min; k <= range.max; ++k)
        report.per_k_values[k] = hartigan_statistic(wk_trace.at(k), wk_trace.at(k + 1), n, k);

    for (const auto& [k, hk] : report.per_k_values) {
        if (hk <= 10.0) {
            report.selected_k = k;
            return report;
        }
    }
    report.selected_k = range.min;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = range.min; k < range.max; ++k) {
        const double diff = std::fabs(report.per_k_values.at(k) - report.per_k_values.at(k + 1));
        if (diff < best) {
            best = diff;
            report.selected_k = k;
        }
    }
    return report;
}

KSelectionReport select_k(const std::map<std::size_t, double>& values, std::string index_name) {
    if (values.empty()) throw usage_error("select_k: no evaluated K");
    KSelectionReport report;
    report.index_name = std::move(index_name);
    report.rule = SelectionRule::maximize;
    report.per_k_values = values;
    bool found = false;
    double best = 0.0;
    for (const auto& [k, value] : values) {
        if (std::isnan(value)) continue;
        if (!found || value > best) {
            best = value;
            report.selected_k = k;
            found = true;
        }
    }
    if (!found) throw numerical_error("select_k: every index value is NaN");
    return report;
}

std::string_view index_name(CviIndex index) {
    switch (index) {
        case CviIndex::sil_eucl: return "sil_eucl";
        case CviIndex::sil_manh: return "sil_manh";
        case CviIndex::sil_mink: return "sil_mink";
        case CviIndex::dunn_eucl: return "dunn_eucl";
        case CviIndex::dunn_mink: return "dunn_mink";
        case CviIndex::ch: return "ch";
        case CviIndex::hartigan: return "hartigan";
    }
    return "?";
}

CviIndex parse_index(std::string_view name) {
    for (const CviIndex idx : all_indexes)
        if (index_name(idx) == name) return idx;
    throw usage_error("unknown index '" + std::string(name) + "'");
}

std::optional<double> index_exponent(CviIndex index, double method_p) {
    switch (index) {
        case CviIndex::sil_eucl:
        case CviIndex::dunn_eucl: return 2.0;
        case CviIndex::sil_manh: return 1.0;
        case CviIndex::sil_mink:
        case CviIndex::dunn_mink: return method_p;
        case CviIndex::ch:
        case CviIndex::hartigan: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace kscale
