#include "kscale/evaluate.hpp"

#include <cmath>
#include <cstdlib>

namespace kscale {

namespace detail {

namespace {
double pairs(double x) { return x * (x - 1.0) / 2.0; }
}  // namespace

double adjusted_rand_dense(std::span<const std::size_t> a, std::size_t ka, std::span<const std::size_t> b,
                           std::size_t kb) {
    const std::size_t n = a.size();
    if (n < 2) return 1.0;
    std::vector<double> table(ka * kb, 0.0), rows(ka, 0.0), cols(kb, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        table[a[i] * kb + b[i]] += 1.0;
        rows[a[i]] += 1.0;
        cols[b[i]] += 1.0;
    }
    double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (const double x : table) sum_cells += pairs(x);
    for (const double x : rows) sum_rows += pairs(x);
    for (const double x : cols) sum_cols += pairs(x);
    const double expected = sum_rows * sum_cols / pairs(static_cast<double>(n));
    const double max_index = 0.5 * (sum_rows + sum_cols);
    const double denom = max_index - expected;
    if (denom == 0.0) {
        // Both partitions trivial (one block each, or all singletons).
        return sum_cells == max_index ? 1.0 : 0.0;
    }
    return (sum_cells - expected) / denom;
}

}  // namespace detail

double relative_error(std::size_t true_k, std::size_t estimated_k) {
    const double diff = std::fabs(static_cast<double>(true_k) - static_cast<double>(estimated_k));
    return diff / static_cast<double>(true_k);
}

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (const double x : values) sum += x;
    return sum / static_cast<double>(values.size());
}

double standard_error(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (const double x : values) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

}  // namespace kscale
