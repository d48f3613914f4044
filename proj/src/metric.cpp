#include "kscale/metric.hpp"

#include <cmath>
#include <string>

#include "kscale/error.hpp"

namespace kscale {

void validate_exponent(double p) {
    if (!std::isfinite(p) || p < 1.0) throw usage_error("Minkowski exponent must be >= 1, got " + std::to_string(p));
}

double weighted_exponent(double p) {
    validate_exponent(p);
    return p == 1.0 ? MinkowskiConfig::p_near_one : p;
}

namespace {
void check_lengths(std::size_t a, std::size_t b) {
    if (a != b) throw usage_error("feature vectors differ in length (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
}
}  // namespace

double minkowski_p(std::span<const double> a, std::span<const double> b, double p) {
    check_lengths(a.size(), b.size());
    double sum = 0.0;
    if (p == 2.0) {
        for (std::size_t v = 0; v < a.size(); ++v) {
            const double d = a[v] - b[v];
            sum += d * d;
        }
    } else if (p == 1.0) {
        for (std::size_t v = 0; v < a.size(); ++v) sum += std::fabs(a[v] - b[v]);
    } else {
        for (std::size_t v = 0; v < a.size(); ++v) sum += abs_pow(a[v] - b[v], p);
    }
    return sum;
}

double weighted_minkowski_p(std::span<const double> a, std::span<const double> b, std::span<const double> w,
                            double p) {
    check_lengths(a.size(), b.size());
    check_lengths(a.size(), w.size());
    double sum = 0.0;
    for (std::size_t v = 0; v < a.size(); ++v) {
        if (w[v] == 0.0) continue;
        sum += abs_pow(w[v], p) * abs_pow(a[v] - b[v], p);
    }
    return sum;
}

double weighted_minkowski_pow(std::span<const double> a, std::span<const double> b, std::span<const double> w_pow,
                              double p) {
    double sum = 0.0;
    for (std::size_t v = 0; v < a.size(); ++v) {
        if (w_pow[v] == 0.0) continue;
        sum += w_pow[v] * abs_pow(a[v] - b[v], p);
    }
    return sum;
}

WeightMatrix::WeightMatrix(Grid weights) : grid_(std::move(weights)) {
    for (std::size_t k = 0; k < grid_.rows(); ++k) {
        double sum = 0.0;
        for (const double w : grid_.row(k)) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw numerical_error("weight matrix has a negative or non-finite entry");
            sum += w;
        }
        if (std::fabs(sum - 1.0) > 1e-9) {
            throw numerical_error("weight row " + std::to_string(k) + " sums to " + std::to_string(sum));
        }
    }
}

WeightMatrix WeightMatrix::uniform(std::size_t k, std::size_t v) {
    return WeightMatrix(Grid(k, v, 1.0 / static_cast<double>(v)));
}

}  // namespace kscale
