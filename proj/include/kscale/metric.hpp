#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "kscale/grid.hpp"

namespace kscale {

/// Exponent and weighting options shared by the Minkowski clusterers.
struct MinkowskiConfig {
    /// Value substituted when p -> 1 is requested for a weighted method.
    static constexpr double p_near_one = 1.00001;

    double p = 2.0;
    bool dispersion_offset_enabled = true;
};

/// Throws a usage error unless p is finite and >= 1.
void validate_exponent(double p);

/// Maps a requested exponent onto one the weighted algorithms accept:
/// p == 1 becomes MinkowskiConfig::p_near_one.
double weighted_exponent(double p);

/// |x|^p with fast paths for p = 1 and p = 2.
inline double abs_pow(double x, double p);

/// Sum over features of |a_v - b_v|^p. No p-th root.
double minkowski_p(std::span<const double> a, std::span<const double> b, double p);

/// Sum over features of w_v^p |a_v - b_v|^p.
double weighted_minkowski_p(std::span<const double> a, std::span<const double> b,
                            std::span<const double> w, double p);

/// weighted_minkowski_p with w_v^p precomputed by the caller. No length checks.
double weighted_minkowski_pow(std::span<const double> a, std::span<const double> b,
                              std::span<const double> w_pow, double p);

/// K x V per-cluster feature weights, each row on the unit simplex.
class WeightMatrix {
public:
    WeightMatrix() = default;
    explicit WeightMatrix(Grid weights);

    static WeightMatrix uniform(std::size_t k, std::size_t v);

    std::size_t k() const noexcept { return grid_.rows(); }
    std::size_t n_features() const noexcept { return grid_.cols(); }
    std::span<const double> row(std::size_t k) const { return grid_.row(k); }
    double operator()(std::size_t k, std::size_t v) const { return grid_(k, v); }
    const Grid& grid() const noexcept { return grid_; }

    friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;

private:
    Grid grid_;
};

inline double abs_pow(double x, double p) {
    const double a = x < 0 ? -x : x;
    if (p == 2.0) return a * a;
    if (p == 1.0) return a;
    if (a == 0.0) return 0.0;
    return std::pow(a, p);
}

}  // namespace kscale
