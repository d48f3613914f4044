#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kscale/dataset.hpp"

namespace kscale {

enum class CenterMethod {
    bracketing,  ///< safeguarded Newton inside a shrinking [lo, hi] bracket
    fixed_step,  ///< walk from the mean in steps of `descent_step` while gamma drops
};

struct CenterSolverConfig {
    double abs_tolerance = 1e-6;
    double descent_step = 0.001;
    std::size_t max_iterations = 10000;
    CenterMethod method = CenterMethod::bracketing;
};

/// gamma(mu) = sum_i |y_i - mu|^p.
double center_objective(std::span<const double> values, double mu, double p);

/// Minimizer of sum_i |y_i - mu|^p over mu, for p >= 1.
///
/// p = 2 returns the mean and p = 1 the median (the mean of the two central
/// order statistics for even counts). Other exponents are solved on
/// [min, max], where the objective is convex; `hint` seeds the first Newton
/// step when it lies inside that interval.
double minkowski_center(std::span<const double> values, double p, const CenterSolverConfig& cfg = {},
                        std::optional<double> hint = std::nullopt);

/// Per-feature Minkowski center of the member rows.
std::vector<double> cluster_centroid(const DataMatrix& data, std::span<const std::size_t> members, double p,
                                     const CenterSolverConfig& cfg = {},
                                     std::span<const double> hint = {});

}  // namespace kscale
