#pragma once

// Shared assignment / center / weight alternation used by mwk_means and by
// anomalous-pattern extraction. Operates on a subset of the data rows.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kscale/centers.hpp"
#include "kscale/dataset.hpp"
#include "kscale/grid.hpp"

namespace kscale::detail {

struct AlternationOptions {
    double p = 2.0;
    bool weighted = true;        // weighted_minkowski_p assignment and weight updates
    bool update_weights = true;  // false freezes the initial weights
    bool offset = true;          // add the mean dispersion before the weight update
    bool reseed_empty = true;
    std::optional<std::size_t> fixed_cluster;  // this centroid never moves
    CenterSolverConfig centers;
};

struct AlternationResult {
    std::vector<std::size_t> assignments;  // parallel to the `rows` subset
    Grid centroids;
    Grid weights;
    double criterion = 0.0;
    std::size_t iterations = 0;
    std::vector<double> trace;
};

AlternationResult alternate(const DataMatrix& data, std::span<const std::size_t> rows, Grid centroids, Grid weights,
                            const AlternationOptions& opt);

// Raw (offset-free) dispersions over a row subset.
Grid raw_dispersions(const DataMatrix& data, std::span<const std::size_t> rows,
                     std::span<const std::size_t> assignments, const Grid& centroids, double p);

}  // namespace kscale::detail
