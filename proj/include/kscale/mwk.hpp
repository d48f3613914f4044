#pragma once

#include <cstddef>

#include "kscale/centers.hpp"
#include "kscale/dataset.hpp"
#include "kscale/grid.hpp"
#include "kscale/metric.hpp"
#include "kscale/partition.hpp"

namespace kscale {

/// Within-cluster dispersions D_kv = sum_{i in S_k} |y_iv - c_kv|^p, with the
/// offset already added to every entry.
struct DispersionTable {
    Grid dispersions;
    double offset = 0.0;
};

DispersionTable dispersions(const DataMatrix& data, std::span<const std::size_t> assignments,
                            const Grid& centroids, double p, bool offset_enabled);

DispersionTable dispersions(const DataMatrix& data, const Clustering& clustering, double p, bool offset_enabled);

/// w_kv = 1 / sum_u (D_kv / D_ku)^(1/(p-1)). Requires p > 1 and strictly
/// positive dispersions.
WeightMatrix update_weights(const DispersionTable& disp, double p);

struct MwkConfig {
    MinkowskiConfig minkowski;
    CenterSolverConfig centers;
    /// Skip the weight update; the initial weights stay in force.
    bool freeze_weights = false;
};

/// Minkowski Weighted K-Means from the given centroids and weights.
///
/// Each pass assigns entities under weighted_minkowski_p, stops if nothing
/// moved, then recomputes Minkowski centers and weights. Unweighted input
/// (raw data) is standardized first.
Clustering mwk_means(const DataMatrix& data, std::size_t k, const Grid& init_centroids,
                     const WeightMatrix& init_weights, const MwkConfig& cfg);

/// Same, starting from uniform weights 1/V.
Clustering mwk_means(const DataMatrix& data, std::size_t k, const Grid& init_centroids, const MwkConfig& cfg);

}  // namespace kscale
