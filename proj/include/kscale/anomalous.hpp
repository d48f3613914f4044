#pragma once

#include <cstddef>
#include <vector>

#include "kscale/dataset.hpp"
#include "kscale/grid.hpp"
#include "kscale/metric.hpp"
#include "kscale/mwk.hpp"
#include "kscale/partition.hpp"

namespace kscale {

/// Anomalous clusters accepted during extraction, in extraction order.
struct AnomalousInit {
    std::vector<std::vector<double>> centroids;
    std::vector<std::vector<double>> weights;  ///< uniform rows in unweighted mode
    std::vector<std::size_t> cluster_sizes;
    /// Sizes of every extracted cluster, including those below theta.
    std::vector<std::size_t> extraction_sizes;

    std::size_t size() const noexcept { return centroids.size(); }
    Grid centroid_grid() const;
    WeightMatrix weight_matrix() const;
};

/// Peels anomalous patterns off the data one at a time.
///
/// Each round takes the Minkowski center c_c of the remaining entities and
/// the entity c_t farthest from it, then runs a two-cluster alternation in
/// which c_c never moves. The cluster gathered around c_t is removed from the
/// pool and recorded when it has at least `theta` members. With `weighted`
/// the alternation is Minkowski Weighted K-Means started from uniform
/// weights; otherwise it is plain Minkowski K-Means.
AnomalousInit extract_anomalous(const DataMatrix& data, double p, std::size_t theta, bool weighted,
                                const MwkConfig& cfg = {});

/// min(|C_init|, hard_cap). Fails when fewer than two clusters were found.
std::size_t k_search_cap(const AnomalousInit& init, std::size_t hard_cap);

/// Keeps the k largest anomalous clusters; equal sizes keep the earlier one.
/// Surviving entries stay in extraction order.
AnomalousInit truncate_to_k(const AnomalousInit& init, std::size_t k);

/// Runs mwk_means from the k largest anomalous clusters of `init`.
Clustering imwk_means(const DataMatrix& data, const AnomalousInit& init, std::size_t k, const MwkConfig& cfg);

/// Extraction with theta = 1 in weighted mode, then the run above.
Clustering imwk_means(const DataMatrix& data, std::size_t k, const MwkConfig& cfg);

}  // namespace kscale
