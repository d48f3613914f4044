#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kscale/centers.hpp"
#include "kscale/dataset.hpp"
#include "kscale/grid.hpp"
#include "kscale/metric.hpp"

namespace kscale {

/// Result of a partitional clustering run.
struct Clustering {
    std::vector<std::size_t> assignments;  ///< cluster id per entity, in [0, k)
    Grid centroids;                        ///< k x V
    std::optional<WeightMatrix> weights;   ///< present for feature-weighted runs
    double criterion = 0.0;
    std::size_t k = 0;
    std::size_t iterations = 0;
    /// Criterion after every sub-step (assignment, center update, weight
    /// update). Monotonicity checks read this.
    std::vector<double> trace;
};

/// Inclusive range of candidate cluster counts.
struct KRange {
    std::size_t min = 2;
    std::size_t max = 20;

    std::size_t size() const noexcept { return max >= min ? max - min + 1 : 0; }
    bool contains(std::size_t k) const noexcept { return k >= min && k <= max; }
};

struct RestartPolicy {
    std::size_t n_restarts = 100;
    std::uint64_t rng_seed = 0;
};

/// Upper bound on alternating-minimization passes before giving up.
inline constexpr std::size_t max_partition_iterations = 1000;

/// Lloyd-style alternation under minkowski_p: nearest-centroid assignment
/// (ties to the lowest index), then per-feature Minkowski centers, until the
/// assignment vector stops changing. A cluster that empties is re-seeded
/// with the entity farthest from its own centroid.
Clustering kmeans(const DataMatrix& data, std::size_t k, double p, const Grid& init,
                  const CenterSolverConfig& cfg = {});

/// Best of `policy.n_restarts` kmeans runs from random entity seeds plus any
/// `extra_starts`. Ties keep the earliest run (random restarts first).
Clustering kmeans_multistart(const DataMatrix& data, std::size_t k, double p, const RestartPolicy& policy,
                             const CenterSolverConfig& cfg = {}, std::span<const Grid> extra_starts = {});

/// RNG seed of restart `index` under master `seed`.
std::uint64_t restart_seed(std::uint64_t seed, std::size_t index);

/// k distinct entities sampled without replacement.
Grid random_initial_centroids(const DataMatrix& data, std::size_t k, std::uint64_t seed);

/// Sum of distances from entities to their centroids; weighted Minkowski
/// when the clustering carries weights.
double criterion(const DataMatrix& data, const Clustering& clustering, double p);

double criterion(const DataMatrix& data, std::span<const std::size_t> assignments, const Grid& centroids,
                 const WeightMatrix* weights, double p);

/// Squared-Euclidean criterion about the per-cluster means of `data`,
/// ignoring whatever centroids the clusterer produced.
double euclidean_wk(const DataMatrix& data, std::span<const std::size_t> assignments, std::size_t k);

double euclidean_wk(const DataMatrix& data, const Clustering& clustering);

/// Per-cluster means of `data`; clusters without members get a zero row.
Grid cluster_means(const DataMatrix& data, std::span<const std::size_t> assignments, std::size_t k);

/// Members of each cluster, in entity order.
std::vector<std::vector<std::size_t>> cluster_members(std::span<const std::size_t> assignments, std::size_t k);

}  // namespace kscale
