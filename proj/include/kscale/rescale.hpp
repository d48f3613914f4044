#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "kscale/anomalous.hpp"
#include "kscale/dataset.hpp"
#include "kscale/grid.hpp"
#include "kscale/mwk.hpp"
#include "kscale/partition.hpp"

namespace kscale {

/// Data and centroids multiplied by the feature weights of each entity's
/// cluster: y_iv * w_{k(i)v} and c_kv * w_kv.
struct RescaledView {
    DataMatrix data_w;
    Grid centroids_w;
    Clustering source;
};

RescaledView rescale_view(const DataMatrix& data, const Clustering& clustering);

/// iMWK-Means clusterings for every K of a range, sharing one extraction.
struct ImwkSeries {
    double p = 2.0;
    KRange range;
    AnomalousInit init;
    std::vector<Clustering> runs;  ///< runs[i] has k = range.min + i

    const Clustering& at(std::size_t k) const;
};

/// Extraction (theta = 1, weighted) followed by imwk_means for each K in
/// `range`. `range.max` must not exceed the number of anomalous clusters.
ImwkSeries imwk_series(const DataMatrix& data, const AnomalousInit& init, KRange range, const MwkConfig& cfg);
ImwkSeries imwk_series(const DataMatrix& data, KRange range, const MwkConfig& cfg);

/// One candidate K of a pipeline: the clustering the indexes score and the
/// data they score it on. `euclidean_wk` is the squared-Euclidean criterion
/// of the assignments about their means in `cvi_data`; CH and Hartigan use it.
struct PipelineEntry {
    std::size_t k;
    Clustering clustering;
    std::shared_ptr<const DataMatrix> cvi_data;  ///< shared across K when it does not vary
    double euclidean_wk;
};

/// Plain iMWK-Means: indexes see the standardized data.
std::vector<PipelineEntry> pipeline_imwk(const DataMatrix& data, const ImwkSeries& series);
std::vector<PipelineEntry> pipeline_imwk(const DataMatrix& data, KRange range, const MwkConfig& cfg);

/// iMWK-Means with explicit re-scaling: same assignments, indexes see Y_w.
std::vector<PipelineEntry> pipeline_imwk_rescaled(const DataMatrix& data, const ImwkSeries& series);
std::vector<PipelineEntry> pipeline_imwk_rescaled(const DataMatrix& data, KRange range, const MwkConfig& cfg);

/// Re-scaling followed by K-Means: squared-Euclidean multistart K-Means on
/// Y_w, with one extra start from the iMWK partition's means on Y_w.
std::vector<PipelineEntry> pipeline_rescale_kmeans(const DataMatrix& data, const ImwkSeries& series,
                                                   const RestartPolicy& policy,
                                                   const CenterSolverConfig& centers = {});
std::vector<PipelineEntry> pipeline_rescale_kmeans(const DataMatrix& data, KRange range, const MwkConfig& cfg,
                                                   const RestartPolicy& policy);

}  // namespace kscale
