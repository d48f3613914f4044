#include "kscale/rescale.hpp"

#include <string>

#include "kscale/error.hpp"
#include "kscale/seed.hpp"

namespace kscale {

RescaledView rescale_view(const DataMatrix& data, const Clustering& clustering) {
    if (!clustering.weights) throw usage_error("rescale_view: clustering carries no feature weights");
    const WeightMatrix& w = *clustering.weights;
    const std::size_t n = data.n_entities();
    const std::size_t nv = data.n_features();
    if (clustering.assignments.size() != n || w.n_features() != nv || clustering.centroids.cols() != nv ||
        w.k() != clustering.centroids.rows())
        throw usage_error("rescale_view: clustering shape does not match the data");

    std::vector<double> values(n * nv);
    for (std::size_t i = 0; i < n; ++i) {
        const auto wr = w.row(clustering.assignments[i]);
        for (std::size_t v = 0; v < nv; ++v) values[i * nv + v] = data(i, v) * wr[v];
    }
    Grid cw(clustering.centroids.rows(), nv);
    for (std::size_t c = 0; c < cw.rows(); ++c)
        for (std::size_t v = 0; v < nv; ++v) cw(c, v) = clustering.centroids(c, v) * w(c, v);
    return {DataMatrix(n, nv, std::move(values), data.standardized()), std::move(cw), clustering};
}

const Clustering& ImwkSeries::at(std::size_t k) const {
    if (!range.contains(k) || k - range.min >= runs.size()) throw usage_error("no iMWK run for k = " + std::to_string(k));
    return runs[k - range.min];
}

ImwkSeries imwk_series(const DataMatrix& data_in, const AnomalousInit& init, KRange range, const MwkConfig& cfg) {
    if (range.min < 1 || range.max < range.min) throw usage_error("empty K range");
    if (range.max > init.size()) {
        throw data_error("K range reaches " + std::to_string(range.max) + " but only " + std::to_string(init.size()) +
                         " anomalous clusters were found");
    }
    const DataMatrix data = ensure_standardized(data_in);
    ImwkSeries out{cfg.minkowski.p, range, init, {}};
    for (std::size_t k = range.min; k <= range.max; ++k) out.runs.push_back(imwk_means(data, init, k, cfg));
    return out;
}

ImwkSeries imwk_series(const DataMatrix& data_in, KRange range, const MwkConfig& cfg) {
    const DataMatrix data = ensure_standardized(data_in);
    return imwk_series(data, extract_anomalous(data, cfg.minkowski.p, 1, true, cfg), range, cfg);
}

std::vector<PipelineEntry> pipeline_imwk(const DataMatrix& data_in, const ImwkSeries& series) {
    const auto data = std::make_shared<const DataMatrix>(ensure_standardized(data_in));
    std::vector<PipelineEntry> out;
    for (const Clustering& c : series.runs) out.push_back({c.k, c, data, euclidean_wk(*data, c)});
    return out;
}

std::vector<PipelineEntry> pipeline_imwk(const DataMatrix& data, KRange range, const MwkConfig& cfg) {
    return pipeline_imwk(data, imwk_series(data, range, cfg));
}

std::vector<PipelineEntry> pipeline_imwk_rescaled(const DataMatrix& data_in, const ImwkSeries& series) {
    const DataMatrix data = ensure_standardized(data_in);
    std::vector<PipelineEntry> out;
    for (const Clustering& c : series.runs) {
        auto view = std::make_shared<const DataMatrix>(rescale_view(data, c).data_w);
        out.push_back({c.k, c, view, euclidean_wk(*view, c)});
    }
    return out;
}

std::vector<PipelineEntry> pipeline_imwk_rescaled(const DataMatrix& data, KRange range, const MwkConfig& cfg) {
    return pipeline_imwk_rescaled(data, imwk_series(data, range, cfg));
}

std::vector<PipelineEntry> pipeline_rescale_kmeans(const DataMatrix& data_in, const ImwkSeries& series,
                                                   const RestartPolicy& policy, const CenterSolverConfig& centers) {
    const DataMatrix data = ensure_standardized(data_in);
    std::vector<PipelineEntry> out;
    for (const Clustering& c : series.runs) {
        auto view = std::make_shared<const DataMatrix>(rescale_view(data, c).data_w);
        const Grid incumbent = cluster_means(*view, c.assignments, c.k);
        const RestartPolicy per_k{policy.n_restarts, derive_seed(policy.rng_seed, {c.k})};
        Clustering km = kmeans_multistart(*view, c.k, 2.0, per_k, centers, std::span<const Grid>(&incumbent, 1));
        const double wk = euclidean_wk(*view, km);
        out.push_back({c.k, std::move(km), view, wk});
    }
    return out;
}

std::vector<PipelineEntry> pipeline_rescale_kmeans(const DataMatrix& data, KRange range, const MwkConfig& cfg,
                                                   const RestartPolicy& policy) {
    return pipeline_rescale_kmeans(data, imwk_series(data, range, cfg), policy, cfg.centers);
}

}  // namespace kscale
