#include "kscale/anomalous.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "alternation.hpp"
#include "kscale/error.hpp"

namespace kscale {

Grid AnomalousInit::centroid_grid() const {
    if (centroids.empty()) return {};
    Grid g(centroids.size(), centroids.front().size());
    for (std::size_t c = 0; c < centroids.size(); ++c) std::copy(centroids[c].begin(), centroids[c].end(), g.row(c).begin());
    return g;
}

WeightMatrix AnomalousInit::weight_matrix() const {
    if (weights.empty()) return {};
    Grid g(weights.size(), weights.front().size());
    for (std::size_t c = 0; c < weights.size(); ++c) std::copy(weights[c].begin(), weights[c].end(), g.row(c).begin());
    return WeightMatrix(std::move(g));
}

AnomalousInit extract_anomalous(const DataMatrix& data_in, double p, std::size_t theta, bool weighted,
                                const MwkConfig& cfg) {
    validate_exponent(p);
    if (weighted && !(p > 1.0)) throw usage_error("weighted extraction needs p > 1; use p = 1.00001 for p -> 1");
    const DataMatrix data = ensure_standardized(data_in);
    const std::size_t nv = data.n_features();
    const std::vector<double> uniform(nv, 1.0 / static_cast<double>(nv));

    detail::AlternationOptions opt;
    opt.p = p;
    opt.weighted = weighted;
    opt.update_weights = weighted;
    opt.offset = cfg.minkowski.dispersion_offset_enabled;
    opt.reseed_empty = false;
    opt.fixed_cluster = 1;  // the grand center
    opt.centers = cfg.centers;

    AnomalousInit out;
    std::vector<std::size_t> remaining(data.n_entities());
    std::iota(remaining.begin(), remaining.end(), 0);

    auto record = [&](std::size_t size, std::span<const double> centroid, std::span<const double> w) {
        out.extraction_sizes.push_back(size);
        if (size < theta) return;
        out.centroids.emplace_back(centroid.begin(), centroid.end());
        out.weights.emplace_back(w.begin(), w.end());
        out.cluster_sizes.push_back(size);
    };

    while (!remaining.empty()) {
        if (remaining.size() == 1) {
            record(1, data.row(remaining.front()), uniform);
            break;
        }
        const auto grand = cluster_centroid(data, remaining, p, cfg.centers);

        // Uniform weights rescale every distance by the same factor, so the
        // unweighted distance picks the same farthest entity.
        std::size_t far = remaining.front();
        double far_d = -1.0;
        for (const std::size_t i : remaining) {
            const double d = minkowski_p(data.row(i), grand, p);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }

        Grid centroids(2, nv);
        std::copy(data.row(far).begin(), data.row(far).end(), centroids.row(0).begin());
        std::copy(grand.begin(), grand.end(), centroids.row(1).begin());
        auto res = detail::alternate(data, remaining, std::move(centroids), Grid(2, nv, 1.0 / static_cast<double>(nv)), opt);

        std::vector<std::size_t> anomalous, rest;
        for (std::size_t r = 0; r < remaining.size(); ++r)
            (res.assignments[r] == 0 ? anomalous : rest).push_back(remaining[r]);

        if (anomalous.empty()) {
            // The anomalous centroid lost every member; fall back to its seed entity.
            record(1, data.row(far), uniform);
            std::erase(remaining, far);
            continue;
        }
        record(anomalous.size(), res.centroids.row(0), weighted ? res.weights.row(0) : std::span<const double>(uniform));
        remaining = std::move(rest);
    }
    return out;
}

std::size_t k_search_cap(const AnomalousInit& init, std::size_t hard_cap) {
    if (hard_cap < 2) throw usage_error("K search cap must be at least 2");
    if (init.size() < 2) {
        throw numerical_error("anomalous-pattern extraction found " + std::to_string(init.size()) +
                              " cluster(s); at least 2 are needed to search K");
    }
    return std::min(init.size(), hard_cap);
}

AnomalousInit truncate_to_k(const AnomalousInit& init, std::size_t k) {
    if (k > init.size()) {
        throw data_error("cannot keep " + std::to_string(k) + " of " + std::to_string(init.size()) +
                         " anomalous clusters");
    }
    std::vector<std::size_t> order(init.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return init.cluster_sizes[a] > init.cluster_sizes[b]; });
    order.resize(k);
    std::sort(order.begin(), order.end());

    AnomalousInit out;
    out.extraction_sizes = init.extraction_sizes;
    for (const std::size_t idx : order) {
        out.centroids.push_back(init.centroids[idx]);
        out.weights.push_back(init.weights[idx]);
        out.cluster_sizes.push_back(init.cluster_sizes[idx]);
    }
    return out;
}

Clustering imwk_means(const DataMatrix& data, const AnomalousInit& init, std::size_t k, const MwkConfig& cfg) {
    if (init.size() < k) {
        throw data_error("iMWK-Means: only " + std::to_string(init.size()) + " anomalous clusters for k = " +
                         std::to_string(k));
    }
    const AnomalousInit kept = truncate_to_k(init, k);
    return mwk_means(data, k, kept.centroid_grid(), kept.weight_matrix(), cfg);
}

Clustering imwk_means(const DataMatrix& data_in, std::size_t k, const MwkConfig& cfg) {
    const DataMatrix data = ensure_standardized(data_in);
    const AnomalousInit init = extract_anomalous(data, cfg.minkowski.p, 1, true, cfg);
    return imwk_means(data, init, k, cfg);
}

}  // namespace kscale
