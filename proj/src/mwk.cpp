#include "kscale/mwk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "alternation.hpp"
#include "kscale/error.hpp"

namespace kscale {

namespace detail {

Grid raw_dispersions(const DataMatrix& data, std::span<const std::size_t> rows, std::span<const std::size_t> assignments,
                     const Grid& centroids, double p) {
    const std::size_t nv = data.n_features();
    Grid d(centroids.rows(), nv);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto y = data.row(rows[r]);
        const std::size_t c = assignments[r];
        const auto mu = centroids.row(c);
        for (std::size_t v = 0; v < nv; ++v) d(c, v) += abs_pow(y[v] - mu[v], p);
    }
    return d;
}

namespace {

double weighted_total(const DataMatrix& data, std::span<const std::size_t> rows,
                      std::span<const std::size_t> assign, const Grid& centroids, const Grid& w_pow, double p) {
    double total = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t c = assign[r];
        total += weighted_minkowski_pow(data.row(rows[r]), centroids.row(c), w_pow.row(c), p);
    }
    return total;
}

Grid powered(const Grid& w, double p, bool weighted) {
    Grid out(w.rows(), w.cols(), 1.0);
    if (!weighted) return out;
    for (std::size_t c = 0; c < w.rows(); ++c)
        for (std::size_t v = 0; v < w.cols(); ++v) out(c, v) = abs_pow(w(c, v), p);
    return out;
}

}  // namespace

AlternationResult alternate(const DataMatrix& data, std::span<const std::size_t> rows, Grid centroids, Grid weights,
                            const AlternationOptions& opt) {
    const std::size_t n = rows.size();
    const std::size_t k = centroids.rows();
    const double p = opt.p;

    AlternationResult out;
    out.centroids = std::move(centroids);
    out.weights = std::move(weights);
    Grid w_pow = powered(out.weights, p, opt.weighted);

    std::vector<std::size_t> assign(n, 0);
    std::vector<double> own(n, 0.0);
    std::vector<double> column;

    for (std::size_t iter = 0; iter < max_partition_iterations; ++iter) {
        std::vector<std::size_t> next(n);
        for (std::size_t r = 0; r < n; ++r) {
            const auto y = data.row(rows[r]);
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = weighted_minkowski_pow(y, out.centroids.row(c), w_pow.row(c), p);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            next[r] = best;
            own[r] = best_d;
        }
        if (opt.reseed_empty) {
            std::vector<std::size_t> sizes(k, 0);
            for (const std::size_t a : next) ++sizes[a];
            for (std::size_t e = 0; e < k; ++e) {
                if (sizes[e] != 0) continue;
                std::size_t far = n;
                double far_d = -1.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (sizes[next[r]] > 1 && own[r] > far_d) {
                        far_d = own[r];
                        far = r;
                    }
                }
                if (far == n) throw numerical_error("cannot re-seed an empty cluster: too few entities");
                --sizes[next[far]];
                next[far] = e;
                ++sizes[e];
                own[far] = 0.0;
                const auto y = data.row(rows[far]);
                std::copy(y.begin(), y.end(), out.centroids.row(e).begin());
            }
        }
        out.trace.push_back(std::accumulate(own.begin(), own.end(), 0.0));
        out.iterations = iter + 1;

        if (iter > 0 && next == assign) {
            out.assignments = std::move(assign);
            out.criterion = out.trace.back();
            return out;
        }
        assign = std::move(next);

        // Minkowski centers; a feature's weight scales its term but not the minimizer.
        std::vector<std::vector<std::size_t>> members(k);
        for (std::size_t r = 0; r < n; ++r) members[assign[r]].push_back(rows[r]);
        for (std::size_t c = 0; c < k; ++c) {
            if (opt.fixed_cluster && *opt.fixed_cluster == c) continue;
            if (members[c].empty()) continue;
            auto centroid = cluster_centroid(data, members[c], p, opt.centers, out.centroids.row(c));
            std::copy(centroid.begin(), centroid.end(), out.centroids.row(c).begin());
        }
        out.trace.push_back(weighted_total(data, rows, assign, out.centroids, w_pow, p));

        if (opt.weighted && opt.update_weights) {
            DispersionTable disp{raw_dispersions(data, rows, assign, out.centroids, p), 0.0};
            if (opt.offset) {
                const auto& raw = disp.dispersions.values();
                disp.offset = std::accumulate(raw.begin(), raw.end(), 0.0) / static_cast<double>(raw.size());
                for (std::size_t c = 0; c < k; ++c)
                    for (std::size_t v = 0; v < data.n_features(); ++v) disp.dispersions(c, v) += disp.offset;
            }
            // With the offset on, a zero offset means every cluster is collapsed
            // onto its centroid; the criterion is already 0 and any weights are optimal.
            if (!(opt.offset && disp.offset == 0.0)) {
                out.weights = update_weights(disp, p).grid();
                w_pow = powered(out.weights, p, true);
            }
            out.trace.push_back(weighted_total(data, rows, assign, out.centroids, w_pow, p));
        }
    }
    throw numerical_error("Minkowski weighted K-Means did not converge within " +
                          std::to_string(max_partition_iterations) + " iterations");
}

}  // namespace detail

DispersionTable dispersions(const DataMatrix& data, std::span<const std::size_t> assignments, const Grid& centroids,
                            double p, bool offset_enabled) {
    if (assignments.size() != data.n_entities()) throw usage_error("assignment count does not match entity count");
    if (centroids.cols() != data.n_features()) throw usage_error("centroid width does not match feature count");
    for (const std::size_t a : assignments)
        if (a >= centroids.rows()) throw usage_error("cluster id out of range");
    std::vector<std::size_t> rows(data.n_entities());
    std::iota(rows.begin(), rows.end(), 0);
    DispersionTable out{detail::raw_dispersions(data, rows, assignments, centroids, p), 0.0};
    if (offset_enabled) {
        const auto& raw = out.dispersions.values();
        out.offset = std::accumulate(raw.begin(), raw.end(), 0.0) / static_cast<double>(raw.size());
        for (std::size_t c = 0; c < out.dispersions.rows(); ++c)
            for (std::size_t v = 0; v < out.dispersions.cols(); ++v) out.dispersions(c, v) += out.offset;
    }
    return out;
}

DispersionTable dispersions(const DataMatrix& data, const Clustering& clustering, double p, bool offset_enabled) {
    return dispersions(data, clustering.assignments, clustering.centroids, p, offset_enabled);
}

WeightMatrix update_weights(const DispersionTable& disp, double p) {
    if (!(p > 1.0)) throw usage_error("weight update needs p > 1 (use p = " + std::to_string(MinkowskiConfig::p_near_one) + " for p -> 1)");
    const Grid& d = disp.dispersions;
    const double e = 1.0 / (p - 1.0);
    Grid w(d.rows(), d.cols());
    for (std::size_t c = 0; c < d.rows(); ++c) {
        const auto row = d.row(c);
        double lo = std::numeric_limits<double>::infinity();
        for (const double x : row) {
            if (!(x > 0.0)) throw numerical_error("zero dispersion in cluster " + std::to_string(c) + "; weights undefined");
            lo = std::min(lo, x);
        }
        // w_v is proportional to D_v^(-1/(p-1)); scaling by the row minimum keeps
        // every ratio in (0, 1] so large exponents underflow rather than overflow.
        double sum = 0.0;
        for (std::size_t v = 0; v < row.size(); ++v) {
            w(c, v) = std::pow(lo / row[v], e);
            sum += w(c, v);
        }
        for (std::size_t v = 0; v < row.size(); ++v) w(c, v) /= sum;
    }
    return WeightMatrix(std::move(w));
}

Clustering mwk_means(const DataMatrix& data_in, std::size_t k, const Grid& init_centroids,
                     const WeightMatrix& init_weights, const MwkConfig& cfg) {
    const double p = cfg.minkowski.p;
    validate_exponent(p);
    if (!(p > 1.0)) throw usage_error("mwk_means needs p > 1; use p = 1.00001 for p -> 1");
    const DataMatrix data = ensure_standardized(data_in);
    const std::size_t n = data.n_entities();
    if (k == 0) throw usage_error("k must be positive");
    if (k > n) throw usage_error("k = " + std::to_string(k) + " exceeds the entity count " + std::to_string(n));
    if (init_centroids.rows() != k || init_centroids.cols() != data.n_features())
        throw usage_error("initial centroids have the wrong shape");
    if (init_weights.k() != k || init_weights.n_features() != data.n_features())
        throw usage_error("initial weights have the wrong shape");
    if (k >= 2) {
        bool identical = true;
        for (std::size_t i = 1; i < n && identical; ++i)
            identical = std::equal(data.row(0).begin(), data.row(0).end(), data.row(i).begin());
        if (identical) throw data_error("all entities are identical; cannot form clusters");
    }

    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    detail::AlternationOptions opt;
    opt.p = p;
    opt.weighted = true;
    opt.update_weights = !cfg.freeze_weights;
    opt.offset = cfg.minkowski.dispersion_offset_enabled;
    opt.centers = cfg.centers;
    auto res = detail::alternate(data, rows, init_centroids, init_weights.grid(), opt);

    Clustering out;
    out.k = k;
    out.assignments = std::move(res.assignments);
    out.centroids = std::move(res.centroids);
    out.weights = WeightMatrix(std::move(res.weights));
    out.criterion = res.criterion;
    out.iterations = res.iterations;
    out.trace = std::move(res.trace);
    return out;
}

Clustering mwk_means(const DataMatrix& data, std::size_t k, const Grid& init_centroids, const MwkConfig& cfg) {
    return mwk_means(data, k, init_centroids, WeightMatrix::uniform(k, data.n_features()), cfg);
}

}  // namespace kscale
