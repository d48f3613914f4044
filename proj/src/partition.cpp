#include "kscale/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "kscale/error.hpp"
#include "kscale/seed.hpp"

namespace kscale {

std::vector<std::vector<std::size_t>> cluster_members(std::span<const std::size_t> assignments, std::size_t k) {
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] >= k) throw usage_error("cluster id out of range");
        members[assignments[i]].push_back(i);
    }
    return members;
}

namespace {

void check_shapes(const DataMatrix& data, std::span<const std::size_t> assignments, const Grid& centroids) {
    if (assignments.size() != data.n_entities()) throw usage_error("assignment count does not match entity count");
    if (centroids.cols() != data.n_features()) throw usage_error("centroid width does not match feature count");
    for (const std::size_t a : assignments)
        if (a >= centroids.rows()) throw usage_error("cluster id out of range");
}

bool all_rows_identical(const DataMatrix& data) {
    const auto first = data.row(0);
    for (std::size_t i = 1; i < data.n_entities(); ++i)
        if (!std::equal(first.begin(), first.end(), data.row(i).begin())) return false;
    return true;
}

// Moves the entity farthest from its own centroid into each empty cluster.
void reseed_empty(const DataMatrix& data, std::vector<std::size_t>& assign, std::vector<double>& own_dist,
                  Grid& centroids) {
    const std::size_t k = centroids.rows();
    std::vector<std::size_t> sizes(k, 0);
    for (const std::size_t a : assign) ++sizes[a];
    for (std::size_t e = 0; e < k; ++e) {
        if (sizes[e] != 0) continue;
        std::size_t far = assign.size();
        double far_dist = -1.0;
        for (std::size_t i = 0; i < assign.size(); ++i) {
            if (sizes[assign[i]] > 1 && own_dist[i] > far_dist) {
                far_dist = own_dist[i];
                far = i;
            }
        }
        if (far == assign.size()) throw numerical_error("cannot re-seed an empty cluster: too few entities");
        --sizes[assign[far]];
        assign[far] = e;
        ++sizes[e];
        own_dist[far] = 0.0;
        std::copy(data.row(far).begin(), data.row(far).end(), centroids.row(e).begin());
    }
}

// Nearest centroid under a separable distance, ties to the lowest index.
// Centroids are transposed so the inner loop runs across clusters; each
// distance still sums its features in order.
template <class Term>
void assign_nearest(const DataMatrix& data, const Grid& centroids, std::vector<std::size_t>& next,
                    std::vector<double>& own_dist, Term term) {
    const std::size_t k = centroids.rows();
    const std::size_t nv = data.n_features();
    std::vector<double> ct(nv * k);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t v = 0; v < nv; ++v) ct[v * k + c] = centroids(c, v);
    std::vector<double> d(k);
    for (std::size_t i = 0; i < data.n_entities(); ++i) {
        const double* y = data.row(i).data();
        std::fill(d.begin(), d.end(), 0.0);
        for (std::size_t v = 0; v < nv; ++v) {
            const double yv = y[v];
            const double* col = ct.data() + v * k;
            for (std::size_t c = 0; c < k; ++c) d[c] += term(yv - col[c]);
        }
        std::size_t best = 0;
        for (std::size_t c = 1; c < k; ++c)
            if (d[c] < d[best]) best = c;
        next[i] = best;
        own_dist[i] = d[best];
    }
}

// Squared-Euclidean assignment with per-centroid lower bounds: lower(i, c)
// never exceeds the Euclidean distance from entity i to centroid c, so a
// centroid whose bound clears the current distance (with a rounding margin)
// cannot win and is skipped. Negative bounds force evaluation.
void assign_nearest_sq(const DataMatrix& data, const Grid& centroids, const std::vector<std::size_t>& prev,
                       std::vector<std::size_t>& next, std::vector<double>& own_dist, Grid& lower) {
    const std::size_t k = centroids.rows();
    const std::size_t nv = data.n_features();
    auto dist = [&](const double* y, std::size_t c) {
        const double* m = centroids.row(c).data();
        double d = 0.0;
        for (std::size_t v = 0; v < nv; ++v) d += (y[v] - m[v]) * (y[v] - m[v]);
        return d;
    };
    for (std::size_t i = 0; i < data.n_entities(); ++i) {
        const double* y = data.row(i).data();
        double* l = lower.row(i).data();
        const std::size_t a = prev[i];
        double best_d = dist(y, a);
        l[a] = std::sqrt(best_d);
        std::size_t best = a;
        double cutoff = l[a] * (1.0 + 1e-9) + 1e-12;
        for (std::size_t c = 0; c < k; ++c) {
            if (c == a || l[c] > cutoff) continue;
            const double d = dist(y, c);
            l[c] = std::sqrt(d);
            if (d < best_d || (d == best_d && c < best)) {
                best_d = d;
                best = c;
                cutoff = l[c] * (1.0 + 1e-9) + 1e-12;
            }
        }
        next[i] = best;
        own_dist[i] = best_d;
    }
}

// Per-cluster means, bit-identical to minkowski_center at p = 2 on each column.
void update_means(const DataMatrix& data, const std::vector<std::size_t>& assign, Grid& centroids) {
    const std::size_t k = centroids.rows();
    const std::size_t nv = data.n_features();
    Grid sum(k, nv), lo(k, nv, std::numeric_limits<double>::infinity()), hi(k, nv, -std::numeric_limits<double>::infinity());
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < assign.size(); ++i) {
        const std::size_t c = assign[i];
        ++count[c];
        const auto y = data.row(i);
        for (std::size_t v = 0; v < nv; ++v) {
            sum(c, v) += y[v];
            lo(c, v) = std::min(lo(c, v), y[v]);
            hi(c, v) = std::max(hi(c, v), y[v]);
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (count[c] == 0) throw usage_error("cluster_centroid: empty member set");
        for (std::size_t v = 0; v < nv; ++v) {
            if (lo(c, v) == hi(c, v)) centroids(c, v) = lo(c, v);
            else centroids(c, v) = std::clamp(sum(c, v) / static_cast<double>(count[c]), lo(c, v), hi(c, v));
        }
    }
}

Clustering kmeans_standardized(const DataMatrix& data, std::size_t k, double p, const Grid& init,
                               const CenterSolverConfig& cfg) {
    const std::size_t n = data.n_entities();
    const std::size_t nv = data.n_features();
    if (k == 0) throw usage_error("k must be positive");
    if (k > n) throw usage_error("k = " + std::to_string(k) + " exceeds the entity count " + std::to_string(n));
    if (init.rows() != k || init.cols() != nv) throw usage_error("initial centroids have the wrong shape");
    if (k >= 2 && all_rows_identical(data)) throw data_error("all entities are identical; cannot form clusters");

    Clustering out;
    out.k = k;
    out.centroids = init;
    std::vector<std::size_t> assign(n, 0);
    std::vector<double> own_dist(n, 0.0);
    Grid lower(p == 2.0 ? n : 0, k, -1.0);
    Grid assigned_with;

    for (std::size_t iter = 0; iter < max_partition_iterations; ++iter) {
        std::vector<std::size_t> next(n);
        double total = 0.0;
        if (p == 2.0) {
            assigned_with = out.centroids;
            assign_nearest_sq(data, out.centroids, assign, next, own_dist, lower);
        } else if (p == 1.0) {
            assign_nearest(data, out.centroids, next, own_dist, [](double d) { return std::fabs(d); });
        } else {
            assign_nearest(data, out.centroids, next, own_dist, [p](double d) { return abs_pow(d, p); });
        }
        reseed_empty(data, next, own_dist, out.centroids);
        for (const double d : own_dist) total += d;
        out.trace.push_back(total);
        out.iterations = iter + 1;

        if (iter > 0 && next == assign) {
            out.assignments = std::move(assign);
            out.criterion = total;
            return out;
        }
        assign = std::move(next);

        if (p == 2.0) {
            update_means(data, assign, out.centroids);
            for (std::size_t c = 0; c < k; ++c) {
                const double drift = std::sqrt(minkowski_p(assigned_with.row(c), out.centroids.row(c), 2.0));
                for (std::size_t i = 0; i < n; ++i) lower(i, c) -= drift * (1.0 + 1e-9) + 1e-12;
            }
        } else {
            const auto members = cluster_members(assign, k);
            for (std::size_t c = 0; c < k; ++c) {
                auto centroid = cluster_centroid(data, members[c], p, cfg, out.centroids.row(c));
                std::copy(centroid.begin(), centroid.end(), out.centroids.row(c).begin());
            }
        }
        out.trace.push_back(criterion(data, assign, out.centroids, nullptr, p));
    }
    throw numerical_error("kmeans did not converge within " + std::to_string(max_partition_iterations) +
                          " iterations");
}

}  // namespace

Clustering kmeans(const DataMatrix& data, std::size_t k, double p, const Grid& init, const CenterSolverConfig& cfg) {
    validate_exponent(p);
    if (data.standardized()) return kmeans_standardized(data, k, p, init, cfg);
    return kmeans_standardized(standardize_range(data), k, p, init, cfg);
}

std::uint64_t restart_seed(std::uint64_t seed, std::size_t index) { return derive_seed(seed, {index}); }

Grid random_initial_centroids(const DataMatrix& data, std::size_t k, std::uint64_t seed) {
    const std::size_t n = data.n_entities();
    if (k == 0 || k > n) throw usage_error("cannot sample " + std::to_string(k) + " of " + std::to_string(n) + " entities");
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Grid out(k, data.n_features());
    for (std::size_t c = 0; c < k; ++c) {
        std::uniform_int_distribution<std::size_t> pick(c, n - 1);
        std::swap(idx[c], idx[pick(rng)]);
        const auto row = data.row(idx[c]);
        std::copy(row.begin(), row.end(), out.row(c).begin());
    }
    return out;
}

Clustering kmeans_multistart(const DataMatrix& data_in, std::size_t k, double p, const RestartPolicy& policy,
                             const CenterSolverConfig& cfg, std::span<const Grid> extra_starts) {
    validate_exponent(p);
    if (policy.n_restarts == 0) throw usage_error("n_restarts must be at least 1");
    const DataMatrix data = ensure_standardized(data_in);
    std::optional<Clustering> best;
    auto consider = [&](Clustering c) {
        if (!best || c.criterion < best->criterion) best = std::move(c);
    };
    for (std::size_t r = 0; r < policy.n_restarts; ++r) {
        consider(kmeans_standardized(data, k, p, random_initial_centroids(data, k, restart_seed(policy.rng_seed, r)),
                                     cfg));
    }
    for (const Grid& start : extra_starts) consider(kmeans_standardized(data, k, p, start, cfg));
    return std::move(*best);
}

double criterion(const DataMatrix& data, std::span<const std::size_t> assignments, const Grid& centroids,
                 const WeightMatrix* weights, double p) {
    check_shapes(data, assignments, centroids);
    double total = 0.0;
    if (!weights) {
        for (std::size_t i = 0; i < assignments.size(); ++i)
            total += minkowski_p(data.row(i), centroids.row(assignments[i]), p);
        return total;
    }
    if (weights->k() != centroids.rows() || weights->n_features() != data.n_features())
        throw usage_error("weight matrix shape does not match the clustering");
    Grid w_pow(weights->k(), weights->n_features());
    for (std::size_t c = 0; c < weights->k(); ++c)
        for (std::size_t v = 0; v < weights->n_features(); ++v) w_pow(c, v) = abs_pow((*weights)(c, v), p);
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        const std::size_t c = assignments[i];
        total += weighted_minkowski_pow(data.row(i), centroids.row(c), w_pow.row(c), p);
    }
    return total;
}

double criterion(const DataMatrix& data, const Clustering& clustering, double p) {
    return criterion(data, clustering.assignments, clustering.centroids,
                     clustering.weights ? &*clustering.weights : nullptr, p);
}

Grid cluster_means(const DataMatrix& data, std::span<const std::size_t> assignments, std::size_t k) {
    if (assignments.size() != data.n_entities()) throw usage_error("assignment count does not match entity count");
    const std::size_t nv = data.n_features();
    Grid means(k, nv);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        const std::size_t c = assignments[i];
        if (c >= k) throw usage_error("cluster id out of range");
        ++counts[c];
        const auto y = data.row(i);
        for (std::size_t v = 0; v < nv; ++v) means(c, v) += y[v];
    }
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c])
            for (std::size_t v = 0; v < nv; ++v) means(c, v) /= static_cast<double>(counts[c]);
    return means;
}

double euclidean_wk(const DataMatrix& data, std::span<const std::size_t> assignments, std::size_t k) {
    const Grid means = cluster_means(data, assignments, k);
    return criterion(data, assignments, means, nullptr, 2.0);
}

double euclidean_wk(const DataMatrix& data, const Clustering& clustering) {
    return euclidean_wk(data, clustering.assignments, clustering.k);
}

}  // namespace kscale
