#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"

#include "kscale/error.hpp"
#include "kscale/partition.hpp"

using namespace kscale;
using V = std::vector<double>;

namespace {

DataMatrix four_points() { return DataMatrix(4, 1, {-0.5, -0.4, 0.4, 0.5}, true); }

DataMatrix blob_data(std::size_t n, std::size_t v, std::uint64_t seed, std::size_t blobs = 3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> centers(blobs * v);
    for (double& c : centers) c = 2.0 * g(rng);
    std::vector<double> x(n * v);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t f = 0; f < v; ++f) x[i * v + f] = centers[(i % blobs) * v + f] + 0.7 * g(rng);
    return standardize_range(DataMatrix(n, v, x));
}

// Straight Lloyd iteration with the same rules, no shortcuts.
std::vector<std::size_t> reference_lloyd(const DataMatrix& d, Grid c) {
    const std::size_t n = d.n_entities(), k = c.rows(), nv = d.n_features();
    std::vector<std::size_t> assign(n, k);
    for (int iter = 0; iter < 1000; ++iter) {
        std::vector<std::size_t> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < k; ++j) {
                double s = 0;
                for (std::size_t f = 0; f < nv; ++f) s += (d(i, f) - c(j, f)) * (d(i, f) - c(j, f));
                if (s < best) {
                    best = s;
                    next[i] = j;
                }
            }
        }
        if (next == assign) return assign;
        assign = next;
        for (std::size_t j = 0; j < k; ++j) {
            std::size_t cnt = 0;
            V sum(nv, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                if (assign[i] == j) {
                    ++cnt;
                    for (std::size_t f = 0; f < nv; ++f) sum[f] += d(i, f);
                }
            REQUIRE(cnt > 0);
            for (std::size_t f = 0; f < nv; ++f) c(j, f) = sum[f] / cnt;
        }
    }
    FAIL("reference did not converge");
    return assign;
}

}  // namespace

TEST_CASE("kmeans four-point example") {
    const Clustering c = kmeans(four_points(), 2, 2, Grid(2, 1, V{-0.5, 0.5}));
    CHECK(c.assignments == std::vector<std::size_t>{0, 0, 1, 1});
    CHECK(c.centroids(0, 0) == doctest::Approx(-0.45));
    CHECK(c.centroids(1, 0) == doctest::Approx(0.45));
    CHECK(c.criterion == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(criterion(four_points(), c, 2) == doctest::Approx(0.01).epsilon(1e-12));

    for (const std::uint64_t seed : {0ull, 1ull, 99ull, 12345ull}) {
        const Clustering m = kmeans_multistart(four_points(), 2, 2, RestartPolicy{5, seed});
        CHECK(m.criterion == doctest::Approx(0.01).epsilon(1e-12));
    }
}

TEST_CASE("kmeans edge cases") {
    const DataMatrix d = four_points();
    const Clustering one = kmeans(d, 1, 2, Grid(1, 1, V{0.5}));
    CHECK(one.centroids(0, 0) == doctest::Approx(0.0).scale(1.0));
    CHECK(one.criterion == doctest::Approx(0.25 + 0.16 + 0.16 + 0.25));

    const Clustering all = kmeans(d, 4, 2, Grid(4, 1, V{-0.5, -0.4, 0.4, 0.5}));
    CHECK(all.criterion == 0.0);

    CHECK_THROWS_AS(kmeans(d, 5, 2, Grid(5, 1)), Error);
    CHECK_THROWS_AS(kmeans(d, 2, 2, Grid(3, 1)), Error);
    const DataMatrix same(3, 2, {1, 1, 1, 1, 1, 1}, true);
    try {
        kmeans(same, 2, 2, Grid(2, 2, V{1, 1, 1, 1}));
        FAIL("expected a data error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::data);
    }
}

TEST_CASE("criterion and euclidean_wk examples") {
    const DataMatrix d = DataMatrix(2, 1, {0, 1}, true);
    const std::size_t one_block[] = {0, 0};
    CHECK(euclidean_wk(d, one_block, 1) == 0.5);

    const DataMatrix e = DataMatrix(3, 1, {0, 0, 1}, true);
    Clustering med = kmeans(e, 1, 1, Grid(1, 1, V{1}));
    CHECK(med.centroids(0, 0) == 0.0);
    CHECK(euclidean_wk(e, med) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    const DataMatrix two = DataMatrix::from_rows({{0, 5}, {1, -5}}, true);
    Clustering masked;
    masked.k = 1;
    masked.assignments = {0, 0};
    masked.centroids = Grid(1, 2, V{0.5, 0});
    masked.weights = WeightMatrix(Grid(1, 2, V{1, 0}));
    CHECK(criterion(two, masked, 2) == 0.5);
    masked.centroids = Grid(1, 3);
    CHECK_THROWS_AS(criterion(two, masked, 2), Error);
}

TEST_CASE("squared-Euclidean kmeans matches a plain Lloyd reference") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const DataMatrix d = blob_data(150, 5, seed, 2 + seed % 4);
        for (const std::size_t k : {2u, 4u, 9u}) {
            const Grid init = random_initial_centroids(d, k, seed * 31 + k);
            const Clustering c = kmeans(d, k, 2, init);
            CHECK(c.assignments == reference_lloyd(d, init));
        }
    }
}

TEST_CASE("kmeans invariants on random data") {
    for (const double p : {1.0, 1.5, 2.0, 3.0}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const DataMatrix d = blob_data(80, 4, seed + 100);
            const std::size_t k = 2 + seed % 4;
            const Clustering c = kmeans(d, k, p, random_initial_centroids(d, k, seed));
            for (std::size_t t = 1; t < c.trace.size(); ++t) CHECK(c.trace[t] <= c.trace[t - 1] + 1e-9);
            CHECK(c.criterion == doctest::Approx(criterion(d, c, p)).epsilon(1e-6));
            std::vector<std::size_t> sizes(k, 0);
            for (const std::size_t a : c.assignments) ++sizes[a];
            for (const std::size_t s : sizes) CHECK(s > 0);
            // Assignment-step optimality.
            for (std::size_t i = 0; i < d.n_entities(); ++i) {
                const double own = minkowski_p(d.row(i), c.centroids.row(c.assignments[i]), p);
                for (std::size_t j = 0; j < k; ++j) CHECK(own <= minkowski_p(d.row(i), c.centroids.row(j), p));
            }
            const Clustering again = kmeans(d, k, p, random_initial_centroids(d, k, seed));
            CHECK(again.assignments == c.assignments);
            CHECK(again.centroids == c.centroids);
        }
    }
}

TEST_CASE("empty clusters are re-seeded") {
    const DataMatrix d = DataMatrix(5, 1, {0, 0.1, 0.2, 0.9, 1.0}, true);
    // The third centroid starts far from everything and captures nobody.
    const Clustering c = kmeans(d, 3, 2, Grid(3, 1, V{0.1, 0.95, 50}));
    std::vector<std::size_t> sizes(3, 0);
    for (const std::size_t a : c.assignments) ++sizes[a];
    for (const std::size_t s : sizes) CHECK(s > 0);
}

TEST_CASE("multistart picks the best run and is reproducible") {
    const DataMatrix d = blob_data(120, 3, 7, 4);
    const RestartPolicy policy{8, 42};
    const Clustering best = kmeans_multistart(d, 4, 2, policy);
    for (std::size_t r = 0; r < policy.n_restarts; ++r) {
        const Clustering single = kmeans(d, 4, 2, random_initial_centroids(d, 4, restart_seed(42, r)));
        CHECK(best.criterion <= single.criterion);
    }
    const Clustering one = kmeans_multistart(d, 4, 2, RestartPolicy{1, 42});
    const Clustering direct = kmeans(d, 4, 2, random_initial_centroids(d, 4, restart_seed(42, 0)));
    CHECK(one.assignments == direct.assignments);
    CHECK(one.criterion == direct.criterion);
    CHECK(kmeans_multistart(d, 4, 2, policy).assignments == best.assignments);
    CHECK_THROWS_AS(kmeans_multistart(d, 4, 2, RestartPolicy{0, 1}), Error);
}

TEST_CASE("random initial centroids are distinct entities") {
    const DataMatrix d = blob_data(30, 2, 1);
    const Grid g = random_initial_centroids(d, 30, 9);
    std::vector<V> rows;
    for (std::size_t r = 0; r < 30; ++r) rows.emplace_back(g.row(r).begin(), g.row(r).end());
    std::sort(rows.begin(), rows.end());
    CHECK(std::adjacent_find(rows.begin(), rows.end()) == rows.end());
    CHECK_THROWS_AS(random_initial_centroids(d, 31, 9), Error);
}
