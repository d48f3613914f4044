#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "kscale/anomalous.hpp"
#include "kscale/error.hpp"
#include "kscale/evaluate.hpp"

using namespace kscale;
using V = std::vector<double>;

namespace {

// Five points at -0.4 and five at +0.4, spread 0.02 within each blob.
DataMatrix two_blobs() {
    V x;
    for (int i = 0; i < 5; ++i) x.push_back(-0.4 - 0.01 + 0.005 * i);
    for (int i = 0; i < 5; ++i) x.push_back(0.4 - 0.01 + 0.005 * i + 0.001);
    return DataMatrix(10, 1, x, true);
}

AnomalousInit sized(std::vector<std::size_t> sizes) {
    AnomalousInit init;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        init.centroids.push_back(V{static_cast<double>(i)});
        init.weights.push_back(V{1.0});
        init.cluster_sizes.push_back(sizes[i]);
        init.extraction_sizes.push_back(sizes[i]);
    }
    return init;
}

}  // namespace

TEST_CASE("the first extraction takes a whole blob") {
    for (const bool weighted : {false, true}) {
        const AnomalousInit init = extract_anomalous(two_blobs(), 2.0, 1, weighted);
        REQUIRE(init.size() >= 2);
        CHECK(init.cluster_sizes.front() == 5);
        CHECK(std::fabs(init.centroids.front()[0]) > 0.3);
        CHECK(std::accumulate(init.cluster_sizes.begin(), init.cluster_sizes.end(), std::size_t{0}) == 10);
        CHECK(init.weights.size() == init.size());
    }
}

TEST_CASE("extraction partitions the data") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    V x(200 * 3);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = g(rng) + 3.0 * ((i / 3) % 4 == 0);
    const DataMatrix d = standardize_range(DataMatrix(200, 3, x));
    for (const double p : {1.0, 1.5, 2.0}) {
        const AnomalousInit plain = extract_anomalous(d, p, 0, false);
        CHECK(std::accumulate(plain.extraction_sizes.begin(), plain.extraction_sizes.end(), std::size_t{0}) == 200);
        const AnomalousInit kept = extract_anomalous(d, p, 3, false);
        CHECK(kept.extraction_sizes == plain.extraction_sizes);
        for (const std::size_t s : kept.cluster_sizes) CHECK(s >= 3);
    }
    const AnomalousInit w = extract_anomalous(d, 1.3, 1, true);
    CHECK(std::accumulate(w.cluster_sizes.begin(), w.cluster_sizes.end(), std::size_t{0}) == 200);
    for (const auto& row : w.weights) CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(extract_anomalous(d, 1.0, 1, true), Error);
}

TEST_CASE("singletons and large theta") {
    const DataMatrix d(3, 1, {0.0, 0.01, 1.0}, true);
    const AnomalousInit init = extract_anomalous(d, 2.0, 1, false);
    CHECK(std::accumulate(init.cluster_sizes.begin(), init.cluster_sizes.end(), std::size_t{0}) == 3);
    CHECK(init.cluster_sizes.front() == 1);  // the outlier at 1.0

    const AnomalousInit none = extract_anomalous(two_blobs(), 2.0, 11, false);
    CHECK(none.size() == 0);
    CHECK(none.cluster_sizes.empty());
    CHECK_THROWS_AS(k_search_cap(none, 20), Error);
}

TEST_CASE("k_search_cap") {
    CHECK(k_search_cap(sized({1, 1, 1, 1, 1, 1, 1}), 20) == 7);
    CHECK(k_search_cap(sized(std::vector<std::size_t>(31, 1)), 20) == 20);
    CHECK(k_search_cap(sized({4, 6}), 20) == 2);
    try {
        k_search_cap(sized({10}), 20);
        FAIL("expected a failure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::numerical);
    }
}

TEST_CASE("truncate_to_k") {
    CHECK(truncate_to_k(sized({5, 2, 9}), 2).cluster_sizes == std::vector<std::size_t>{5, 9});
    const AnomalousInit tie = truncate_to_k(sized({3, 3, 1}), 2);
    CHECK(tie.cluster_sizes == std::vector<std::size_t>{3, 3});
    CHECK(tie.centroids == std::vector<V>{{0.0}, {1.0}});
    const AnomalousInit tie2 = truncate_to_k(sized({1, 3, 3}), 1);
    CHECK(tie2.centroids == std::vector<V>{{1.0}});
    const AnomalousInit same = truncate_to_k(sized({4, 1, 2}), 3);
    CHECK(same.cluster_sizes == std::vector<std::size_t>{4, 1, 2});
    CHECK_THROWS_AS(truncate_to_k(sized({4, 1}), 3), Error);
}

TEST_CASE("imwk_means recovers two blobs deterministically") {
    MwkConfig cfg;
    cfg.minkowski.p = 2.0;
    const Clustering c = imwk_means(two_blobs(), 2, cfg);
    std::vector<int> truth{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    CHECK(adjusted_rand(truth, c.assignments) == 1.0);
    const Clustering again = imwk_means(two_blobs(), 2, cfg);
    CHECK(again.assignments == c.assignments);
    CHECK(again.centroids == c.centroids);
    CHECK(*again.weights == *c.weights);

    const AnomalousInit init = extract_anomalous(two_blobs(), 2.0, 1, true, cfg);
    CHECK_NOTHROW(imwk_means(two_blobs(), init, init.size(), cfg));
    CHECK_THROWS_AS(imwk_means(two_blobs(), init, init.size() + 1, cfg), Error);
}
