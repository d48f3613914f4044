#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "kscale/centers.hpp"
#include "kscale/error.hpp"

using namespace kscale;
using V = std::vector<double>;

TEST_CASE("minkowski_center examples") {
    CHECK(minkowski_center(V{0, 1}, 2) == 0.5);
    CHECK(minkowski_center(V{0, 0, 1}, 1) == 0.0);
    CHECK(minkowski_center(V{0, 1}, 3) == doctest::Approx(0.5).epsilon(1e-9));
    // Stationarity 2 mu^2 = (1 - mu)^2.
    CHECK(std::abs(minkowski_center(V{0, 0, 1}, 3) - 1.0 / (1.0 + std::sqrt(2.0))) < 1e-6);
    CHECK(minkowski_center(V{4, 1, 3, 2}, 1) == 2.5);
    CHECK(minkowski_center(V{7}, 1.7) == 7.0);
    CHECK(minkowski_center(V{2, 2, 2}, 1.7) == 2.0);
    CHECK_THROWS_AS(minkowski_center(V{}, 2), Error);
    CHECK_THROWS_AS(minkowski_center(V{1, 2}, 0.5), Error);
}

TEST_CASE("cluster_centroid examples") {
    const DataMatrix d = DataMatrix::from_rows({{0, 0}, {2, 2}, {5, -1}});
    const std::size_t both[] = {0, 1};
    CHECK(cluster_centroid(d, both, 2) == V{1, 1});
    const std::size_t single[] = {2};
    for (const double p : {1.0, 1.5, 2.0, 3.0}) CHECK(cluster_centroid(d, single, p) == V{5, -1});
    const DataMatrix one = DataMatrix::from_rows({{0}, {0}, {1}});
    const std::size_t all[] = {0, 1, 2};
    CHECK(cluster_centroid(one, all, 1) == V{0});
    CHECK_THROWS_AS(cluster_centroid(d, std::span<const std::size_t>{}, 2), Error);
}

TEST_CASE("center properties on random sets") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    for (const double p : {1.1, 1.2, 1.5, 2.7, 3.0, 5.0}) {
        for (int t = 0; t < 40; ++t) {
            V x(3 + t % 17);
            for (double& v : x) v = g(rng) * (t % 2 ? 1.0 : 5.0);
            const double mu = minkowski_center(x, p);
            const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
            CHECK(mu >= *lo);
            CHECK(mu <= *hi);

            const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
            const double med = minkowski_center(x, 1);
            const double f = center_objective(x, mu, p);
            CHECK(f <= center_objective(x, mean, p) + 1e-9);
            CHECK(f <= center_objective(x, med, p) + 1e-9);

            V shifted = x;
            for (double& v : shifted) v += 3.25;
            CHECK(std::abs(minkowski_center(shifted, p) - (mu + 3.25)) < 1e-6);

            // Convexity: the derivative changes sign around the solution.
            const double h = 1e-5;
            CHECK(center_objective(x, mu - h, p) >= f - 1e-12);
            CHECK(center_objective(x, mu + h, p) >= f - 1e-12);
        }
    }
}

TEST_CASE("fixed-step mode lands within a step of the solution") {
    CenterSolverConfig cfg;
    cfg.method = CenterMethod::fixed_step;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int t = 0; t < 20; ++t) {
        V x(15);
        for (double& v : x) v = u(rng);
        for (const double p : {1.3, 3.0}) {
            CHECK(std::abs(minkowski_center(x, p, cfg) - minkowski_center(x, p)) <= cfg.descent_step + 1e-9);
        }
    }
}

TEST_CASE("hints do not change the answer") {
    const V x{0.1, 0.4, -0.3, 0.25, 0.9};
    const double ref = minkowski_center(x, 1.6);
    for (const double hint : {-0.2, 0.0, 0.3, 0.8, 5.0}) CHECK(std::abs(minkowski_center(x, 1.6, {}, hint) - ref) < 1e-6);
}
