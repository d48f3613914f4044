#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"

#include "kscale/error.hpp"
#include "kscale/validity.hpp"

using namespace kscale;
using V = std::vector<double>;
using A = std::vector<std::size_t>;

namespace {

const DataMatrix line4(4, 1, {0, 1, 10, 11}, true);
const A split4{0, 0, 1, 1};

}  // namespace

TEST_CASE("silhouette hand example") {
    const double s0 = (110.5 - 1.0) / 110.5;
    const double s1 = (90.5 - 1.0) / 90.5;
    CHECK(silhouette(line4, split4, 2, 2.0) == doctest::Approx((s0 + s1) / 2.0).epsilon(1e-12));
    CHECK(silhouette(line4, split4, 2, 2.0) == doctest::Approx(0.989950).epsilon(1e-6));
    const auto s = silhouette_values(PairwiseDistances(line4, 2.0), split4, 2);
    CHECK(s[0] == doctest::Approx(0.990950).epsilon(1e-6));
    CHECK(s[1] == doctest::Approx(0.988950).epsilon(1e-6));
}

TEST_CASE("silhouette special cases") {
    const DataMatrix collapsed(4, 1, {0, 0, 5, 5}, true);
    CHECK(silhouette(collapsed, split4, 2, 2.0) == 1.0);
    // The middle entity sits as far (on average) from its own cluster as from the other.
    const DataMatrix mid(4, 1, {0, 2, 3, 5}, true);
    const auto s = silhouette_values(PairwiseDistances(mid, 1.0), A{0, 0, 1, 1}, 2);
    CHECK(s[1] == doctest::Approx(0.0).scale(1.0));
    // Singletons score 0.
    const auto single = silhouette_values(PairwiseDistances(line4, 2.0), A{0, 1, 1, 1}, 2);
    CHECK(single[0] == 0.0);
    CHECK_THROWS_AS(silhouette(line4, A{0, 0, 0, 0}, 1, 2.0), Error);
    CHECK_THROWS_AS(silhouette(line4, A{0, 0, 2, 2}, 3, 2.0), Error);
}

TEST_CASE("dunn hand examples") {
    CHECK(dunn(line4, split4, 2, 2.0) == 81.0);
    CHECK(dunn(line4, split4, 2, 1.0) == 9.0);
    double last = 0.0;
    for (const double gap : {10.0, 20.0, 40.0}) {
        const DataMatrix d(4, 1, {0, 1, gap, gap + 1}, true);
        const double value = dunn(d, split4, 2, 2.0);
        CHECK(value > last);
        last = value;
    }
    const DataMatrix d(3, 1, {0, 1, 2}, true);
    CHECK_THROWS_AS(dunn(d, A{0, 1, 2}, 3, 2.0), Error);
}

TEST_CASE("Silhouette and Dunn agree with direct double loops") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 30; ++t) {
        const std::size_t n = 6 + t % 20, k = 2 + t % 3, nv = 1 + t % 4;
        V x(n * nv);
        for (double& v : x) v = u(rng);
        const DataMatrix d(n, nv, x, true);
        A assign(n);
        for (std::size_t i = 0; i < n; ++i) assign[i] = i < k ? i : rng() % k;
        for (const double p : {1.0, 1.6, 2.0}) {
            auto dist = [&](std::size_t i, std::size_t j) {
                double s = 0;
                for (std::size_t f = 0; f < nv; ++f) s += std::pow(std::fabs(d(i, f) - d(j, f)), p);
                return s;
            };
            double total = 0;
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t own = 0;
                for (std::size_t j = 0; j < n; ++j) own += assign[j] == assign[i];
                if (own == 1) continue;
                double a = 0;
                for (std::size_t j = 0; j < n; ++j)
                    if (j != i && assign[j] == assign[i]) a += dist(i, j);
                a /= own - 1;
                double b = std::numeric_limits<double>::infinity();
                for (std::size_t c = 0; c < k; ++c) {
                    if (c == assign[i]) continue;
                    double s = 0;
                    std::size_t m = 0;
                    for (std::size_t j = 0; j < n; ++j)
                        if (assign[j] == c) {
                            s += dist(i, j);
                            ++m;
                        }
                    b = std::min(b, s / m);
                }
                total += (b - a) / std::max(a, b);
            }
            CHECK(silhouette(d, assign, k, p) == doctest::Approx(total / n).epsilon(1e-9));

            double sep = std::numeric_limits<double>::infinity(), diam = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    if (i == j) continue;
                    if (assign[i] == assign[j]) diam = std::max(diam, dist(i, j));
                    else sep = std::min(sep, dist(i, j));
                }
            if (diam > 0) CHECK(dunn(d, assign, k, p) == doctest::Approx(sep / diam).epsilon(1e-9));
        }
    }
}

TEST_CASE("Calinski-Harabasz") {
    CHECK(total_scatter(line4) == 101.0);
    CHECK(calinski_harabasz(line4, split4, 2) == 200.0);
    CHECK(calinski_harabasz(101.0, 1.0, 4, 2) == 200.0);
    const DataMatrix collapsed(4, 1, {0, 0, 5, 5}, true);
    CHECK_THROWS_AS(calinski_harabasz(collapsed, split4, 2), Error);
    CHECK_THROWS_AS(calinski_harabasz(101.0, 1.0, 4, 4), Error);
}

TEST_CASE("CH and Hartigan depend only on Euclidean W and T") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g;
    V x(40 * 2);
    for (double& v : x) v = g(rng);
    const DataMatrix d(40, 2, x, true);
    A assign(40);
    for (std::size_t i = 0; i < 40; ++i) assign[i] = i % 3;
    Clustering c;
    c.k = 3;
    c.assignments = assign;
    c.centroids = Grid(3, 2, 7.0);  // deliberately not the means
    const double wk = euclidean_wk(d, c);
    c.centroids = cluster_means(d, assign, 3);
    CHECK(euclidean_wk(d, c) == wk);
    CHECK(criterion(d, c, 2.0) == doctest::Approx(wk).epsilon(1e-12));
    CHECK(calinski_harabasz(d, assign, 3) == calinski_harabasz(total_scatter(d), wk, 40, 3));
}

TEST_CASE("Hartigan selection") {
    const auto first = hartigan_select({{2, 100.0}, {3, 50.0}, {4, 48.0}}, 20, KRange{2, 3});
    CHECK(first.per_k_values.at(2) == doctest::Approx(17.0));
    CHECK(first.per_k_values.at(3) == doctest::Approx(2.0 / 3.0));
    CHECK(first.selected_k == 3);
    CHECK(first.rule == SelectionRule::hartigan_threshold);

    // HK = {2: 40, 3: 25, 4: 24} with N = 22.
    const double w5 = 1.0, w4 = w5 * (1 + 24.0 / 17.0), w3 = w4 * (1 + 25.0 / 18.0), w2 = w3 * (1 + 40.0 / 19.0);
    const auto fallback = hartigan_select({{2, w2}, {3, w3}, {4, w4}, {5, w5}}, 22, KRange{2, 4});
    CHECK(fallback.per_k_values.at(2) == doctest::Approx(40.0));
    CHECK(fallback.per_k_values.at(4) == doctest::Approx(24.0));
    CHECK(fallback.selected_k == 3);

    const auto flat = hartigan_select({{2, 5.0}, {3, 5.0}, {4, 5.0}}, 30, KRange{2, 3});
    CHECK(flat.selected_k == 2);
    CHECK_THROWS_AS(hartigan_select({{2, 5.0}, {3, 5.0}}, 30, KRange{2, 3}), Error);
    CHECK(hartigan_statistic(100, 50, 20, 2) == 17.0);
}

TEST_CASE("select_k") {
    CHECK(select_k({{2, 0.5}, {3, 0.9}, {4, 0.7}}).selected_k == 3);
    CHECK(select_k({{2, 0.9}, {3, 0.9}}).selected_k == 2);
    CHECK(select_k({{2, 0.1}}).selected_k == 2);
    CHECK(select_k({{2, std::nan("")}, {3, -1.0}}).selected_k == 3);
    CHECK_THROWS_AS(select_k({}), Error);
    CHECK_THROWS_AS(select_k({{2, std::nan("")}}), Error);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int t = 0; t < 50; ++t) {
        std::map<std::size_t, double> v, transformed;
        for (std::size_t k = 2; k <= 9; ++k) {
            v[k] = u(rng);
            transformed[k] = std::exp(3.0 * v[k]) + 1.0;
        }
        CHECK(select_k(v).selected_k == select_k(transformed).selected_k);
    }
}

TEST_CASE("index names and exponents") {
    for (const CviIndex idx : all_indexes) CHECK(parse_index(index_name(idx)) == idx);
    CHECK_THROWS_AS(parse_index("gap"), Error);
    CHECK(*index_exponent(CviIndex::sil_eucl, 1.4) == 2.0);
    CHECK(*index_exponent(CviIndex::sil_manh, 1.4) == 1.0);
    CHECK(*index_exponent(CviIndex::sil_mink, 1.4) == 1.4);
    CHECK(*index_exponent(CviIndex::dunn_mink, 2.0) == 2.0);
    CHECK_FALSE(index_exponent(CviIndex::ch, 1.4));
    CHECK_FALSE(index_exponent(CviIndex::hartigan, 1.4));
}
