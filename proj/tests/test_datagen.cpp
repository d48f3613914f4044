#include <cmath>
#include <set>

#include "doctest.h"

#include "kscale/datagen.hpp"
#include "kscale/error.hpp"

using namespace kscale;

namespace {

ScenarioSpec spec(std::size_t n, std::size_t v, std::size_t k, double noise, std::uint64_t seed = 1) {
    ScenarioSpec s;
    s.n_entities = n;
    s.n_informative = v;
    s.k_true = k;
    s.noise_fraction = noise;
    s.seed = seed;
    return s;
}

}  // namespace

TEST_CASE("scenario shapes and ids") {
    const GeneratedData a = generate(spec(1000, 8, 2, 0.0));
    CHECK(a.raw.n_entities() == 1000);
    CHECK(a.raw.n_features() == 8);
    CHECK(std::set<int>(a.labels.begin(), a.labels.end()).size() == 2);
    CHECK_FALSE(a.raw.standardized());
    CHECK(spec(1000, 8, 2, 0.0).id() == "1000x8-2");

    const ScenarioSpec full = spec(1000, 12, 3, 1.0);
    CHECK(generate(full).raw.n_features() == 24);
    CHECK(full.id() == "1000x12-3 + 12NF");
    const ScenarioSpec half = spec(200, 16, 4, 0.5);
    CHECK(half.n_noise() == 8);
    CHECK(generate(half).raw.n_features() == 24);
    CHECK(half.id() == "200x16-4 + 8NF");
}

TEST_CASE("generation is deterministic per seed") {
    const GeneratedData a = generate(spec(300, 5, 3, 0.4, 9));
    const GeneratedData b = generate(spec(300, 5, 3, 0.4, 9));
    const GeneratedData c = generate(spec(300, 5, 3, 0.4, 10));
    CHECK(a.raw == b.raw);
    CHECK(a.labels == b.labels);
    CHECK_FALSE(a.raw == c.raw);
}

TEST_CASE("label frequencies follow the proportions") {
    ScenarioSpec s = spec(1000, 4, 3, 0.0, 77);
    s.cluster_proportions = {0.5, 0.3, 0.2};
    const GeneratedData g = generate(s);
    std::vector<double> counts(3, 0);
    for (const int l : g.labels) ++counts[l];
    double chi2 = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        const double expected = 1000 * s.cluster_proportions[k];
        chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
    }
    CHECK(chi2 < 13.816);  // chi-square, 2 dof, alpha = 0.001
}

TEST_CASE("gaussian clusters have variance sigma2 and noise is label independent") {
    const ScenarioSpec s = spec(1000, 6, 2, 1.0, 5);
    const GeneratedData g = generate(s);
    const std::size_t nv = g.raw.n_features();
    for (int k = 0; k < 2; ++k) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < 1000; ++i)
            if (g.labels[i] == k) members.push_back(i);
        const double m = static_cast<double>(members.size());
        for (std::size_t v = 0; v < 6; ++v) {
            double mean = 0, ss = 0;
            for (const std::size_t i : members) mean += g.raw(i, v);
            mean /= m;
            for (const std::size_t i : members) ss += (g.raw(i, v) - mean) * (g.raw(i, v) - mean);
            const double var = ss / (m - 1);
            // Standard error of a normal sample variance: sigma2 * sqrt(2 / (m - 1)).
            CHECK(std::fabs(var - 0.5) < 3.0 * 0.5 * std::sqrt(2.0 / (m - 1)));
        }
    }
    double lo = g.raw(0, 0), hi = lo;
    for (std::size_t i = 0; i < 1000; ++i)
        for (std::size_t v = 0; v < 6; ++v) {
            lo = std::min(lo, g.raw(i, v));
            hi = std::max(hi, g.raw(i, v));
        }
    for (std::size_t v = 6; v < nv; ++v) {
        double sum[2] = {0, 0}, sq[2] = {0, 0}, cnt[2] = {0, 0};
        for (std::size_t i = 0; i < 1000; ++i) {
            const double x = g.raw(i, v);
            CHECK(x >= lo);
            CHECK(x <= hi);
            sum[g.labels[i]] += x;
            sq[g.labels[i]] += x * x;
            ++cnt[g.labels[i]];
        }
        double m[2], se2 = 0;
        for (int k = 0; k < 2; ++k) {
            m[k] = sum[k] / cnt[k];
            se2 += (sq[k] / cnt[k] - m[k] * m[k]) / cnt[k];
        }
        CHECK(std::fabs(m[0] - m[1]) < 4.0 * std::sqrt(se2));
    }
}

TEST_CASE("correlated scenario has the requested covariance") {
    ScenarioSpec s = spec(4000, 3, 1, 0.0, 21);
    s.correlation = 0.5 / 3.0;
    const GeneratedData g = generate(s);
    double m0 = 0, m1 = 0;
    for (std::size_t i = 0; i < 4000; ++i) {
        m0 += g.raw(i, 0);
        m1 += g.raw(i, 1);
    }
    m0 /= 4000;
    m1 /= 4000;
    double cov = 0, var = 0;
    for (std::size_t i = 0; i < 4000; ++i) {
        cov += (g.raw(i, 0) - m0) * (g.raw(i, 1) - m1);
        var += (g.raw(i, 0) - m0) * (g.raw(i, 0) - m0);
    }
    CHECK(cov / 3999 == doctest::Approx(0.5 / 3.0).epsilon(0.15));
    CHECK(var / 3999 == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("t3 family and spec validation") {
    ScenarioSpec s = spec(500, 4, 3, 0.5, 2);
    s.family = Family::student_t3;
    const GeneratedData g = generate(s);
    CHECK(g.raw.n_features() == 6);
    CHECK(s.id() == "500x4-3 + 2NF t3");
    CHECK(parse_family("student_t3") == Family::student_t3);
    CHECK_THROWS_AS(parse_family("cauchy"), Error);

    ScenarioSpec bad = spec(100, 4, 3, 0.0);
    bad.cluster_proportions = {0.5, 0.5};
    CHECK_THROWS_AS(generate(bad), Error);
    bad.cluster_proportions = {0.5, 0.3, 0.3};
    CHECK_THROWS_AS(generate(bad), Error);
    bad = spec(100, 4, 3, -1.0);
    CHECK_THROWS_AS(generate(bad), Error);
    bad = spec(100, 4, 3, 0.0);
    bad.correlation = 0.6;
    CHECK_THROWS_AS(generate(bad), Error);
}
