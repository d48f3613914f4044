#include "kscale/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "kscale/error.hpp"

namespace kscale {

std::string_view family_name(Family family) {
    return family == Family::gaussian ? "gaussian" : "student_t3";
}

Family parse_family(std::string_view name) {
    if (name == "gaussian") return Family::gaussian;
    if (name == "student_t3" || name == "t3") return Family::student_t3;
    throw usage_error("unknown distribution family '" + std::string(name) + "'");
}

std::size_t ScenarioSpec::n_noise() const {
    return static_cast<std::size_t>(std::llround(noise_fraction * static_cast<double>(n_informative)));
}

std::vector<double> ScenarioSpec::proportions() const {
    if (!cluster_proportions.empty()) return cluster_proportions;
    return std::vector<double>(k_true, 1.0 / static_cast<double>(k_true));
}

std::string ScenarioSpec::id() const {
    if (!name.empty()) return name;
    std::string s = std::to_string(n_entities) + "x" + std::to_string(n_informative) + "-" + std::to_string(k_true);
    if (n_noise() > 0) s += " + " + std::to_string(n_noise()) + "NF";
    if (family == Family::student_t3) s += " t3";
    if (correlation > 0.0) s += " corr";
    if (!cluster_proportions.empty()) s += " unequal";
    return s;
}

void ScenarioSpec::validate() const {
    if (n_entities < 2) throw usage_error("scenario needs at least 2 entities");
    if (n_informative < 1) throw usage_error("scenario needs at least 1 informative feature");
    if (k_true < 1 || k_true > n_entities) throw usage_error("scenario k_true must be in [1, n_entities]");
    if (!std::isfinite(noise_fraction) || noise_fraction < 0.0) throw usage_error("noise_fraction must be >= 0");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw usage_error("sigma2 must be positive");
    if (!(correlation >= 0.0) || correlation >= sigma2)
        throw usage_error("correlation must lie in [0, sigma2) to keep the covariance positive definite");
    if (!cluster_proportions.empty()) {
        if (cluster_proportions.size() != k_true) throw usage_error("cluster_proportions needs one entry per cluster");
        double sum = 0.0;
        for (const double q : cluster_proportions) {
            if (!(q >= 0.0)) throw usage_error("cluster proportions must be nonnegative");
            sum += q;
        }
        if (std::fabs(sum - 1.0) > 1e-9) throw usage_error("cluster proportions must sum to 1");
    }
}

GeneratedData generate(const ScenarioSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n_entities;
    const std::size_t ni = spec.n_informative;
    const std::size_t nn = spec.n_noise();
    const std::size_t nv = ni + nn;
    const double scale = std::sqrt(spec.sigma2);
    const double shared_sd = std::sqrt(spec.correlation);
    const double own_sd = std::sqrt(spec.sigma2 - spec.correlation);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::chi_squared_distribution<double> chi2(3.0);
    std::student_t_distribution<double> t3(3.0);

    std::vector<double> centroids(spec.k_true * ni);
    for (double& c : centroids) c = normal(rng);

    const auto props = spec.proportions();
    std::discrete_distribution<int> pick(props.begin(), props.end());

    std::vector<double> values(n * nv);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int k = pick(rng);
        labels[i] = k;
        const double* mu = centroids.data() + static_cast<std::size_t>(k) * ni;
        double* row = values.data() + i * nv;
        if (spec.correlation > 0.0) {
            // Compound symmetry: a shared component gives covariance `correlation`
            // between every pair of informative features.
            const double z0 = normal(rng);
            const double mix = spec.family == Family::student_t3 ? std::sqrt(3.0 / chi2(rng)) : 1.0;
            for (std::size_t v = 0; v < ni; ++v) row[v] = mu[v] + mix * (own_sd * normal(rng) + shared_sd * z0);
        } else if (spec.family == Family::student_t3) {
            for (std::size_t v = 0; v < ni; ++v) row[v] = mu[v] + scale * t3(rng);
        } else {
            for (std::size_t v = 0; v < ni; ++v) row[v] = mu[v] + scale * normal(rng);
        }
    }

    if (nn > 0) {
        double lo = values[0], hi = values[0];
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t v = 0; v < ni; ++v) {
                lo = std::min(lo, values[i * nv + v]);
                hi = std::max(hi, values[i * nv + v]);
            }
        }
        std::uniform_real_distribution<double> uniform(lo, hi);
        const double mid = 0.5 * (lo + hi);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t v = ni; v < nv; ++v)
                values[i * nv + v] = spec.family == Family::student_t3 ? mid + scale * t3(rng) : uniform(rng);
        }
    }
    return {DataMatrix(n, nv, std::move(values), false), std::move(labels)};
}

}  // namespace kscale
