#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kscale/dataset.hpp"

namespace kscale {

enum class Family { gaussian, student_t3 };

std::string_view family_name(Family family);
Family parse_family(std::string_view name);

/// Parameters of one synthetic scenario.
struct ScenarioSpec {
    std::string name;  ///< optional display id; defaults to e.g. "1000x12-3 + 6NF"
    std::size_t n_entities = 1000;
    std::size_t n_informative = 8;
    std::size_t k_true = 2;
    double noise_fraction = 0.0;  ///< noise features as a fraction of informative ones
    Family family = Family::gaussian;
    std::vector<double> cluster_proportions;  ///< empty means uniform 1/K
    double correlation = 0.0;                 ///< within-cluster covariance between informative features
    double sigma2 = 0.5;
    std::uint64_t seed = 0;

    std::size_t n_noise() const;
    std::vector<double> proportions() const;
    std::string id() const;
    void validate() const;
};

struct GeneratedData {
    DataMatrix raw;
    std::vector<int> labels;
};

/// Draws a scenario: N(0,1) centroid components over informative features,
/// cluster membership from the proportion vector, cluster points around
/// their centroid at scale sigma2, then noise features over the informative
/// value range. Output is unstandardized.
GeneratedData generate(const ScenarioSpec& spec);

}  // namespace kscale
