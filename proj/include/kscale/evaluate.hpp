#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "kscale/error.hpp"

namespace kscale {

namespace detail {
double adjusted_rand_dense(std::span<const std::size_t> a, std::size_t ka, std::span<const std::size_t> b,
                           std::size_t kb);

template <class Label>
std::vector<std::size_t> densify(std::span<const Label> labels, std::size_t& n_blocks) {
    std::map<Label, std::size_t> ids;
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const Label& l : labels) out.push_back(ids.try_emplace(l, ids.size()).first->second);
    n_blocks = ids.size();
    return out;
}
}  // namespace detail

/// Hubert-Arabie adjusted Rand index from the contingency table. Labels are
/// arbitrary ids. When both partitions are a single block the index is 1.
template <class LabelA, class LabelB>
double adjusted_rand(std::span<const LabelA> a, std::span<const LabelB> b) {
    if (a.size() != b.size()) throw usage_error("adjusted_rand: partitions have different lengths");
    std::size_t ka = 0, kb = 0;
    const auto da = detail::densify(a, ka);
    const auto db = detail::densify(b, kb);
    return detail::adjusted_rand_dense(da, ka, db, kb);
}

template <class LabelA, class LabelB>
double adjusted_rand(const std::vector<LabelA>& a, const std::vector<LabelB>& b) {
    return adjusted_rand(std::span<const LabelA>(a), std::span<const LabelB>(b));
}

/// |K - K_est| / K.
double relative_error(std::size_t true_k, std::size_t estimated_k);

double mean(std::span<const double> values);

/// Sample standard deviation over sqrt(n); 0 for fewer than two values.
double standard_error(std::span<const double> values);

}  // namespace kscale
