#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kscale/dataset.hpp"
#include "kscale/partition.hpp"

namespace kscale {

/// Condensed upper triangle of minkowski_p between all entity pairs.
class PairwiseDistances {
public:
    PairwiseDistances(const DataMatrix& data, double p);

    std::size_t size() const noexcept { return n_; }
    double p() const noexcept { return p_; }
    double operator()(std::size_t i, std::size_t j) const;

private:
    std::size_t offset(std::size_t i) const noexcept { return i * (2 * n_ - i - 1) / 2; }

    std::size_t n_;
    double p_;
    std::vector<double> d_;
};

/// Silhouette width of every entity. Members of singleton clusters score 0.
std::vector<double> silhouette_values(const PairwiseDistances& dist, std::span<const std::size_t> assignments,
                                      std::size_t k);

/// Mean silhouette width; dissimilarity is minkowski_p at exponent `p`.
double silhouette(const PairwiseDistances& dist, std::span<const std::size_t> assignments, std::size_t k);
double silhouette(const DataMatrix& data, std::span<const std::size_t> assignments, std::size_t k, double p);

/// Smallest between-cluster point distance over the largest within-cluster
/// point distance.
double dunn(const PairwiseDistances& dist, std::span<const std::size_t> assignments, std::size_t k);
double dunn(const DataMatrix& data, std::span<const std::size_t> assignments, std::size_t k, double p);

/// Sum of squared deviations from the feature means.
double total_scatter(const DataMatrix& data);

/// ((T - W) / (K - 1)) / (W / (N - K)), with W from euclidean_wk.
double calinski_harabasz(const DataMatrix& data, std::span<const std::size_t> assignments, std::size_t k);

/// Same formula from precomputed scatter terms.
double calinski_harabasz(double total_scatter, double wk, std::size_t n, std::size_t k);

/// (W_K / W_{K+1} - 1)(N - K - 1).
double hartigan_statistic(double wk, double wk_next, std::size_t n, std::size_t k);

enum class SelectionRule { maximize, hartigan_threshold };

struct KSelectionReport {
    std::string index_name;
    std::map<std::size_t, double> per_k_values;  ///< index value, or HK for Hartigan
    std::size_t selected_k = 0;
    SelectionRule rule = SelectionRule::maximize;
};

/// Lowest K in `range` with HK <= 10; failing that, the K minimizing
/// |HK(K) - HK(K+1)|. `wk_trace` must cover range.min .. range.max + 1.
KSelectionReport hartigan_select(const std::map<std::size_t, double>& wk_trace, std::size_t n, KRange range);

/// Argmax over K; ties go to the smallest K. NaN values never win.
KSelectionReport select_k(const std::map<std::size_t, double>& values, std::string index_name = {});

/// The validity indexes the harness knows about.
enum class CviIndex { sil_eucl, sil_manh, sil_mink, dunn_eucl, dunn_mink, ch, hartigan };

inline constexpr CviIndex all_indexes[] = {CviIndex::sil_eucl, CviIndex::sil_manh, CviIndex::sil_mink,
                                           CviIndex::dunn_eucl, CviIndex::dunn_mink, CviIndex::ch,
                                           CviIndex::hartigan};

std::string_view index_name(CviIndex index);
CviIndex parse_index(std::string_view name);

/// Exponent of the dissimilarity an index uses when the clusterer ran at
/// `method_p`. Empty for CH and Hartigan, which are Euclidean by definition.
std::optional<double> index_exponent(CviIndex index, double method_p);

}  // namespace kscale
