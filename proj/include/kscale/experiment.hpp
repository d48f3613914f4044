#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kscale/centers.hpp"
#include "kscale/datagen.hpp"
#include "kscale/dataset.hpp"
#include "kscale/partition.hpp"
#include "kscale/seed.hpp"
#include "kscale/validity.hpp"

namespace kscale {

enum class Method { baseline_kmeans, imwk, imwk_rescaled, imwk_rescaled_kmeans };

inline constexpr Method all_methods[] = {Method::baseline_kmeans, Method::imwk, Method::imwk_rescaled,
                                         Method::imwk_rescaled_kmeans};

std::string_view method_name(Method method);
Method parse_method(std::string_view name);

/// p -> 1, 1.1 .. 2.0 in steps of 0.1, 2.5, 3.
std::vector<double> default_p_grid();

/// Seed key for an exponent, stable across platforms.
std::uint64_t exponent_key(double p);

struct EstimateOptions {
    KRange k_range{2, 20};
    std::size_t restarts = 100;
    std::uint64_t seed = 0;
    CenterSolverConfig centers;
};

/// Selection outcome of one index.
struct IndexOutcome {
    KSelectionReport report;
    std::vector<std::size_t> assignments;  ///< clustering at the selected K
};

/// Everything one method produced on one dataset.
struct MethodOutcome {
    Method method = Method::baseline_kmeans;
    double p = 2.0;
    KRange k_range;                    ///< candidate K actually searched
    std::size_t n_anomalous = 0;       ///< |C_init|; 0 for the baseline
    std::map<CviIndex, IndexOutcome> by_index;
    std::map<CviIndex, std::string> failures;  ///< per-index failure messages
};

/// Runs one method over its K range on standardized data and selects K per
/// index. The baseline ignores `p` (K-Medians for sil_manh, squared-Euclidean
/// K-Means otherwise). iMWK methods search [k_min, min(|C_init|, k_max)].
MethodOutcome estimate_k(const DataMatrix& data, Method method, double p, std::span<const CviIndex> indexes,
                         const EstimateOptions& options);

struct ExperimentConfig {
    std::vector<ScenarioSpec> scenarios;
    std::size_t replicates = 1;
    std::vector<Method> methods{std::begin(all_methods), std::end(all_methods)};
    std::vector<double> p_grid = default_p_grid();
    std::vector<CviIndex> indexes{std::begin(all_indexes), std::end(all_indexes)};
    std::size_t k_min = 2;
    std::size_t k_max = 20;
    std::size_t restarts = 100;
    std::uint64_t master_seed = 0;
    std::size_t threads = 0;  ///< 0 = hardware concurrency
    CenterSolverConfig centers;

    void validate() const;
};

struct ExperimentRecord {
    std::size_t scenario_index = 0;
    std::string scenario_id;
    std::size_t replicate = 0;
    Method method = Method::baseline_kmeans;
    std::optional<double> p;  ///< empty for the baseline
    CviIndex index = CviIndex::sil_eucl;
    std::optional<std::size_t> selected_k;
    std::size_t true_k = 0;
    std::optional<double> relative_error;
    std::optional<double> ari;
    double wall_time = 0.0;  ///< seconds spent on the (scenario, replicate, method, p) cell
    bool failed = false;
    std::string error;

    bool hit() const { return selected_k && *selected_k == true_k; }
};

/// Mean and standard error of a metric over non-failed records.
struct Summary {
    double mean = 0.0;
    double se = 0.0;
};

struct AggregateRow {
    std::string scenario;  ///< scenario id, or "all"
    Method method = Method::baseline_kmeans;
    std::optional<double> p;
    CviIndex index = CviIndex::sil_eucl;
    std::size_t n = 0;
    std::size_t n_failed = 0;
    Summary relative_error;
    Summary ari;
    Summary hit_rate;
};

struct ExperimentResult {
    std::vector<ExperimentRecord> records;
    std::vector<AggregateRow> aggregates;
};

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Generates every (scenario, replicate), runs each method and exponent,
/// and records the selected K per index. Records come back in a fixed order
/// independent of thread scheduling.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressCallback& progress = {});

std::vector<AggregateRow> aggregate(std::span<const ExperimentRecord> records);

/// Writes records.ndjson, timings.ndjson and tables/{re,ari,hit}_<scenario>.{csv,md}.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& out_dir);

}  // namespace kscale
