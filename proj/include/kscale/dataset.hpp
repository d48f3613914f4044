#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kscale/grid.hpp"

namespace kscale {

/// N x V table of entities by features. Immutable once built.
///
/// Construction rejects non-finite values and shapes with fewer than two
/// entities or no features. The `standardized` flag records whether the
/// values went through range standardization (or were derived from data that
/// did, as with re-scaled views).
class DataMatrix {
public:
    DataMatrix(std::size_t n_entities, std::size_t n_features, std::vector<double> values,
               bool standardized = false);

    /// Builds from a list of equally sized rows.
    static DataMatrix from_rows(const std::vector<std::vector<double>>& rows, bool standardized = false);

    std::size_t n_entities() const noexcept { return n_; }
    std::size_t n_features() const noexcept { return v_; }
    bool standardized() const noexcept { return standardized_; }

    double operator()(std::size_t i, std::size_t v) const { return values_[i * v_ + v]; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * v_, v_}; }
    std::vector<double> column(std::size_t v) const;
    const std::vector<double>& values() const noexcept { return values_; }

    friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

private:
    std::size_t n_;
    std::size_t v_;
    std::vector<double> values_;
    bool standardized_;
};

/// Data plus optional ground-truth cluster ids read from a `label` column.
struct LabeledData {
    DataMatrix data;
    std::optional<std::vector<int>> labels;
    std::vector<std::string> feature_names;
};

/// Per-feature (y - mean) / (max - min). Constant features become all zeros
/// and are reported through `constant_features` (and a warning on stderr).
DataMatrix standardize_range(const DataMatrix& raw, std::vector<std::size_t>* constant_features = nullptr);

/// Returns `data` unchanged when already standardized, otherwise its
/// standardized copy. Every clustering entry point funnels through this.
DataMatrix ensure_standardized(const DataMatrix& data);

/// True when the first line of the file has a cell that is not a number.
bool csv_has_header(const std::filesystem::path& path);

LabeledData read_labeled_csv(const std::filesystem::path& path, bool has_header);
DataMatrix read_csv(const std::filesystem::path& path, bool has_header);

/// Writes with 17 significant digits, so read_csv recovers every value exactly.
void write_csv(const DataMatrix& data, const std::filesystem::path& path,
               const std::vector<int>* labels = nullptr,
               const std::vector<std::string>* feature_names = nullptr);

}  // namespace kscale
