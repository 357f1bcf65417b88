#pragma once

#include "nbm/pipeline.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nbm {

/// Cartesian hyperparameter grid for one model family. Axis order is the
/// declaration order; it fixes both enumeration and lexicographic
/// tie-breaking.
struct GridSpec {
    Family family = Family::kTree;
    std::vector<std::pair<std::string, std::vector<double>>> axes;
    std::size_t cap = 10000;

    std::size_t combination_count() const;
    void validate() const;
};

struct TuneEntry {
    std::vector<std::pair<std::string, double>> config; ///< axis order
    double validation_rmse = 0.0;
    double fit_seconds = 0.0; ///< wall time; informational, not reproducible
};

/// Ranked ascending by RMSE, ties by lexicographic config order.
struct TuneResult {
    std::vector<TuneEntry> table;
    const TuneEntry& best() const { return table.front(); }
};

/// Trains one model per grid point (same seed for every point), scores
/// validation-split global RMSE, and returns the fully ranked table. The
/// result is identical for any thread count.
TuneResult grid_search(const GridSpec& grid, const PreparedData& prepared,
                       std::optional<std::size_t> single_target, std::uint64_t seed,
                       std::size_t threads = 1);

/// Delimited text report (deterministic: the wall-time column is omitted).
std::string render_tune_report(const GridSpec& grid, const TuneResult& result);

} // namespace nbm
