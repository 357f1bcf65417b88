#pragma once

#include "nbm/detect.hpp"
#include "nbm/pipeline.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace nbm {

/// Test-split accuracies of one model, in normalized target units.
struct EvalReport {
    std::string family;
    std::vector<std::string> target_labels;
    std::vector<double> per_target_rmse;
    double global = 0.0;
    std::size_t evaluated_rows = 0;
};

/// Rebuilds the design matrices with the model's stored direction mode and
/// normalizers, re-derives the split, and scores the test rows.
EvalReport evaluate_on_test(const Regressor& model, const SCADADataset& dataset);

/// Structured key=value rendering of an EvalReport.
std::string render_eval_report(const EvalReport& report);

/// Two-column QQ table (predicted vs observed quantiles) for one target on
/// the test split.
std::string render_qq_table(const Regressor& model, const SCADADataset& dataset,
                            std::size_t target, std::size_t quantile_count);

enum class ScanRegion { kTest, kValidation, kAll };

/// Residual-based anomaly detection: residual statistics are fitted on the
/// validation rows (fault-free reference), rows in the scan region are
/// z-scored against them. Requires a chronological split (persistence runs
/// need contiguous rows). Event rows are absolute dataset indices.
struct DetectionRun {
    std::vector<AnomalyEvent> events;
    ResidualStats stats;
    std::size_t scan_begin = 0; ///< absolute index of the first scanned row
    std::size_t scan_rows = 0;
    std::size_t flagged_rows = 0; ///< rows covered by events, all targets
};

DetectionRun run_detection(const Regressor& model, const SCADADataset& dataset, double tau,
                           std::size_t w, ScanRegion region = ScanRegion::kTest);

std::string render_anomaly_report(const DetectionRun& run, const SCADADataset& dataset,
                                  const std::vector<std::string>& target_labels, double tau,
                                  std::size_t w);

/// One family's row of the multi-target accuracy table.
struct BenchmarkRow {
    Family family = Family::kTree;
    double global = 0.0;
    std::array<double, 4> per_target{};
};

/// Single-target power section plus the multi-vs-single comparison.
struct BenchmarkSingleRow {
    Family family = Family::kTree;
    double single_rmse = 0.0;
    double multi_power_rmse = 0.0;

    double delta() const { return multi_power_rmse - single_rmse; }
};

struct BenchmarkReport {
    std::vector<BenchmarkRow> multi;
    std::vector<BenchmarkSingleRow> single_power;
};

struct BenchmarkOptions {
    DirectionMode direction_mode = DirectionMode::kCosOnly;
    SplitRatios ratios;
    std::size_t threads = 1;
};

/// Trains every requested family in multi-target form and in single-target
/// power form at the published default architectures, then scores the test
/// split. Per-family seeds derive from the root seed, so family subsets
/// reproduce the full run's numbers.
BenchmarkReport benchmark_matrix(const SCADADataset& dataset, std::span<const Family> families,
                                 std::uint64_t seed, const BenchmarkOptions& options = {});

/// Delimited text tables: multi-target block and single-target power block.
std::string render_benchmark_report(const BenchmarkReport& report);

} // namespace nbm
