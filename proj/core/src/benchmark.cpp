#include "nbm/benchmark.hpp"

#include "nbm/error.hpp"
#include "nbm/metrics.hpp"
#include "nbm/rng.hpp"
#include "nbm/scada.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace nbm {

namespace {

constexpr std::uint64_t kMultiSeedStream = 100;
constexpr std::uint64_t kSingleSeedStream = 200;

struct ModelView {
    Matrix x_norm;      ///< normalized inputs for the whole dataset
    Matrix y_norm;      ///< normalized targets (model's target set)
    SplitPlan plan;
};

/// Applies the model's stored preprocessing to a (possibly different)
/// dataset of the same schema.
ModelView view_through_model(const Regressor& model, const SCADADataset& dataset) {
    const ModelMetadata& meta = model.metadata();
    const DesignMatrices design = build_design_matrices(dataset, meta.direction_mode);

    ModelView view;
    view.x_norm = apply_normalizer(design.X, meta.input_norm);

    if (meta.target_norm.column_count() == design.Y.cols()) {
        view.y_norm = apply_normalizer(design.Y, meta.target_norm);
    } else if (meta.target_norm.column_count() == 1) {
        // Single-target model: find the stored label among the channels.
        const auto& label = meta.target_norm.labels.front();
        std::size_t column = kTargetLabels.size();
        for (std::size_t j = 0; j < kTargetLabels.size(); ++j) {
            if (label == kTargetLabels[j]) column = j;
        }
        if (column == kTargetLabels.size()) {
            throw ConfigError("model targets unknown channel '" + label + "'");
        }
        Matrix y(design.Y.rows(), 1);
        for (std::size_t i = 0; i < y.rows(); ++i) y(i, 0) = design.Y(i, column);
        view.y_norm = apply_normalizer(y, meta.target_norm);
    } else {
        throw ConfigError("model target count does not match the dataset schema");
    }

    view.plan = split_rows(design.X.rows(), meta.split, meta.split_mode, meta.split_seed);
    return view;
}

std::string format_fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

} // namespace

EvalReport evaluate_on_test(const Regressor& model, const SCADADataset& dataset) {
    const ModelView view = view_through_model(model, dataset);
    const Matrix test_x = view.x_norm.take_rows(view.plan.test);
    const Matrix test_y = view.y_norm.take_rows(view.plan.test);

    const Matrix pred = predict_batch(model, test_x);

    EvalReport report;
    report.family = model.metadata().family;
    report.target_labels = model.metadata().target_labels;
    report.per_target_rmse = rmse_per_target(pred, test_y);
    report.global = global_rmse(pred, test_y);
    report.evaluated_rows = test_x.rows();
    return report;
}

std::string render_eval_report(const EvalReport& report) {
    std::ostringstream out;
    out << "family=" << report.family << '\n';
    out << "test_rows=" << report.evaluated_rows << '\n';
    out << "global_rmse=" << format_fixed(report.global) << '\n';
    for (std::size_t t = 0; t < report.per_target_rmse.size(); ++t) {
        out << "rmse." << report.target_labels[t] << '='
            << format_fixed(report.per_target_rmse[t]) << '\n';
    }
    return out.str();
}

std::string render_qq_table(const Regressor& model, const SCADADataset& dataset,
                            std::size_t target, std::size_t quantile_count) {
    if (target >= model.target_count()) {
        throw ConfigError("qq table: target index out of range");
    }
    const ModelView view = view_through_model(model, dataset);
    const Matrix test_x = view.x_norm.take_rows(view.plan.test);
    const Matrix test_y = view.y_norm.take_rows(view.plan.test);
    const Matrix pred = predict_batch(model, test_x);

    const auto pairs = qq_pairs(pred.column(target), test_y.column(target), quantile_count);

    std::ostringstream out;
    out << "predicted_quantile,observed_quantile\n";
    for (const auto& [p, o] : pairs) {
        out << format_double(p) << ',' << format_double(o) << '\n';
    }
    return out.str();
}

DetectionRun run_detection(const Regressor& model, const SCADADataset& dataset, double tau,
                           std::size_t w, ScanRegion region) {
    if (model.metadata().split_mode != SplitMode::kChronological) {
        throw ConfigError("run_detection: needs a chronologically split model");
    }

    const ModelView view = view_through_model(model, dataset);

    const auto residuals_over = [&](const std::vector<std::size_t>& rows) {
        const Matrix x = view.x_norm.take_rows(rows);
        const Matrix y = view.y_norm.take_rows(rows);
        return residual_series(predict_batch(model, x), y);
    };

    const ResidualStats stats = fit_residual_stats(residuals_over(view.plan.validation));

    std::vector<std::size_t> scan_rows;
    switch (region) {
        case ScanRegion::kTest: scan_rows = view.plan.test; break;
        case ScanRegion::kValidation: scan_rows = view.plan.validation; break;
        case ScanRegion::kAll:
            scan_rows.resize(view.x_norm.rows());
            for (std::size_t i = 0; i < scan_rows.size(); ++i) scan_rows[i] = i;
            break;
    }

    DetectionRun run;
    run.stats = stats;
    run.scan_begin = scan_rows.empty() ? 0 : scan_rows.front();
    run.scan_rows = scan_rows.size();
    run.events = detect_anomalies(residuals_over(scan_rows), stats, tau, w);

    for (AnomalyEvent& event : run.events) {
        event.start += run.scan_begin;
        event.end += run.scan_begin;
        run.flagged_rows += event.length();
    }
    return run;
}

std::string render_anomaly_report(const DetectionRun& run, const SCADADataset& dataset,
                                  const std::vector<std::string>& target_labels, double tau,
                                  std::size_t w) {
    std::ostringstream out;
    out << "# Anomaly events, tau=" << format_double(tau) << ", w=" << w << '\n';
    out << "# scanned rows " << run.scan_begin << ".." << run.scan_begin + run.scan_rows - 1
        << '\n';
    out << "target,start_row,end_row,start_timestamp,end_timestamp,length,peak_abs_z,mean_abs_z\n";
    for (const AnomalyEvent& e : run.events) {
        out << target_labels[e.target] << ',' << e.start << ',' << e.end << ','
            << dataset.records[e.start].timestamp << ',' << dataset.records[e.end].timestamp
            << ',' << e.length() << ',' << format_fixed(e.peak_abs_z) << ','
            << format_fixed(e.mean_abs_z) << '\n';
    }
    return out.str();
}

BenchmarkReport benchmark_matrix(const SCADADataset& dataset, std::span<const Family> families,
                                 std::uint64_t seed, const BenchmarkOptions& options) {
    if (dataset.size() < 1000) {
        throw ConfigError("benchmark_matrix: need at least 1000 rows, got " +
                          std::to_string(dataset.size()));
    }

    const PreparedData prepared =
        prepare_dataset(dataset, options.direction_mode, options.ratios);
    const Matrix test_x = prepared.test_x();
    const Matrix test_y = prepared.test_y();
    Matrix test_power(test_y.rows(), 1);
    for (std::size_t i = 0; i < test_y.rows(); ++i) test_power(i, 0) = test_y(i, 0);

    BenchmarkReport report;
    for (std::size_t f = 0; f < families.size(); ++f) {
        const Family family = families[f];
        const auto family_index = static_cast<std::uint64_t>(family);

        const auto multi = train_family(family, prepared, std::nullopt, {},
                                        mix_seed(seed, kMultiSeedStream + family_index),
                                        options.threads);
        const Matrix pred = predict_batch(*multi, test_x);
        BenchmarkRow row;
        row.family = family;
        row.global = global_rmse(pred, test_y);
        const auto per_target = rmse_per_target(pred, test_y);
        std::copy(per_target.begin(), per_target.end(), row.per_target.begin());
        report.multi.push_back(row);

        const auto single = train_family(family, prepared, std::size_t{0}, {},
                                         mix_seed(seed, kSingleSeedStream + family_index),
                                         options.threads);
        BenchmarkSingleRow srow;
        srow.family = family;
        srow.single_rmse =
            global_rmse(predict_batch(*single, test_x), test_power);
        srow.multi_power_rmse = row.per_target[0];
        report.single_power.push_back(srow);
    }
    return report;
}

std::string render_benchmark_report(const BenchmarkReport& report) {
    std::ostringstream out;
    out << "# Multi-target accuracies (test set, normalized units)\n";
    out << "model,global_rmse,active_power,rotor_speed,generator_speed,current\n";
    for (const BenchmarkRow& row : report.multi) {
        out << to_string(row.family) << ',' << format_fixed(row.global);
        for (double v : row.per_target) out << ',' << format_fixed(v);
        out << '\n';
    }
    out << '\n';
    out << "# Single-target active power accuracies (test set, normalized units)\n";
    out << "model,rmse,multi_minus_single\n";
    for (const BenchmarkSingleRow& row : report.single_power) {
        out << to_string(row.family) << ',' << format_fixed(row.single_rmse) << ','
            << format_fixed(row.delta()) << '\n';
    }
    return out.str();
}

} // namespace nbm
