#include "commands.hpp"

#include "nbm/benchmark.hpp"
#include "nbm/error.hpp"
#include "nbm/model_io.hpp"
#include "nbm/rng.hpp"
#include "nbm/scada.hpp"
#include "nbm/tree.hpp"
#include "nbm/tuning.hpp"
#include "output.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <sstream>

namespace nbm::cli {

namespace {

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> items;
    std::string item;
    for (char c : text) {
        if (c == sep) {
            items.push_back(item);
            item.clear();
        } else {
            item.push_back(c);
        }
    }
    if (!item.empty()) items.push_back(item);
    return items;
}

double parse_number(const std::string& text, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0') {
        throw ConfigError("malformed number '" + text + "' in " + what);
    }
    return v;
}

HyperparamOverrides parse_hyperparams(const std::vector<std::string>& entries) {
    HyperparamOverrides overrides;
    for (const auto& entry : entries) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("hyperparameter override '" + entry + "' is not key=value");
        }
        const std::string key = entry.substr(0, eq);
        const std::string value = entry.substr(eq + 1);
        if (key == "weighting") {
            overrides[key] = split_weighting_from_string(value) == SplitWeighting::kPaper
                                 ? 0.0
                                 : 1.0;
        } else {
            overrides[key] = parse_number(value, "hyperparameter " + key);
        }
    }
    return overrides;
}

std::optional<std::size_t> resolve_single_target(const std::string& label) {
    if (label.empty()) return std::nullopt;
    for (std::size_t j = 0; j < kTargetLabels.size(); ++j) {
        if (label == kTargetLabels[j]) return j;
    }
    throw ConfigError("unknown target '" + label + "'");
}

SplitRatios make_ratios(double train, double validation, double test) {
    return SplitRatios{train, validation, test};
}

} // namespace

int run_generate(const GenerateArgs& args) {
    if (args.days < 1) throw ConfigError("generate: --days must be >= 1");
    if (args.out.empty()) throw ConfigError("generate: --out is required");

    SCADADataset dataset = generate_dataset(args.days, args.spec, args.wind, args.noise,
                                            args.seed);

    std::vector<std::uint8_t> labels;
    if (!args.fault_kind.empty()) {
        FaultSpec fault;
        fault.kind = fault_kind_from_string(args.fault_kind);
        fault.onset = args.fault_onset;
        fault.magnitude = args.fault_magnitude;
        fault.channel = channel_from_string(args.fault_channel);
        auto [faulty, fault_labels] = inject_fault(dataset, fault);
        dataset = std::move(faulty);
        labels = std::move(fault_labels);
    }

    std::ostringstream table;
    write_scada_table(dataset, table);
    write_text_atomic(args.out, table.str());
    write_text_atomic(args.out + ".meta",
                      format_generation_metadata(args.days, args.spec, args.wind, args.noise,
                                                 args.seed));

    if (!labels.empty()) {
        if (args.labels_out.empty()) {
            throw ConfigError("generate: --labels-out is required with --fault");
        }
        std::ostringstream label_table;
        write_label_table(dataset, labels, label_table);
        write_text_atomic(args.labels_out, label_table.str());
    }

    Manifest manifest("generate");
    manifest.set("days", static_cast<std::uint64_t>(args.days));
    manifest.set("seed", args.seed);
    manifest.set("rows", static_cast<std::uint64_t>(dataset.size()));
    manifest.set("rng", std::string(Rng::kAlgorithmTag));
    manifest.set("wind.weibull_shape", args.wind.weibull_shape);
    manifest.set("wind.weibull_scale", args.wind.weibull_scale);
    manifest.set("wind.ar1_rho", args.wind.ar1_rho);
    manifest.set("wind.direction_drift_deg", args.wind.direction_drift_deg);
    manifest.set("wind.wake_sector_center", args.wind.wake_sector_center);
    manifest.set("wind.wake_sector_width", args.wind.wake_sector_width);
    manifest.set("wind.wake_deficit", args.wind.wake_deficit);
    manifest.set("noise.power", args.noise.power);
    manifest.set("noise.rotor", args.noise.rotor);
    manifest.set("noise.generator", args.noise.generator);
    manifest.set("noise.current", args.noise.current);
    if (!args.fault_kind.empty()) {
        manifest.set("fault.kind", args.fault_kind);
        manifest.set("fault.onset", static_cast<std::uint64_t>(args.fault_onset));
        manifest.set("fault.magnitude", args.fault_magnitude);
        manifest.set("fault.channel", args.fault_channel);
    }
    manifest.write_next_to(args.out);

    std::cerr << "generated " << dataset.size() << " rows -> " << args.out << "\n";
    return 0;
}

int run_train(const TrainArgs& args) {
    if (args.data.empty() || args.out.empty()) {
        throw ConfigError("train: --data and --out are required");
    }

    // Validate every flag before touching the filesystem.
    const Family family = family_from_string(args.family);
    const DirectionMode mode = direction_mode_from_string(args.direction_mode);
    const SplitMode split_mode = split_mode_from_string(args.split_mode);
    const auto single_target = resolve_single_target(args.single_target);
    const auto overrides = parse_hyperparams(args.hyperparams);

    const SCADADataset dataset = read_scada_file(args.data);

    const PreparedData prepared = prepare_dataset(
        dataset, mode, make_ratios(args.split_train, args.split_validation, args.split_test),
        split_mode, args.seed);
    if (prepared.input_norm.any_zero_variance() || prepared.target_norm.any_zero_variance()) {
        std::cerr << "warning: zero-variance column in training split; std forced to 1\n";
    }

    const auto model =
        train_family(family, prepared, single_target, overrides, args.seed, args.threads);
    const std::size_t bytes = save_model_file(*model, args.out);

    Manifest manifest("train");
    manifest.set("data", args.data);
    manifest.set("family", args.family);
    manifest.set("seed", args.seed);
    manifest.set("direction_mode", args.direction_mode);
    manifest.set("split.train", args.split_train);
    manifest.set("split.validation", args.split_validation);
    manifest.set("split.test", args.split_test);
    manifest.set("split.mode", args.split_mode);
    if (!args.single_target.empty()) manifest.set("single_target", args.single_target);
    for (const auto& [key, value] : overrides) manifest.set("hp." + key, value);
    manifest.write_next_to(args.out);

    std::cerr << "trained " << args.family << " model (" << bytes << " bytes) -> " << args.out
              << "\n";
    return 0;
}

int run_evaluate(const EvaluateArgs& args) {
    if (args.data.empty() || args.model.empty() || args.out.empty()) {
        throw ConfigError("evaluate: --data, --model and --out are required");
    }

    const SCADADataset dataset = read_scada_file(args.data);
    const auto model = load_model_file(args.model);
    const EvalReport report = evaluate_on_test(*model, dataset);
    write_text_atomic(args.out, render_eval_report(report));

    if (!args.qq_out.empty()) {
        const auto target = resolve_single_target(args.qq_target);
        std::size_t column = 0;
        if (model->target_count() > 1) {
            column = *target;
        } else if (model->metadata().target_labels.front() != args.qq_target) {
            throw ConfigError("qq target '" + args.qq_target +
                              "' not predicted by this model");
        }
        write_text_atomic(args.qq_out,
                          render_qq_table(*model, dataset, column, args.qq_count));
    }

    Manifest manifest("evaluate");
    manifest.set("data", args.data);
    manifest.set("model", args.model);
    manifest.set("family", report.family);
    manifest.set("test_rows", static_cast<std::uint64_t>(report.evaluated_rows));
    manifest.write_next_to(args.out);

    std::cerr << "evaluated " << report.evaluated_rows << " test rows -> " << args.out << "\n";
    return 0;
}

int run_benchmark(const BenchmarkArgs& args) {
    if (args.data.empty() || args.out.empty()) {
        throw ConfigError("benchmark: --data and --out are required");
    }

    std::vector<Family> families;
    for (const auto& name : split_list(args.families, ',')) {
        families.push_back(family_from_string(name));
    }
    if (families.empty()) throw ConfigError("benchmark: --families is empty");

    const SCADADataset dataset = read_scada_file(args.data);
    BenchmarkOptions options;
    options.direction_mode = direction_mode_from_string(args.direction_mode);
    options.threads = args.threads;

    const BenchmarkReport report = benchmark_matrix(dataset, families, args.seed, options);
    write_text_atomic(args.out, render_benchmark_report(report));

    Manifest manifest("benchmark");
    manifest.set("data", args.data);
    manifest.set("seed", args.seed);
    manifest.set("families", args.families);
    manifest.set("direction_mode", args.direction_mode);
    manifest.write_next_to(args.out);

    std::cerr << "benchmark (" << families.size() << " families) -> " << args.out << "\n";
    return 0;
}

int run_tune(const TuneArgs& args) {
    if (args.data.empty() || args.out.empty()) {
        throw ConfigError("tune: --data and --out are required");
    }
    if (args.grid.empty()) {
        throw ConfigError("tune: at least one --grid axis is required");
    }

    GridSpec grid;
    grid.family = family_from_string(args.family);
    grid.cap = args.cap;
    for (const auto& entry : args.grid) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("grid axis '" + entry + "' is not name=v1,v2,...");
        }
        std::vector<double> values;
        for (const auto& v : split_list(entry.substr(eq + 1), ',')) {
            values.push_back(parse_number(v, "grid axis " + entry.substr(0, eq)));
        }
        grid.axes.emplace_back(entry.substr(0, eq), std::move(values));
    }

    const SCADADataset dataset = read_scada_file(args.data);
    const PreparedData prepared = prepare_dataset(
        dataset, direction_mode_from_string(args.direction_mode), SplitRatios{});

    const TuneResult result = grid_search(grid, prepared, resolve_single_target(args.single_target),
                                          args.seed, args.threads);
    write_text_atomic(args.out, render_tune_report(grid, result));

    // Wall times are informational only; keep the report file deterministic.
    double total_seconds = 0.0;
    for (const auto& entry : result.table) total_seconds += entry.fit_seconds;

    Manifest manifest("tune");
    manifest.set("data", args.data);
    manifest.set("family", args.family);
    manifest.set("seed", args.seed);
    manifest.set("combinations", static_cast<std::uint64_t>(result.table.size()));
    manifest.write_next_to(args.out);

    std::cerr << "tuned " << result.table.size() << " configs in " << total_seconds
              << " s total fit time -> " << args.out << "\n";
    return 0;
}

int run_detect(const DetectArgs& args) {
    if (args.data.empty() || args.model.empty() || args.out.empty()) {
        throw ConfigError("detect: --data, --model and --out are required");
    }

    ScanRegion region;
    if (args.scan == "test") {
        region = ScanRegion::kTest;
    } else if (args.scan == "validation") {
        region = ScanRegion::kValidation;
    } else if (args.scan == "all") {
        region = ScanRegion::kAll;
    } else {
        throw ConfigError("detect: --scan must be test, validation, or all");
    }

    const SCADADataset dataset = read_scada_file(args.data);
    const auto model = load_model_file(args.model);
    const DetectionRun run = run_detection(*model, dataset, args.tau, args.window, region);
    write_text_atomic(args.out, render_anomaly_report(run, dataset,
                                                      model->metadata().target_labels,
                                                      args.tau, args.window));

    Manifest manifest("detect");
    manifest.set("data", args.data);
    manifest.set("model", args.model);
    manifest.set("tau", args.tau);
    manifest.set("window", static_cast<std::uint64_t>(args.window));
    manifest.set("scan", args.scan);
    manifest.set("events", static_cast<std::uint64_t>(run.events.size()));
    manifest.write_next_to(args.out);

    std::cerr << "detected " << run.events.size() << " events over " << run.scan_rows
              << " rows -> " << args.out << "\n";
    return 0;
}

} // namespace nbm::cli
