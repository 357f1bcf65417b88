#include "commands.hpp"

#include "nbm/error.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <exception>
#include <fstream>
#include <iostream>
#include <utility>
#include <vector>

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 1;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw nbm::ConfigError("cannot open config file: " + path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw nbm::ConfigError(path + ":" + std::to_string(line_no) +
                                   ": expected key=value");
        }
        entries.emplace_back(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    }
    return entries;
}

void add_config_flag(CLI::App* cmd) {
    // Consumed by merge_config_args before the CLI11 parse; registered here
    // so it appears in --help and is accepted as a flag.
    cmd->add_option("--config", "Config file (key=value lines, # comments)");
}

/// Expands `--config FILE` into explicit options ahead of the command-line
/// flags, so flags given on the command line override file values. Unknown
/// config keys are rejected against the subcommand's option table.
std::vector<std::string> merge_config_args(CLI::App& app, std::vector<std::string> args) {
    if (args.empty() || args.front().empty() || args.front().front() == '-') return args;
    const std::string subcommand = args.front();

    std::string config_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw nbm::ConfigError("--config needs a file path");
            config_path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        }
    }
    if (config_path.empty()) return args;

    CLI::App* sub = app.get_subcommand_no_throw(subcommand);
    if (sub == nullptr) return args; // let the normal parse report it

    std::vector<std::string> merged{subcommand};
    for (const auto& [key, value] : read_config_file(config_path)) {
        if (key == "config") throw nbm::ConfigError("config files cannot nest");
        const CLI::Option* option = sub->get_option_no_throw("--" + key);
        if (option == nullptr) {
            throw nbm::ConfigError("unknown config key '" + key + "' for subcommand " +
                                   subcommand);
        }
        merged.push_back("--" + key);
        merged.push_back(value);
    }
    merged.insert(merged.end(), args.begin() + 1, args.end());
    return merged;
}

/// Scalar options take the last occurrence, so command-line flags override
/// config-file values instead of tripping a duplicate error.
void allow_overrides(CLI::App& app) {
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        for (CLI::Option* option : sub->get_options()) {
            if (option->get_expected_min() == 1 && option->get_expected_max() == 1) {
                option->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
            }
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-target normal behaviour models for wind turbine condition monitoring"};
    app.require_subcommand(1);

    nbm::cli::GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate a synthetic SCADA dataset");
    add_config_flag(generate);
    generate->add_option("--days", gen.days, "Days of 10-minute records (144/day)");
    generate->add_option("--seed", gen.seed, "Generator seed")->required();
    generate->add_option("--out", gen.out, "Output dataset path")->required();
    generate->add_option("--weibull-shape", gen.wind.weibull_shape, "Wind Weibull shape");
    generate->add_option("--weibull-scale", gen.wind.weibull_scale, "Wind Weibull scale [m/s]");
    generate->add_option("--ar1-rho", gen.wind.ar1_rho, "Lag-1 wind correlation [0,1)");
    generate->add_option("--direction-drift", gen.wind.direction_drift_deg,
                         "Direction walk step std [deg]");
    generate->add_option("--wake-center", gen.wind.wake_sector_center, "Wake sector center [deg]");
    generate->add_option("--wake-width", gen.wind.wake_sector_width, "Wake sector width [deg]");
    generate->add_option("--wake-deficit", gen.wind.wake_deficit, "Wake power deficit fraction");
    generate->add_option("--noise-power", gen.noise.power, "Power noise sigma (fraction of rated)");
    generate->add_option("--noise-rotor", gen.noise.rotor, "Rotor noise sigma");
    generate->add_option("--noise-generator", gen.noise.generator, "Generator noise sigma");
    generate->add_option("--noise-current", gen.noise.current, "Current noise sigma");
    generate->add_option("--fault", gen.fault_kind,
                         "Inject fault: power-derate | rotor-bias | stuck-sensor");
    generate->add_option("--fault-onset", gen.fault_onset, "First affected row");
    generate->add_option("--fault-magnitude", gen.fault_magnitude,
                         "Derate fraction or bias rpm");
    generate->add_option("--fault-channel", gen.fault_channel, "Stuck-sensor channel");
    generate->add_option("--labels-out", gen.labels_out, "Fault label table path");

    nbm::cli::TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train a normal behaviour model");
    add_config_flag(train_cmd);
    train_cmd->add_option("--data", train.data, "SCADA dataset path")->required();
    train_cmd->add_option("--family", train.family, "tree | forest | knn | mlp")->required();
    train_cmd->add_option("--out", train.out, "Model file path")->required();
    train_cmd->add_option("--seed", train.seed, "Training seed")->required();
    train_cmd->add_option("--direction-mode", train.direction_mode, "cos | sincos");
    train_cmd->add_option("--split-train", train.split_train, "Train fraction");
    train_cmd->add_option("--split-validation", train.split_validation, "Validation fraction");
    train_cmd->add_option("--split-test", train.split_test, "Test fraction");
    train_cmd->add_option("--split-mode", train.split_mode, "chronological | shuffled");
    train_cmd->add_option("--single-target", train.single_target,
                          "Train the n=1 model for one channel (e.g. active_power)");
    train_cmd->add_option("--hp", train.hyperparams, "Hyperparameter override key=value")
        ->take_all();
    train_cmd->add_option("--threads", train.threads, "Forest fitting threads");

    nbm::cli::EvaluateArgs eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score a model on its test split");
    add_config_flag(eval_cmd);
    eval_cmd->add_option("--data", eval.data, "SCADA dataset path")->required();
    eval_cmd->add_option("--model", eval.model, "Model file path")->required();
    eval_cmd->add_option("--out", eval.out, "Report path")->required();
    eval_cmd->add_option("--qq-out", eval.qq_out, "QQ pair table path");
    eval_cmd->add_option("--qq-target", eval.qq_target, "QQ target channel");
    eval_cmd->add_option("--qq-count", eval.qq_count, "QQ quantile count");

    nbm::cli::BenchmarkArgs bench;
    auto* bench_cmd =
        app.add_subcommand("benchmark", "Multi- vs single-target accuracy matrix");
    add_config_flag(bench_cmd);
    bench_cmd->add_option("--data", bench.data, "SCADA dataset path")->required();
    bench_cmd->add_option("--out", bench.out, "Report path")->required();
    bench_cmd->add_option("--seed", bench.seed, "Root seed")->required();
    bench_cmd->add_option("--families", bench.families, "Comma list of families");
    bench_cmd->add_option("--direction-mode", bench.direction_mode, "cos | sincos");
    bench_cmd->add_option("--threads", bench.threads, "Forest fitting threads");

    nbm::cli::TuneArgs tune;
    auto* tune_cmd = app.add_subcommand("tune", "Grid search on the validation split");
    add_config_flag(tune_cmd);
    tune_cmd->add_option("--data", tune.data, "SCADA dataset path")->required();
    tune_cmd->add_option("--family", tune.family, "tree | forest | knn | mlp")->required();
    tune_cmd->add_option("--out", tune.out, "Report path")->required();
    tune_cmd->add_option("--seed", tune.seed, "Training seed")->required();
    tune_cmd->add_option("--grid", tune.grid, "Axis name=v1,v2,... (repeatable)")->take_all();
    tune_cmd->add_option("--single-target", tune.single_target, "Tune the n=1 model");
    tune_cmd->add_option("--direction-mode", tune.direction_mode, "cos | sincos");
    tune_cmd->add_option("--cap", tune.cap, "Max grid combinations");
    tune_cmd->add_option("--threads", tune.threads, "Parallel grid points");

    nbm::cli::DetectArgs detect;
    auto* detect_cmd = app.add_subcommand("detect", "Residual-based anomaly detection");
    add_config_flag(detect_cmd);
    detect_cmd->add_option("--data", detect.data, "SCADA dataset path")->required();
    detect_cmd->add_option("--model", detect.model, "Model file path")->required();
    detect_cmd->add_option("--out", detect.out, "Event report path")->required();
    detect_cmd->add_option("--tau", detect.tau, "z-score threshold");
    detect_cmd->add_option("--window", detect.window, "Persistence window (rows)");
    detect_cmd->add_option("--scan", detect.scan, "test | validation | all");

    allow_overrides(app);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = merge_config_args(app, std::move(args));
        std::reverse(args.begin(), args.end()); // CLI11 consumes from the back
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints help/error
        return code == 0 ? 0 : kExitUsage;
    } catch (const nbm::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*generate) return nbm::cli::run_generate(gen);
        if (*train_cmd) return nbm::cli::run_train(train);
        if (*eval_cmd) return nbm::cli::run_evaluate(eval);
        if (*bench_cmd) return nbm::cli::run_benchmark(bench);
        if (*tune_cmd) return nbm::cli::run_tune(tune);
        if (*detect_cmd) return nbm::cli::run_detect(detect);
    } catch (const nbm::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
