#pragma once

#include "nbm/pipeline.hpp"
#include "nbm/synth.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nbm::cli {

struct GenerateArgs {
    std::size_t days = 365;
    std::uint64_t seed = 0;
    std::string out;
    TurbineSpec spec;
    WindFieldConfig wind;
    NoiseConfig noise;
    std::string fault_kind;     ///< empty = clean run
    std::size_t fault_onset = 0;
    double fault_magnitude = 0.1;
    std::string fault_channel = "rotor_speed";
    std::string labels_out;
};

struct TrainArgs {
    std::string data;
    std::string family = "tree";
    std::string out;
    std::uint64_t seed = 0;
    std::string direction_mode = "cos";
    double split_train = 0.6;
    double split_validation = 0.2;
    double split_test = 0.2;
    std::string split_mode = "chronological";
    std::string single_target; ///< empty = multi-target
    std::vector<std::string> hyperparams; ///< key=value entries
    std::size_t threads = 1;
};

struct EvaluateArgs {
    std::string data;
    std::string model;
    std::string out;
    std::string qq_out;
    std::string qq_target = "active_power";
    std::size_t qq_count = 100;
};

struct BenchmarkArgs {
    std::string data;
    std::string out;
    std::uint64_t seed = 0;
    std::string families = "tree,forest,knn,mlp";
    std::string direction_mode = "cos";
    std::size_t threads = 1;
};

struct TuneArgs {
    std::string data;
    std::string family = "tree";
    std::string out;
    std::uint64_t seed = 0;
    std::vector<std::string> grid; ///< axis entries "name=v1,v2,..."
    std::string single_target;
    std::string direction_mode = "cos";
    std::size_t cap = 10000;
    std::size_t threads = 1;
};

struct DetectArgs {
    std::string data;
    std::string model;
    std::string out;
    double tau = 3.0;
    std::size_t window = 6;
    std::string scan = "test";
};

int run_generate(const GenerateArgs& args);
int run_train(const TrainArgs& args);
int run_evaluate(const EvaluateArgs& args);
int run_benchmark(const BenchmarkArgs& args);
int run_tune(const TuneArgs& args);
int run_detect(const DetectArgs& args);

} // namespace nbm::cli
