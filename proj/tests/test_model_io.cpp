#include "nbm/error.hpp"
#include "nbm/knn.hpp"
#include "nbm/mlp.hpp"
#include "nbm/model_io.hpp"
#include "nbm/pipeline.hpp"
#include "nbm/synth.hpp"
#include "nbm/tree.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <sstream>

using namespace nbm;

namespace {

/// Small trained model of each family over a shared synthetic dataset.
std::unique_ptr<Regressor> make_model(Family family) {
    static const SCADADataset dataset = generate_dataset(4, {}, {}, {}, 77);
    static const PreparedData prepared =
        prepare_dataset(dataset, DirectionMode::kCosOnly, SplitRatios{});
    HyperparamOverrides overrides;
    if (family == Family::kForest) overrides["tree_count"] = 5.0;
    if (family == Family::kMlp) {
        overrides["max_epochs"] = 3.0;
        overrides["hidden1"] = 6.0;
        overrides["hidden2"] = 0.0;
        overrides["hidden3"] = 0.0;
    }
    return train_family(family, prepared, std::nullopt, overrides, 5);
}

std::string serialize(const Regressor& model) {
    std::ostringstream out;
    save_model(model, out);
    return out.str();
}

} // namespace

TEST_CASE("save/load: round trip predicts bit-identically for every family") {
    Rng rng(50);
    for (Family family : kAllFamilies) {
        const auto model = make_model(family);
        const std::string bytes = serialize(*model);

        std::istringstream in(bytes);
        const auto loaded = load_model(in);

        CHECK(loaded->metadata().family == to_string(family));
        CHECK(loaded->input_count() == model->input_count());
        CHECK(loaded->target_count() == model->target_count());

        for (int q = 0; q < 200; ++q) {
            std::vector<double> x{rng.gaussian(), rng.gaussian()};
            CHECK(model->predict_row(x) == loaded->predict_row(x));
        }
    }
}

TEST_CASE("save: deterministic byte output") {
    const auto model = make_model(Family::kTree);
    CHECK(serialize(*model) == serialize(*model));
}

TEST_CASE("save/load: metadata fields survive the round trip") {
    const auto model = make_model(Family::kKnn);
    std::istringstream in(serialize(*model));
    const auto loaded = load_model(in);
    const auto& meta = loaded->metadata();
    CHECK(meta.seed == 5);
    CHECK(meta.direction_mode == DirectionMode::kCosOnly);
    CHECK(meta.split.train == 0.6);
    CHECK(meta.target_labels ==
          std::vector<std::string>{"active_power", "rotor_speed", "generator_speed", "current"});
    CHECK(meta.input_norm.column_count() == 2);
    CHECK(meta.input_norm.mean == model->metadata().input_norm.mean);
    CHECK(meta.target_norm.std_dev == model->metadata().target_norm.std_dev);
    CHECK(meta.hyperparams.at("k") == "45");
}

TEST_CASE("load: format version mismatch is rejected") {
    const auto model = make_model(Family::kTree);
    std::string bytes = serialize(*model);
    const auto pos = bytes.find("format_version=1");
    REQUIRE(pos != std::string::npos);
    bytes.replace(pos, 16, "format_version=9");
    // Metadata block length is unchanged (same byte count).
    std::istringstream in(bytes);
    CHECK_THROWS_WITH_AS(load_model(in), doctest::Contains("format version"), IoError);
}

TEST_CASE("load: bad magic is rejected") {
    std::istringstream in("XXXX????");
    CHECK_THROWS_WITH_AS(load_model(in), doctest::Contains("magic"), IoError);
}

TEST_CASE("load: truncation reported with a byte offset") {
    const auto model = make_model(Family::kTree);
    const std::string bytes = serialize(*model);
    const std::string truncated = bytes.substr(0, bytes.size() - 7);
    std::istringstream in(truncated);
    CHECK_THROWS_WITH_AS(load_model(in), doctest::Contains("offset"), IoError);
}

TEST_CASE("load: trailing garbage is rejected") {
    const auto model = make_model(Family::kKnn);
    std::istringstream in(serialize(*model) + "junk");
    CHECK_THROWS_WITH_AS(load_model(in), doctest::Contains("trailing"), IoError);
}

TEST_CASE("save_model returns the exact byte count") {
    const auto model = make_model(Family::kMlp);
    std::ostringstream out;
    const std::size_t bytes = save_model(*model, out);
    CHECK(bytes == out.str().size());
}

TEST_CASE("hexfloat text round-trips exactly") {
    Rng rng(51);
    for (int i = 0; i < 200; ++i) {
        const double v = rng.gaussian() * std::pow(10.0, static_cast<double>(i % 60) - 30.0);
        CHECK(parse_hexfloat(format_hexfloat(v)) == v);
    }
    CHECK(parse_hexfloat(format_hexfloat(0.0)) == 0.0);
}

TEST_CASE("save_model_file/load_model_file round trip") {
    nbm::test::TempDir dir("model_io");
    const auto model = make_model(Family::kForest);
    save_model_file(*model, dir.file("m.nbm"));
    const auto loaded = load_model_file(dir.file("m.nbm"));
    Rng rng(52);
    for (int q = 0; q < 50; ++q) {
        std::vector<double> x{rng.gaussian(), rng.gaussian()};
        CHECK(model->predict_row(x) == loaded->predict_row(x));
    }
}
