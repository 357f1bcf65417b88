#include "nbm/pipeline.hpp"

#include "nbm/error.hpp"
#include "nbm/knn.hpp"
#include "nbm/mlp.hpp"
#include "nbm/rng.hpp"
#include "nbm/tree.hpp"

#include <algorithm>
#include <cmath>

namespace nbm {

const char* to_string(Family family) {
    switch (family) {
        case Family::kTree: return "tree";
        case Family::kForest: return "forest";
        case Family::kKnn: return "knn";
        case Family::kMlp: return "mlp";
    }
    return "unknown";
}

Family family_from_string(const std::string& text) {
    if (text == "tree") return Family::kTree;
    if (text == "forest") return Family::kForest;
    if (text == "knn") return Family::kKnn;
    if (text == "mlp") return Family::kMlp;
    throw ConfigError("unknown model family '" + text + "' (tree|forest|knn|mlp)");
}

PreparedData prepare_dataset(const SCADADataset& dataset, DirectionMode mode,
                             const SplitRatios& ratios, SplitMode split_mode,
                             std::uint64_t split_seed) {
    const DesignMatrices design = build_design_matrices(dataset, mode);
    const std::size_t m = design.X.rows();

    PreparedData prep;
    prep.direction_mode = mode;
    prep.ratios = ratios;
    prep.split_mode = split_mode;
    prep.split_seed = split_seed;
    prep.plan = split_rows(m, ratios, split_mode, split_seed);

    std::vector<std::string> input_labels{"wind_speed"};
    if (mode == DirectionMode::kCosOnly) {
        input_labels.emplace_back("direction_cos");
    } else {
        input_labels.emplace_back("direction_sin");
        input_labels.emplace_back("direction_cos");
    }
    std::vector<std::string> target_labels(kTargetLabels.begin(), kTargetLabels.end());

    // Normalization statistics come from the training rows only. For the
    // chronological default the train rows are a contiguous prefix; for
    // shuffled splits fit on the gathered rows.
    const Matrix train_x_raw = design.X.take_rows(prep.plan.train);
    const Matrix train_y_raw = design.Y.take_rows(prep.plan.train);
    prep.input_norm = fit_normalizer(train_x_raw, {0, train_x_raw.rows()}, input_labels);
    prep.target_norm = fit_normalizer(train_y_raw, {0, train_y_raw.rows()}, target_labels);

    prep.x_norm = apply_normalizer(design.X, prep.input_norm);
    prep.y_norm = apply_normalizer(design.Y, prep.target_norm);
    return prep;
}

NormalizationParams select_target(const NormalizationParams& params, std::size_t index) {
    if (index >= params.column_count()) {
        throw DimensionError("select_target: index out of range");
    }
    NormalizationParams out;
    out.mean = {params.mean[index]};
    out.std_dev = {params.std_dev[index]};
    out.labels = {params.labels[index]};
    out.zero_variance = {params.zero_variance[index]};
    return out;
}

namespace {

Matrix single_column(const Matrix& m, std::size_t j) {
    Matrix out(m.rows(), 1);
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, 0) = m(i, j);
    return out;
}

double lookup(const HyperparamOverrides& overrides, const std::string& key, double fallback) {
    const auto it = overrides.find(key);
    return it == overrides.end() ? fallback : it->second;
}

void reject_unknown_keys(const HyperparamOverrides& overrides,
                         std::initializer_list<const char*> known) {
    for (const auto& [key, value] : overrides) {
        if (std::find_if(known.begin(), known.end(),
                         [&](const char* k) { return key == k; }) == known.end()) {
            throw ConfigError("unknown hyperparameter '" + key + "' for this family");
        }
    }
}

std::size_t as_count(double v, const char* key) {
    if (!(v >= 0.0) || v != std::floor(v)) {
        throw ConfigError(std::string("hyperparameter ") + key +
                          " must be a non-negative integer");
    }
    return static_cast<std::size_t>(v);
}

TreeHyperparams tree_defaults(bool single_target) {
    // Multi-target: depth 7, split 105, leaf 28. Single-target: depth 9,
    // split 80, leaf 28.
    TreeHyperparams hp;
    hp.max_depth = single_target ? 9 : 7;
    hp.min_samples_split = single_target ? 80 : 105;
    hp.min_samples_leaf = 28;
    return hp;
}

ForestHyperparams forest_defaults(bool single_target) {
    // 150 trees either way; depth 7/split 120/leaf 30 multi-target,
    // depth 9/split 90/leaf 30 single-target.
    ForestHyperparams hp;
    hp.tree_count = 150;
    hp.tree.max_depth = single_target ? 9 : 7;
    hp.tree.min_samples_split = single_target ? 90 : 120;
    hp.tree.min_samples_leaf = 30;
    return hp;
}

std::size_t knn_default_k(bool single_target) { return single_target ? 33 : 45; }

std::vector<std::size_t> mlp_default_hidden(bool single_target) {
    return single_target ? std::vector<std::size_t>{17, 14, 17}
                         : std::vector<std::size_t>{17, 8, 17};
}

TreeHyperparams resolve_tree_hp(const HyperparamOverrides& overrides, TreeHyperparams hp) {
    hp.max_depth = as_count(lookup(overrides, "max_depth", static_cast<double>(hp.max_depth)),
                            "max_depth");
    hp.min_samples_split = as_count(
        lookup(overrides, "min_samples_split", static_cast<double>(hp.min_samples_split)),
        "min_samples_split");
    hp.min_samples_leaf = as_count(
        lookup(overrides, "min_samples_leaf", static_cast<double>(hp.min_samples_leaf)),
        "min_samples_leaf");
    hp.weighting = lookup(overrides, "weighting", 0.0) == 0.0 ? SplitWeighting::kPaper
                                                              : SplitWeighting::kClassic;
    return hp;
}

} // namespace

std::unique_ptr<Regressor> train_family(Family family, const PreparedData& prepared,
                                        std::optional<std::size_t> single_target,
                                        const HyperparamOverrides& overrides,
                                        std::uint64_t seed, std::size_t threads) {
    const bool single = single_target.has_value();
    if (single && *single_target >= prepared.y_norm.cols()) {
        throw DimensionError("train_family: single-target index out of range");
    }

    const Matrix train_x = prepared.train_x();
    Matrix train_y = prepared.train_y();
    if (single) train_y = single_column(train_y, *single_target);

    std::unique_ptr<Regressor> model;
    switch (family) {
        case Family::kTree: {
            reject_unknown_keys(overrides, {"max_depth", "min_samples_split",
                                            "min_samples_leaf", "weighting"});
            model = std::make_unique<TreeModel>(
                fit_tree(train_x, train_y, resolve_tree_hp(overrides, tree_defaults(single))));
            break;
        }
        case Family::kForest: {
            reject_unknown_keys(overrides, {"max_depth", "min_samples_split", "min_samples_leaf",
                                            "weighting", "tree_count", "bootstrap"});
            ForestHyperparams hp = forest_defaults(single);
            hp.tree = resolve_tree_hp(overrides, hp.tree);
            hp.tree_count =
                as_count(lookup(overrides, "tree_count", static_cast<double>(hp.tree_count)),
                         "tree_count");
            hp.bootstrap = lookup(overrides, "bootstrap", 1.0) != 0.0;
            hp.seed = seed;
            model = std::make_unique<ForestModel>(fit_forest(train_x, train_y, hp, threads));
            break;
        }
        case Family::kKnn: {
            reject_unknown_keys(overrides, {"k"});
            const std::size_t k = as_count(
                lookup(overrides, "k", static_cast<double>(knn_default_k(single))), "k");
            model = std::make_unique<KnnModel>(fit_knn(train_x, train_y, k));
            break;
        }
        case Family::kMlp: {
            reject_unknown_keys(overrides, {"hidden1", "hidden2", "hidden3", "batch_size",
                                            "max_epochs", "patience", "alpha", "batch_norm"});
            const auto defaults = mlp_default_hidden(single);
            MlpArchitecture arch;
            arch.layer_widths.push_back(train_x.cols());
            const char* keys[3] = {"hidden1", "hidden2", "hidden3"};
            for (std::size_t h = 0; h < 3; ++h) {
                const std::size_t width =
                    as_count(lookup(overrides, keys[h], static_cast<double>(defaults[h])),
                             keys[h]);
                if (width > 0) arch.layer_widths.push_back(width);
            }
            arch.layer_widths.push_back(train_y.cols());
            const bool use_bn = lookup(overrides, "batch_norm", 1.0) != 0.0;
            arch.batch_norm.assign(arch.hidden_count(), use_bn ? 1 : 0);

            TrainConfig config;
            config.batch_size = as_count(
                lookup(overrides, "batch_size", static_cast<double>(config.batch_size)),
                "batch_size");
            config.max_epochs = as_count(
                lookup(overrides, "max_epochs", static_cast<double>(config.max_epochs)),
                "max_epochs");
            config.patience = as_count(
                lookup(overrides, "patience", static_cast<double>(config.patience)), "patience");
            config.adam.alpha = lookup(overrides, "alpha", config.adam.alpha);
            config.seed = seed;

            Matrix val_y = prepared.validation_y();
            if (single) val_y = single_column(val_y, *single_target);
            model = std::make_unique<MlpModel>(
                train_mlp(train_x, train_y, prepared.validation_x(), val_y, arch, config));
            break;
        }
    }

    ModelMetadata& meta = model->metadata();
    meta.seed = seed;
    meta.direction_mode = prepared.direction_mode;
    meta.split = prepared.ratios;
    meta.split_mode = prepared.split_mode;
    meta.split_seed = prepared.split_seed;
    meta.input_norm = prepared.input_norm;
    meta.target_norm = single ? select_target(prepared.target_norm, *single_target)
                              : prepared.target_norm;
    meta.target_labels = meta.target_norm.labels;
    return model;
}

} // namespace nbm
