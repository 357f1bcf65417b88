#pragma once

#include "nbm/matrix.hpp"
#include "nbm/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nbm {

class PayloadReader;
class PayloadWriter;

/// Split criterion. kPaper scales each child's squared-deviation sum by
/// m_j/(m_1+m_2); kClassic is the plain child-SSE sum of standard CART.
enum class SplitWeighting { kPaper, kClassic };

const char* to_string(SplitWeighting w);
SplitWeighting split_weighting_from_string(const std::string& text);

struct TreeHyperparams {
    std::size_t max_depth = 7;
    std::size_t min_samples_split = 105;
    std::size_t min_samples_leaf = 28;
    SplitWeighting weighting = SplitWeighting::kPaper;

    void validate() const;
};

/// Flat node storage in preorder; children referenced by index.
struct TreeNode {
    bool is_leaf = true;
    std::uint32_t feature = 0;
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    std::size_t sample_count = 0;
    std::vector<double> leaf_mean; ///< length n on leaves, empty otherwise

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Sum over rows and targets of squared deviations from the column means
/// (two-pass; exactly zero when every row is identical).
double node_sse(const Matrix& y_subset);

/// Split cost J for the two children. Throws on an empty side.
double split_cost(const Matrix& left_y, const Matrix& right_y, SplitWeighting weighting);

struct SplitCandidate {
    std::size_t feature = 0;
    double threshold = 0.0;
    double cost = 0.0;
};

/// Exhaustive best split over all features and midpoints between consecutive
/// distinct sorted values. Children must keep >= min_samples_leaf rows and
/// the cost must strictly undercut the unsplit node_sse; ties break on
/// (lower feature, lower threshold). nullopt when no admissible split.
std::optional<SplitCandidate> best_split(const Matrix& X, const Matrix& Y,
                                         const TreeHyperparams& hp);

/// Multi-target CART regression tree; deterministic, no randomness.
class TreeModel final : public Regressor {
public:
    TreeModel() = default;

    std::size_t input_count() const override { return input_count_; }
    std::size_t target_count() const override { return target_count_; }
    std::vector<double> predict_row(std::span<const double> x) const override;

    const ModelMetadata& metadata() const override { return metadata_; }
    ModelMetadata& metadata() override { return metadata_; }

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    std::size_t depth() const; ///< longest root-to-leaf edge count

    friend TreeModel fit_tree(const Matrix& X, const Matrix& Y, const TreeHyperparams& hp);
    friend TreeModel read_tree_payload(PayloadReader& reader, std::size_t input_count,
                                       std::size_t target_count);

private:
    std::vector<TreeNode> nodes_;
    std::size_t input_count_ = 0;
    std::size_t target_count_ = 0;
    ModelMetadata metadata_;
};

/// Greedy recursive growth; a node becomes a leaf at max_depth, below
/// min_samples_split, or when best_split yields nothing. Fitted trees do not
/// depend on training-row order.
TreeModel fit_tree(const Matrix& X, const Matrix& Y, const TreeHyperparams& hp);

struct ForestHyperparams {
    std::size_t tree_count = 150;
    TreeHyperparams tree{.max_depth = 7, .min_samples_split = 120, .min_samples_leaf = 30};
    bool bootstrap = true; ///< test hook: false fits every tree on the full sample
    std::uint64_t seed = 0;

    void validate() const;
};

/// Bagged ensemble of TreeModel; prediction is the unweighted member mean.
class ForestModel final : public Regressor {
public:
    ForestModel() = default;

    std::size_t input_count() const override { return input_count_; }
    std::size_t target_count() const override { return target_count_; }
    std::vector<double> predict_row(std::span<const double> x) const override;

    const ModelMetadata& metadata() const override { return metadata_; }
    ModelMetadata& metadata() override { return metadata_; }

    const std::vector<TreeModel>& trees() const { return trees_; }

    friend ForestModel fit_forest(const Matrix& X, const Matrix& Y,
                                  const ForestHyperparams& hp, std::size_t threads);
    friend ForestModel read_forest_payload(PayloadReader& reader, std::size_t input_count,
                                           std::size_t target_count);

private:
    std::vector<TreeModel> trees_;
    std::size_t input_count_ = 0;
    std::size_t target_count_ = 0;
    ModelMetadata metadata_;
};

/// Fits tree i on an m-row bootstrap resample drawn from stream
/// mix_seed(seed, i); the result is identical for any thread count.
ForestModel fit_forest(const Matrix& X, const Matrix& Y, const ForestHyperparams& hp,
                       std::size_t threads = 1);

void write_tree_payload(const TreeModel& model, PayloadWriter& writer);
TreeModel read_tree_payload(PayloadReader& reader, std::size_t input_count,
                            std::size_t target_count);
void write_forest_payload(const ForestModel& model, PayloadWriter& writer);
ForestModel read_forest_payload(PayloadReader& reader, std::size_t input_count,
                                std::size_t target_count);

} // namespace nbm
