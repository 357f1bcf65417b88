#include "nbm/tree.hpp"

#include "nbm/error.hpp"
#include "nbm/model_io.hpp"
#include "nbm/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <thread>

namespace nbm {

const char* to_string(SplitWeighting w) {
    return w == SplitWeighting::kPaper ? "paper" : "classic";
}

SplitWeighting split_weighting_from_string(const std::string& text) {
    if (text == "paper") return SplitWeighting::kPaper;
    if (text == "classic") return SplitWeighting::kClassic;
    throw ConfigError("unknown split weighting '" + text + "' (expected paper or classic)");
}

void TreeHyperparams::validate() const {
    if (max_depth < 1) throw ConfigError("TreeHyperparams: max_depth must be >= 1");
    if (min_samples_split < 2) throw ConfigError("TreeHyperparams: min_samples_split must be >= 2");
    if (min_samples_leaf < 1) throw ConfigError("TreeHyperparams: min_samples_leaf must be >= 1");
}

void ForestHyperparams::validate() const {
    if (tree_count < 1) throw ConfigError("ForestHyperparams: tree_count must be >= 1");
    tree.validate();
}

double node_sse(const Matrix& y_subset) {
    if (y_subset.rows() < 1) throw DimensionError("node_sse: need at least one row");
    const std::size_t rows = y_subset.rows();
    const std::size_t targets = y_subset.cols();

    double total = 0.0;
    for (std::size_t t = 0; t < targets; ++t) {
        bool constant = true;
        const double first = y_subset(0, t);
        for (std::size_t i = 1; i < rows && constant; ++i) {
            constant = y_subset(i, t) == first;
        }
        if (constant) continue; // contributes exactly zero

        double sum = 0.0;
        for (std::size_t i = 0; i < rows; ++i) sum += y_subset(i, t);
        const double mean = sum / static_cast<double>(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            const double d = y_subset(i, t) - mean;
            total += d * d;
        }
    }
    return total;
}

double split_cost(const Matrix& left_y, const Matrix& right_y, SplitWeighting weighting) {
    if (left_y.rows() == 0 || right_y.rows() == 0) {
        throw DimensionError("split_cost: both sides must be non-empty");
    }
    const double sse_left = node_sse(left_y);
    const double sse_right = node_sse(right_y);
    if (weighting == SplitWeighting::kClassic) return sse_left + sse_right;
    const auto m1 = static_cast<double>(left_y.rows());
    const auto m2 = static_cast<double>(right_y.rows());
    return (m1 / (m1 + m2)) * sse_left + (m2 / (m1 + m2)) * sse_right;
}

namespace {

/// Reusable buffers for the per-node split search.
struct SplitScratch {
    std::vector<std::pair<double, std::size_t>> ordered; // (feature value, row)
    std::vector<double> centered;   // rows x targets, sorted order, parent-mean centered
    std::vector<double> suffix_sum; // (rows + 1) x targets
    std::vector<double> suffix_sq;
    std::vector<double> left_sum;   // targets
    std::vector<double> left_sq;
};

struct NodeStats {
    std::vector<double> mean; ///< per-target mean, summed in row order
    double sse = 0.0;         ///< two-pass squared deviations
    bool pure = false;        ///< every target row bit-identical
};

NodeStats compute_node_stats(const Matrix& Y, std::span<const std::size_t> rows) {
    const std::size_t targets = Y.cols();
    const auto count = static_cast<double>(rows.size());

    NodeStats stats;
    stats.mean.assign(targets, 0.0);
    for (std::size_t t = 0; t < targets; ++t) {
        double sum = 0.0;
        for (const std::size_t r : rows) sum += Y(r, t);
        stats.mean[t] = sum / count;
    }

    stats.pure = true;
    for (const std::size_t r : rows) {
        for (std::size_t t = 0; t < targets; ++t) {
            if (Y(r, t) != Y(rows[0], t)) {
                stats.pure = false;
                break;
            }
        }
        if (!stats.pure) break;
    }

    if (!stats.pure) {
        for (std::size_t t = 0; t < targets; ++t) {
            double acc = 0.0;
            for (const std::size_t r : rows) {
                const double d = Y(r, t) - stats.mean[t];
                acc += d * d;
            }
            stats.sse += acc;
        }
    }
    return stats;
}

/// Exhaustive midpoint search over the given rows. `stats` must belong to
/// the same rows. A pure node never splits.
std::optional<SplitCandidate> best_split_rows(const Matrix& X, const Matrix& Y,
                                              std::span<const std::size_t> rows,
                                              const TreeHyperparams& hp,
                                              const NodeStats& stats, SplitScratch& scratch) {
    if (stats.pure) return std::nullopt;

    const std::size_t m = rows.size();
    const std::size_t features = X.cols();
    const std::size_t targets = Y.cols();
    const std::size_t min_leaf = hp.min_samples_leaf;
    if (m < 2 * min_leaf) return std::nullopt;

    scratch.ordered.resize(m);
    scratch.centered.resize(m * targets);
    scratch.suffix_sum.resize((m + 1) * targets);
    scratch.suffix_sq.resize((m + 1) * targets);
    scratch.left_sum.resize(targets);
    scratch.left_sq.resize(targets);

    bool found = false;
    SplitCandidate best{};

    for (std::size_t f = 0; f < features; ++f) {
        for (std::size_t i = 0; i < m; ++i) {
            scratch.ordered[i] = {X(rows[i], f), rows[i]};
        }
        // Stable sort keeps the caller's (canonical) order among equal
        // values, making the search independent of training-row order.
        std::stable_sort(scratch.ordered.begin(), scratch.ordered.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });

        if (scratch.ordered.front().first == scratch.ordered.back().first) {
            continue; // feature constant on this node
        }

        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t r = scratch.ordered[i].second;
            for (std::size_t t = 0; t < targets; ++t) {
                scratch.centered[i * targets + t] = Y(r, t) - stats.mean[t];
            }
        }

        std::fill_n(scratch.suffix_sum.data() + m * targets, targets, 0.0);
        std::fill_n(scratch.suffix_sq.data() + m * targets, targets, 0.0);
        for (std::size_t i = m; i-- > 0;) {
            for (std::size_t t = 0; t < targets; ++t) {
                const double y = scratch.centered[i * targets + t];
                scratch.suffix_sum[i * targets + t] = scratch.suffix_sum[(i + 1) * targets + t] + y;
                scratch.suffix_sq[i * targets + t] = scratch.suffix_sq[(i + 1) * targets + t] + y * y;
            }
        }

        std::fill(scratch.left_sum.begin(), scratch.left_sum.end(), 0.0);
        std::fill(scratch.left_sq.begin(), scratch.left_sq.end(), 0.0);

        for (std::size_t i = 0; i + 1 < m; ++i) {
            for (std::size_t t = 0; t < targets; ++t) {
                const double y = scratch.centered[i * targets + t];
                scratch.left_sum[t] += y;
                scratch.left_sq[t] += y * y;
            }
            const double v = scratch.ordered[i].first;
            const double next = scratch.ordered[i + 1].first;
            if (v == next) continue; // candidates sit between distinct values

            const std::size_t left_count = i + 1;
            const std::size_t right_count = m - left_count;
            if (left_count < min_leaf || right_count < min_leaf) continue;

            double sse_left = 0.0;
            double sse_right = 0.0;
            for (std::size_t t = 0; t < targets; ++t) {
                sse_left += scratch.left_sq[t] -
                            scratch.left_sum[t] * scratch.left_sum[t] /
                                static_cast<double>(left_count);
                const double rs = scratch.suffix_sum[(i + 1) * targets + t];
                sse_right += scratch.suffix_sq[(i + 1) * targets + t] -
                             rs * rs / static_cast<double>(right_count);
            }

            double cost = 0.0;
            if (hp.weighting == SplitWeighting::kClassic) {
                cost = sse_left + sse_right;
            } else {
                const auto m1 = static_cast<double>(left_count);
                const auto m2 = static_cast<double>(right_count);
                cost = (m1 / (m1 + m2)) * sse_left + (m2 / (m1 + m2)) * sse_right;
            }

            // Strict < keeps the earliest (feature, threshold) on ties.
            if (!found || cost < best.cost) {
                found = true;
                best = {f, (v + next) / 2.0, cost};
            }
        }
    }

    if (!found || !(best.cost < stats.sse)) return std::nullopt;
    return best;
}

std::vector<std::size_t> canonical_row_order(const Matrix& X, const Matrix& Y) {
    std::vector<std::size_t> rows(X.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
        for (std::size_t j = 0; j < X.cols(); ++j) {
            if (X(a, j) != X(b, j)) return X(a, j) < X(b, j);
        }
        for (std::size_t t = 0; t < Y.cols(); ++t) {
            if (Y(a, t) != Y(b, t)) return Y(a, t) < Y(b, t);
        }
        return false;
    });
    return rows;
}

class TreeGrower {
public:
    TreeGrower(const Matrix& X, const Matrix& Y, const TreeHyperparams& hp)
        : x_(X), y_(Y), hp_(hp) {}

    std::vector<TreeNode> grow(std::vector<std::size_t>& rows) {
        nodes_.clear();
        grow_node(std::span<std::size_t>(rows), 0);
        return std::move(nodes_);
    }

private:
    std::size_t grow_node(std::span<std::size_t> rows, std::size_t depth) {
        const NodeStats stats = compute_node_stats(y_, rows);

        const std::size_t index = nodes_.size();
        nodes_.emplace_back();

        std::optional<SplitCandidate> candidate;
        if (depth < hp_.max_depth && rows.size() >= hp_.min_samples_split) {
            candidate = best_split_rows(x_, y_, rows, hp_, stats, scratch_);
        }

        if (!candidate) {
            TreeNode& leaf = nodes_[index];
            leaf.is_leaf = true;
            leaf.sample_count = rows.size();
            leaf.leaf_mean = stats.mean;
            return index;
        }

        const auto f = candidate->feature;
        const double threshold = candidate->threshold;
        const auto mid = std::stable_partition(
            rows.begin(), rows.end(),
            [&](std::size_t r) { return x_(r, f) <= threshold; });
        const auto left_size = static_cast<std::size_t>(mid - rows.begin());

        const std::size_t left_index = grow_node(rows.subspan(0, left_size), depth + 1);
        const std::size_t right_index = grow_node(rows.subspan(left_size), depth + 1);

        TreeNode& node = nodes_[index];
        node.is_leaf = false;
        node.feature = static_cast<std::uint32_t>(f);
        node.threshold = threshold;
        node.left = left_index;
        node.right = right_index;
        node.sample_count = rows.size();
        return index;
    }

    const Matrix& x_;
    const Matrix& y_;
    const TreeHyperparams hp_;
    std::vector<TreeNode> nodes_;
    SplitScratch scratch_;
};

} // namespace

std::optional<SplitCandidate> best_split(const Matrix& X, const Matrix& Y,
                                         const TreeHyperparams& hp) {
    if (X.rows() != Y.rows()) throw DimensionError("best_split: X/Y row mismatch");
    if (X.rows() == 0) return std::nullopt;
    hp.validate();

    std::vector<std::size_t> rows(X.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    const NodeStats stats = compute_node_stats(Y, rows);
    SplitScratch scratch;
    return best_split_rows(X, Y, rows, hp, stats, scratch);
}

TreeModel fit_tree(const Matrix& X, const Matrix& Y, const TreeHyperparams& hp) {
    if (X.rows() != Y.rows()) throw DimensionError("fit_tree: X/Y row mismatch");
    if (X.rows() < 1) throw DimensionError("fit_tree: need at least one row");
    hp.validate();

    auto rows = canonical_row_order(X, Y);
    TreeGrower grower(X, Y, hp);

    TreeModel model;
    model.nodes_ = grower.grow(rows);
    model.input_count_ = X.cols();
    model.target_count_ = Y.cols();
    model.metadata_.family = "tree";
    model.metadata_.hyperparams["max_depth"] = std::to_string(hp.max_depth);
    model.metadata_.hyperparams["min_samples_split"] = std::to_string(hp.min_samples_split);
    model.metadata_.hyperparams["min_samples_leaf"] = std::to_string(hp.min_samples_leaf);
    model.metadata_.hyperparams["weighting"] = to_string(hp.weighting);
    return model;
}

std::vector<double> TreeModel::predict_row(std::span<const double> x) const {
    if (x.size() != input_count_) {
        throw DimensionError("TreeModel::predict_row: expected width " +
                             std::to_string(input_count_) + ", got " + std::to_string(x.size()));
    }
    std::size_t index = 0;
    while (!nodes_[index].is_leaf) {
        const TreeNode& node = nodes_[index];
        index = x[node.feature] <= node.threshold ? node.left : node.right;
    }
    return nodes_[index].leaf_mean;
}

std::size_t TreeModel::depth() const {
    // Iterative depth over the preorder array.
    std::size_t max_depth = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [index, depth] = stack.back();
        stack.pop_back();
        const TreeNode& node = nodes_[index];
        if (node.is_leaf) {
            max_depth = std::max(max_depth, depth);
        } else {
            stack.push_back({node.left, depth + 1});
            stack.push_back({node.right, depth + 1});
        }
    }
    return max_depth;
}

ForestModel fit_forest(const Matrix& X, const Matrix& Y, const ForestHyperparams& hp,
                       std::size_t threads) {
    if (X.rows() != Y.rows()) throw DimensionError("fit_forest: X/Y row mismatch");
    if (X.rows() < 1) throw DimensionError("fit_forest: need at least one row");
    hp.validate();

    const std::size_t m = X.rows();
    ForestModel model;
    model.trees_.resize(hp.tree_count);
    model.input_count_ = X.cols();
    model.target_count_ = Y.cols();

    const auto fit_member = [&](std::size_t i) {
        if (hp.bootstrap) {
            Rng rng(mix_seed(hp.seed, i));
            std::vector<std::size_t> sample(m);
            for (std::size_t j = 0; j < m; ++j) sample[j] = rng.uniform_index(m);
            model.trees_[i] = fit_tree(X.take_rows(sample), Y.take_rows(sample), hp.tree);
        } else {
            model.trees_[i] = fit_tree(X, Y, hp.tree);
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(threads, hp.tree_count));
    if (workers == 1) {
        for (std::size_t i = 0; i < hp.tree_count; ++i) fit_member(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < hp.tree_count;
                     i = next.fetch_add(1)) {
                    fit_member(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    model.metadata_.family = "forest";
    model.metadata_.seed = hp.seed;
    model.metadata_.hyperparams["tree_count"] = std::to_string(hp.tree_count);
    model.metadata_.hyperparams["bootstrap"] = hp.bootstrap ? "1" : "0";
    model.metadata_.hyperparams["max_depth"] = std::to_string(hp.tree.max_depth);
    model.metadata_.hyperparams["min_samples_split"] = std::to_string(hp.tree.min_samples_split);
    model.metadata_.hyperparams["min_samples_leaf"] = std::to_string(hp.tree.min_samples_leaf);
    model.metadata_.hyperparams["weighting"] = to_string(hp.tree.weighting);
    return model;
}

std::vector<double> ForestModel::predict_row(std::span<const double> x) const {
    if (x.size() != input_count_) {
        throw DimensionError("ForestModel::predict_row: expected width " +
                             std::to_string(input_count_) + ", got " + std::to_string(x.size()));
    }
    std::vector<double> mean(target_count_, 0.0);
    for (const TreeModel& tree : trees_) {
        const auto pred = tree.predict_row(x);
        for (std::size_t t = 0; t < target_count_; ++t) mean[t] += pred[t];
    }
    const auto count = static_cast<double>(trees_.size());
    for (double& v : mean) v /= count;
    return mean;
}

void write_tree_payload(const TreeModel& model, PayloadWriter& writer) {
    writer.write_u64(model.nodes().size());
    for (const TreeNode& node : model.nodes()) {
        writer.write_u8(node.is_leaf ? 0 : 1);
        if (node.is_leaf) {
            writer.write_u64(node.sample_count);
            for (double v : node.leaf_mean) writer.write_f64(v);
        } else {
            writer.write_u32(node.feature);
            writer.write_f64(node.threshold);
            writer.write_u64(node.left);
            writer.write_u64(node.right);
        }
    }
}

TreeModel read_tree_payload(PayloadReader& reader, std::size_t input_count,
                            std::size_t target_count) {
    TreeModel model;
    model.input_count_ = input_count;
    model.target_count_ = target_count;

    const std::uint64_t count = reader.read_u64();
    model.nodes_.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        TreeNode& node = model.nodes_[i];
        const std::uint8_t tag = reader.read_u8();
        if (tag == 0) {
            node.is_leaf = true;
            node.sample_count = reader.read_u64();
            node.leaf_mean.resize(target_count);
            for (double& v : node.leaf_mean) v = reader.read_f64();
        } else if (tag == 1) {
            node.is_leaf = false;
            node.feature = reader.read_u32();
            node.threshold = reader.read_f64();
            node.left = reader.read_u64();
            node.right = reader.read_u64();
            if (node.feature >= input_count || node.left >= count || node.right >= count) {
                throw IoError("corrupt tree node near offset " + std::to_string(reader.offset()));
            }
        } else {
            throw IoError("corrupt node tag near offset " + std::to_string(reader.offset()));
        }
    }
    if (count == 0) throw IoError("corrupt tree payload: zero nodes");
    return model;
}

void write_forest_payload(const ForestModel& model, PayloadWriter& writer) {
    writer.write_u64(model.trees().size());
    for (const TreeModel& tree : model.trees()) write_tree_payload(tree, writer);
}

ForestModel read_forest_payload(PayloadReader& reader, std::size_t input_count,
                                std::size_t target_count) {
    ForestModel model;
    model.input_count_ = input_count;
    model.target_count_ = target_count;

    const std::uint64_t count = reader.read_u64();
    if (count == 0) throw IoError("corrupt forest payload: zero trees");
    model.trees_.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        model.trees_.push_back(read_tree_payload(reader, input_count, target_count));
    }
    return model;
}

} // namespace nbm
