#include "nbm/tuning.hpp"

#include "nbm/error.hpp"
#include "nbm/metrics.hpp"
#include "nbm/scada.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <sstream>
#include <thread>

namespace nbm {

std::size_t GridSpec::combination_count() const {
    std::size_t count = 1;
    for (const auto& [name, values] : axes) count *= values.size();
    return count;
}

void GridSpec::validate() const {
    if (axes.empty()) throw ConfigError("GridSpec: need at least one axis");
    for (const auto& [name, values] : axes) {
        if (values.empty()) throw ConfigError("GridSpec: axis '" + name + "' is empty");
    }
    const std::size_t combinations = combination_count();
    if (combinations > cap) {
        throw ConfigError("GridSpec: " + std::to_string(combinations) +
                          " combinations exceed the cap of " + std::to_string(cap));
    }
}

namespace {

std::vector<std::pair<std::string, double>> config_at(const GridSpec& grid, std::size_t index) {
    std::vector<std::pair<std::string, double>> config(grid.axes.size());
    // Odometer with the last axis fastest.
    for (std::size_t a = grid.axes.size(); a-- > 0;) {
        const auto& [name, values] = grid.axes[a];
        config[a] = {name, values[index % values.size()]};
        index /= values.size();
    }
    return config;
}

bool config_less(const TuneEntry& a, const TuneEntry& b) {
    if (a.validation_rmse != b.validation_rmse) return a.validation_rmse < b.validation_rmse;
    for (std::size_t i = 0; i < a.config.size(); ++i) {
        if (a.config[i].second != b.config[i].second) {
            return a.config[i].second < b.config[i].second;
        }
    }
    return false;
}

} // namespace

TuneResult grid_search(const GridSpec& grid, const PreparedData& prepared,
                       std::optional<std::size_t> single_target, std::uint64_t seed,
                       std::size_t threads) {
    grid.validate();
    const std::size_t combinations = grid.combination_count();

    const Matrix val_x = prepared.validation_x();
    Matrix val_y = prepared.validation_y();
    if (single_target) {
        Matrix col(val_y.rows(), 1);
        for (std::size_t i = 0; i < val_y.rows(); ++i) col(i, 0) = val_y(i, *single_target);
        val_y = std::move(col);
    }

    TuneResult result;
    result.table.resize(combinations);

    const auto evaluate_point = [&](std::size_t index) {
        TuneEntry& entry = result.table[index];
        entry.config = config_at(grid, index);
        HyperparamOverrides overrides(entry.config.begin(), entry.config.end());

        const auto start = std::chrono::steady_clock::now();
        const auto model = train_family(grid.family, prepared, single_target, overrides, seed);
        entry.fit_seconds = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start)
                                .count();
        entry.validation_rmse = global_rmse(predict_batch(*model, val_x), val_y);
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(threads, combinations));
    if (workers == 1) {
        for (std::size_t i = 0; i < combinations; ++i) evaluate_point(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < combinations;
                     i = next.fetch_add(1)) {
                    evaluate_point(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    std::sort(result.table.begin(), result.table.end(), config_less);
    return result;
}

std::string render_tune_report(const GridSpec& grid, const TuneResult& result) {
    std::ostringstream out;
    out << "# Grid search, family=" << to_string(grid.family) << "\n";
    out << "rank";
    for (const auto& [name, values] : grid.axes) out << ',' << name;
    out << ",validation_rmse\n";

    char rmse[32];
    for (std::size_t i = 0; i < result.table.size(); ++i) {
        out << i + 1;
        for (const auto& [name, value] : result.table[i].config) {
            out << ',' << format_double(value);
        }
        std::snprintf(rmse, sizeof(rmse), "%.6f", result.table[i].validation_rmse);
        out << ',' << rmse << '\n';
    }
    return out.str();
}

} // namespace nbm
