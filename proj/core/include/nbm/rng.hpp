#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace nbm {

/// splitmix64 step; used to derive independent stream seeds from one root
/// seed (seed_i = splitmix64 applied to root + (i+1)*golden-gamma).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t root, std::uint64_t stream) {
    return splitmix64(root + (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

/// Deterministic random source. The engine is std::mt19937_64 (its output
/// sequence is fixed by the standard); the uniform and Gaussian mappings are
/// spelled out here instead of using std::*_distribution, whose outputs are
/// implementation-defined. Recorded in dataset metadata as
/// "mt19937_64+boxmuller".
class Rng {
public:
    static constexpr const char* kAlgorithmTag = "mt19937_64+boxmuller";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a log() argument.
    double uniform01_open_low() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via one Box-Muller cosine branch (two draws per value).
    double gaussian() {
        const double u1 = uniform01_open_low();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform index in [0, n) by 128-bit multiply-shift.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::mt19937_64 engine_;
};

/// Seeded Fisher-Yates shuffle with the project Rng (std::shuffle's draw
/// pattern is implementation-defined).
template <typename T>
void deterministic_shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = rng.uniform_index(i);
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace nbm
