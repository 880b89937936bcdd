#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include <Eigen/Dense>

namespace mvfs {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer. Used to hash (root, counter...) tuples into
/// independent engine seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based seed derivation: the seed of a substream depends only on
/// the root and the path of counters, never on evaluation order. This is
/// what makes every Monte Carlo driver worker-count invariant.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = mix64(root);
    for (auto c : path) h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
    return h;
}

inline Engine make_engine(std::uint64_t seed) {
    return Engine(seed);
}

inline Engine make_engine(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
    return make_engine(derive_seed(root, path));
}

template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> standard_normal_matrix(Eigen::Index rows, Eigen::Index cols,
                                                                             Engine& rng) {
    std::normal_distribution<Scalar> normal;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
    return m;
}

}  // namespace mvfs
