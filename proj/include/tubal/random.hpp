#ifndef TUBAL_RANDOM_HPP
#define TUBAL_RANDOM_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <random>

#include "tubal/tensor.hpp"

namespace tubal {

using RngEngine = std::mt19937_64;

/// Derive an independent stream seed from a base seed and up to two stream
/// labels (sweep point, role, ...), splitmix64-style.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t label1 = 0,
                              std::uint64_t label2 = 0) {
    std::uint64_t s = base;
    for (std::uint64_t part : {label1, label2}) {
        s += 0x9E3779B97F4A7C15ull + part;
        s = (s ^ (s >> 30)) * 0xBF58476D1CE4E5B9ull;
        s = (s ^ (s >> 27)) * 0x94D049BB133111EBull;
        s ^= s >> 31;
    }
    return s;
}

/// i.i.d. standard normal entries, filled in memory order.
inline Tensor3d gaussian_tensor(Index n1, Index n2, Index n3, RngEngine& rng) {
    std::normal_distribution<double> normal;
    Tensor3d x(n1, n2, n3);
    auto v = x.as_vec();
    for (Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
    return x;
}

template <class Matrix>
void fill_gaussian(Matrix& m, RngEngine& rng) {
    std::normal_distribution<double> normal;
    double* p = m.data();
    for (Index i = 0; i < m.size(); ++i) p[i] = normal(rng);
}

inline Eigen::VectorXd gaussian_vector(Index n, RngEngine& rng) {
    Eigen::VectorXd v(n);
    fill_gaussian(v, rng);
    return v;
}

}  // namespace tubal

#endif
