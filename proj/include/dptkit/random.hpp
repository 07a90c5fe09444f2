// random.hpp
// Seed splitting and random sampling helpers.
//
// Every stochastic routine in dptkit takes a 64-bit seed. Independent
// sub-computations (restarts, Monte Carlo trials, protocol parties, sweep
// cells) draw from std::mt19937_64 engines seeded by
//
//     derive_seed(seed, index) = splitmix64(seed + 0x9E3779B97F4A7C15 * (index + 1))
//
// so results depend only on the user seed and the stream index.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "dptkit/linalg.hpp"

namespace dptkit {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) { return Rng(derive_seed(seed, stream)); }

inline double uniform01(Rng& rng) {
    // 53 random bits -> [0, 1); independent of the standard library's distribution code.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    // Lemire-free rejection sampling keeps the draw unbiased and portable.
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return static_cast<std::size_t>(r % n);
}

inline double standard_normal(Rng& rng) {
    // Box-Muller
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

// Sample an index from a nonnegative weight vector (need not be normalized).
inline std::size_t sample_discrete(Rng& rng, std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01(rng) * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (u < weights[i]) return i;
        u -= weights[i];
    }
    for (std::size_t i = weights.size(); i-- > 0;)
        if (weights[i] > 0.0) return i;
    return 0;
}

// Uniform k-subset of {0..n-1}, returned sorted (partial Fisher-Yates).
inline std::vector<std::size_t> sample_subset(Rng& rng, std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    k = std::min(k, n);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + uniform_index(rng, n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Point uniformly distributed on the probability simplex.
inline std::vector<double> random_distribution(Rng& rng, std::size_t n) {
    std::vector<double> p(n);
    double s = 0.0;
    for (auto& x : p) {
        double u = uniform01(rng);
        while (u <= 0.0) u = uniform01(rng);
        x = -std::log(u);
        s += x;
    }
    for (auto& x : p) x /= s;
    return p;
}

inline CVector random_unit_vector(Rng& rng, std::size_t dim) {
    CVector v(dim);
    for (auto& z : v) z = cplx{standard_normal(rng), standard_normal(rng)};
    const double n = norm2(v);
    for (auto& z : v) z /= n;
    return v;
}

// Haar-distributed unitary via Gram-Schmidt on a complex Ginibre matrix.
inline ComplexMatrix random_unitary(Rng& rng, std::size_t dim) {
    std::vector<CVector> cols;
    cols.reserve(dim);
    while (cols.size() < dim) {
        CVector v = random_unit_vector(rng, dim);
        for (const auto& c : cols) {
            const cplx p = inner(c, v);
            for (std::size_t r = 0; r < dim; ++r) v[r] -= p * c[r];
        }
        const double n = norm2(v);
        if (n < 1e-8) continue;
        for (auto& z : v) z /= n;
        cols.push_back(std::move(v));
    }
    ComplexMatrix u(dim, dim);
    for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t r = 0; r < dim; ++r) u(r, c) = cols[c][r];
    return u;
}

// Random mixed state G G^dagger / Tr, G a dim x rank Ginibre matrix.
inline ComplexMatrix random_density_matrix(Rng& rng, std::size_t dim, std::size_t rank = 0) {
    if (rank == 0) rank = dim;
    ComplexMatrix g(dim, rank);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < rank; ++c) g(r, c) = cplx{standard_normal(rng), standard_normal(rng)};
    ComplexMatrix rho = g * g.adjoint();
    rho *= 1.0 / rho.trace().real();
    return rho.hermitian_part();
}

} // namespace dptkit
