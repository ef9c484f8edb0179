#pragma once

// Shared helpers for the test suite: seeded random operators, states and
// Bloch vectors. Every generator takes the engine by reference so each
// TEST_CASE owns its seed and stays reproducible in isolation.

#include <random>

#include "qfikit/qfikit.hpp"

namespace qfikit::test {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline ComplexMatrix random_complex(Rng& rng, Eigen::Index rows,
                                    Eigen::Index cols) {
    std::normal_distribution<double> g;
    ComplexMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = Complex(g(rng), g(rng));
    return m;
}

/// Random Hermitian matrix rescaled to a random spectral norm in
/// (0.2, 1] * max_norm.
inline ComplexMatrix random_hermitian(Rng& rng, Eigen::Index d,
                                      double max_norm = 5.0) {
    const ComplexMatrix m = random_complex(rng, d, d);
    ComplexMatrix h = 0.5 * (m + m.adjoint());
    const RealVector e = eig_hermitian(h).eigenvalues;
    const double w = e.cwiseAbs().maxCoeff();
    if (w > 0.0) h *= uniform(rng, 0.2, 1.0) * max_norm / w;
    return 0.5 * (h + ComplexMatrix(h.adjoint()));
}

/// Random density matrix of the given rank (Wishart construction); the
/// remaining d - rank eigenvalues are exactly zero up to rounding dust.
inline DensityMatrix random_density(Rng& rng, Eigen::Index d,
                                    Eigen::Index rank) {
    const ComplexMatrix a = random_complex(rng, d, rank);
    ComplexMatrix w = a * a.adjoint();
    w /= w.trace().real();
    return validate_density(w);
}

inline DensityMatrix random_pure(Rng& rng, Eigen::Index d) {
    return random_density(rng, d, 1);
}

inline Vec3 random_unit_vec3(Rng& rng) {
    std::normal_distribution<double> g;
    while (true) {
        const Vec3 v = {g(rng), g(rng), g(rng)};
        const double n = norm(v);
        if (n > 1e-3) return (1.0 / n) * v;
    }
}

inline DisturbedModel random_model(Rng& rng, Eigen::Index d,
                                   double max_norm = 5.0,
                                   double param_range = 3.0) {
    return DisturbedModel(
        validate_hermitian(random_hermitian(rng, d, max_norm)),
        validate_hermitian(random_hermitian(rng, d, max_norm)),
        uniform(rng, -param_range, param_range),
        uniform(rng, -param_range, param_range));
}

/// Unit vector with a prescribed inner product against a given unit
/// vector, deterministic given the rng state.
inline Vec3 unit_with_dot(Rng& rng, const Vec3& a, double c) {
    while (true) {
        const Vec3 r = random_unit_vec3(rng);
        Vec3 perp = r - dot(r, a) * a;
        const double n = norm(perp);
        if (n < 1e-6) continue;
        perp = (1.0 / n) * perp;
        return c * a + std::sqrt(std::max(0.0, 1.0 - c * c)) * perp;
    }
}

}  // namespace qfikit::test
