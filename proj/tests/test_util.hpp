#pragma once

#include "linalg.hpp"

#include <random>

namespace t1echo::testing {

inline std::mt19937_64& rng() {
    static std::mt19937_64 engine(20121030);
    return engine;
}

inline double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline MatX random_matrix(int n, double scale = 1.0) {
    MatX m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            m(i, j) = cplx(uniform(-scale, scale), uniform(-scale, scale));
        }
    }
    return m;
}

inline MatX random_hermitian(int n, double scale = 1.0) {
    const MatX a = random_matrix(n, scale);
    return 0.5 * (a + a.adjoint());
}

/// Random density matrix of full rank.
inline Mat4 random_density() {
    const MatX a = random_matrix(4);
    MatX rho = a * a.adjoint();
    rho /= rho.trace();
    return rho;
}

inline Vec4 random_pure() {
    Vec4 v;
    for (int i = 0; i < 4; ++i) {
        v(i) = cplx(uniform(-1, 1), uniform(-1, 1));
    }
    return v / v.norm();
}

/// Subspace-only random state.
inline Vec4 random_subspace_state() {
    Vec4 v = Vec4::Zero();
    v(basis::kQubit) = cplx(uniform(-1, 1), uniform(-1, 1));
    v(basis::kMemory) = cplx(uniform(-1, 1), uniform(-1, 1));
    return v / v.norm();
}

} // namespace t1echo::testing
