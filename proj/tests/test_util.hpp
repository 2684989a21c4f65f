#pragma once

#include <random>

#include "gmech/matn.hpp"
#include "gmech/vec3.hpp"

namespace testutil {

inline double uniform(std::mt19937& gen, double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
}

inline gmech::Vec3 random_vec3(std::mt19937& gen, double scale = 1.0) {
    return {scale * uniform(gen), scale * uniform(gen), scale * uniform(gen)};
}

inline gmech::MatN random_mat(std::mt19937& gen, int n, double scale = 1.0) {
    gmech::MatN m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = scale * uniform(gen);
    return m;
}

inline gmech::MatN random_skew(std::mt19937& gen, int n, double scale = 1.0) {
    gmech::MatN m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = scale * uniform(gen);
            m(i, j) = v;
            m(j, i) = -v;
        }
    return m;
}

} // namespace testutil
