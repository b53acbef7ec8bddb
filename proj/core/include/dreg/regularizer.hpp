// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <vector>

#include "dreg/volume.hpp"

namespace dreg {

/// One mixed partial of the order-n gradient stack: d^n / dx^k1 dy^k2 dz^k3 with its
/// multinomial weight n! / (k1! k2! k3!).
struct MultinomialTerm {
    int k1 = 0;
    int k2 = 0;
    int k3 = 0;
    int coef = 0;
};

/// All (k1,k2,k3) with k1+k2+k3 == n, ordered by descending k1 then descending k2.
/// The weights sum to 3^n. Valid for 1 <= n <= 6.
std::vector<MultinomialTerm> multinomial_terms(int n);

/// Frequency-domain symbol of the n-th power of the discrete periodic Laplacian,
/// sampled on the full (M,N,H) frequency grid, x-fastest layout.
struct SpectralKernel {
    int order = 0;
    Dims3 dims;
    std::vector<double> values;

    [[nodiscard]] double at(int p, int q, int r) const {
        return values[static_cast<std::size_t>(p) +
                      static_cast<std::size_t>(dims.x) *
                          (static_cast<std::size_t>(q) +
                           static_cast<std::size_t>(dims.y) * static_cast<std::size_t>(r))];
    }
};

/// values[p,q,r] = 2^n (3 - cos(2 pi p / M) - cos(2 pi q / N) - cos(2 pi r / H))^n.
/// Zero exactly at the zero-frequency bin; all values within [0, 12^n].
/// Requires 1 <= n <= 6 and every axis >= 2.
SpectralKernel laplacian_symbol(int n, Dims3 dims);

/// Discrete periodic smoothness energy of a vector field under the order-n kernel:
/// 0.5 * sum over components and frequencies of symbol * |DFT(w)|^2 / (M*N*H).
/// Non-negative; zero exactly on constant fields; quadratic in w.
double regulariser_energy(const VectorField& w, int n);

}  // namespace dreg
