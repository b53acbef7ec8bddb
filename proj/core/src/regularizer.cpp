// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "dreg/regularizer.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dreg/fft.hpp"

namespace dreg {

namespace {

constexpr int kMaxOrder = 6;

int factorial(int n) {
    int f = 1;
    for (int i = 2; i <= n; ++i) {
        f *= i;
    }
    return f;
}

std::vector<double> axis_cosines(int n) {
    std::vector<double> c(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        c[static_cast<std::size_t>(k)] = std::cos(2.0 * std::numbers::pi * k / n);
    }
    c[0] = 1.0;  // keep the zero bin exact
    return c;
}

}  // namespace

std::vector<MultinomialTerm> multinomial_terms(int n) {
    if (n < 1 || n > kMaxOrder) {
        throw std::invalid_argument("multinomial_terms: order must be in [1, 6]");
    }
    std::vector<MultinomialTerm> terms;
    terms.reserve(static_cast<std::size_t>((n + 1) * (n + 2) / 2));
    const int nf = factorial(n);
    for (int k1 = n; k1 >= 0; --k1) {
        for (int k2 = n - k1; k2 >= 0; --k2) {
            const int k3 = n - k1 - k2;
            terms.push_back({k1, k2, k3, nf / (factorial(k1) * factorial(k2) * factorial(k3))});
        }
    }
    return terms;
}

SpectralKernel laplacian_symbol(int n, Dims3 dims) {
    if (n < 1 || n > kMaxOrder) {
        throw std::invalid_argument("laplacian_symbol: order must be in [1, 6]");
    }
    if (dims.x < 2 || dims.y < 2 || dims.z < 2) {
        throw std::invalid_argument("laplacian_symbol: every axis must have size >= 2");
    }

    const auto cx = axis_cosines(dims.x);
    const auto cy = axis_cosines(dims.y);
    const auto cz = axis_cosines(dims.z);

    SpectralKernel kernel{n, dims, std::vector<double>(dims.voxels())};
    std::size_t i = 0;
    for (int r = 0; r < dims.z; ++r) {
        for (int q = 0; q < dims.y; ++q) {
            const double yz = 3.0 - cy[static_cast<std::size_t>(q)] - cz[static_cast<std::size_t>(r)];
            for (int p = 0; p < dims.x; ++p, ++i) {
                const double base = 2.0 * (yz - cx[static_cast<std::size_t>(p)]);
                double v = base;
                for (int e = 1; e < n; ++e) {
                    v *= base;
                }
                kernel.values[i] = v;
            }
        }
    }
    return kernel;
}

double regulariser_energy(const VectorField& w, int n) {
    const Dims3 dims = w.dims;
    const SpectralKernel kernel = laplacian_symbol(n, dims);  // validates n and dims
    Fft3 fft(dims);
    const std::size_t voxels = dims.voxels();
    const int half = dims.x / 2;

    double energy = 0.0;
    for (int c = 0; c < 3; ++c) {
        double* real = fft.real();
        for (std::size_t i = 0; i < voxels; ++i) {
            real[i] = w.data[3 * i + static_cast<std::size_t>(c)];
        }
        fft.forward();
        const std::complex<double>* spec = fft.spectrum();
        // Hermitian half-spectrum: interior x bins stand for a conjugate pair.
        for (int r = 0; r < dims.z; ++r) {
            for (int q = 0; q < dims.y; ++q) {
                for (int p = 0; p <= half; ++p) {
                    const bool self_conjugate = (p == 0) || (2 * p == dims.x);
                    const double weight = self_conjugate ? 1.0 : 2.0;
                    energy += weight * kernel.at(p, q, r) * std::norm(spec[fft.bin(p, q, r)]);
                }
            }
        }
    }
    return 0.5 * energy / static_cast<double>(voxels);
}

}  // namespace dreg
