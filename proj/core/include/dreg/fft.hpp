// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <complex>
#include <cstddef>
#include <memory>

#include "dreg/volume.hpp"

namespace dreg {

/// Real-to-complex 3-D FFT workspace on an (M,N,H) x-fastest grid, double precision.
/// Owns the real and half-spectrum buffers; plans are created deterministically
/// (estimate-mode planning, no runtime measurement), so repeated runs produce
/// bit-identical transforms. Plan creation is serialised internally; execution on
/// distinct instances is safe from multiple threads.
class Fft3 {
public:
    explicit Fft3(Dims3 dims);
    ~Fft3();

    Fft3(const Fft3&) = delete;
    Fft3& operator=(const Fft3&) = delete;

    [[nodiscard]] Dims3 dims() const { return dims_; }

    /// Number of stored frequency bins: (M/2 + 1) * N * H. The x axis is halved;
    /// the remaining bins are implied by Hermitian symmetry of real input.
    [[nodiscard]] std::size_t bin_count() const { return bins_; }

    /// Real-space scratch buffer, dims().voxels() entries, x-fastest.
    [[nodiscard]] double* real();

    /// Half-spectrum scratch buffer; index with bin(p, q, r), p in [0, M/2].
    [[nodiscard]] std::complex<double>* spectrum();

    [[nodiscard]] std::size_t bin(int p, int q, int r) const {
        return static_cast<std::size_t>(p) +
               half_x_ * (static_cast<std::size_t>(q) +
                          static_cast<std::size_t>(dims_.y) * static_cast<std::size_t>(r));
    }

    /// real() -> spectrum(), unnormalised.
    void forward();

    /// spectrum() -> real(), unnormalised: a forward/inverse round trip scales by voxels().
    void inverse();

private:
    struct Impl;
    Dims3 dims_;
    std::size_t half_x_ = 0;
    std::size_t bins_ = 0;
    std::unique_ptr<Impl> impl_;
};

}  // namespace dreg
