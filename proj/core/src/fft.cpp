// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "dreg/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <vector>

namespace dreg {

namespace {
// The FFTW planner mutates global state; executions are thread-safe once planned.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct Fft3::Impl {
    std::vector<double> real;
    std::vector<std::complex<double>> freq;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    ~Impl() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (fwd) {
            fftw_destroy_plan(fwd);
        }
        if (bwd) {
            fftw_destroy_plan(bwd);
        }
    }
};

Fft3::Fft3(Dims3 dims) : dims_(dims) {
    if (dims.x < 1 || dims.y < 1 || dims.z < 1) {
        throw std::invalid_argument("Fft3: dims must be positive");
    }
    half_x_ = static_cast<std::size_t>(dims.x / 2 + 1);
    bins_ = half_x_ * static_cast<std::size_t>(dims.y) * static_cast<std::size_t>(dims.z);

    impl_ = std::make_unique<Impl>();
    impl_->real.assign(dims.voxels(), 0.0);
    impl_->freq.assign(bins_, {0.0, 0.0});

    // x-fastest storage equals row-major (H, N, M); FFTW_ESTIMATE keeps planning
    // deterministic across runs.
    auto* cplx = reinterpret_cast<fftw_complex*>(impl_->freq.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    impl_->fwd = fftw_plan_dft_r2c_3d(dims.z, dims.y, dims.x, impl_->real.data(), cplx,
                                      FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_c2r_3d(dims.z, dims.y, dims.x, cplx, impl_->real.data(),
                                      FFTW_ESTIMATE);
    if (!impl_->fwd || !impl_->bwd) {
        throw std::runtime_error("Fft3: plan creation failed");
    }
}

Fft3::~Fft3() = default;

double* Fft3::real() { return impl_->real.data(); }

std::complex<double>* Fft3::spectrum() { return impl_->freq.data(); }

void Fft3::forward() { fftw_execute(impl_->fwd); }

void Fft3::inverse() { fftw_execute(impl_->bwd); }

}  // namespace dreg
