// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
//
// Microbenchmarks for the hot paths: sampling, warping, the three closed-form
// solver updates, one full velocity solve and one full registration.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "dreg/admm.hpp"
#include "dreg/registration.hpp"
#include "dreg/regularizer.hpp"
#include "dreg/synth.hpp"
#include "dreg/volume.hpp"

namespace {

using namespace dreg;

ScalarVolume random_volume(Dims3 dims, std::uint32_t seed) {
    ScalarVolume vol(dims, {1.0, 1.0, 1.0});
    std::mt19937 gen(seed);
    for (auto& v : vol.data) {
        v = static_cast<float>(gen() * (1.0 / 4294967296.0));
    }
    return vol;
}

VectorField random_field(Dims3 dims, std::uint32_t seed, double amplitude) {
    VectorField field(dims, {1.0, 1.0, 1.0});
    std::mt19937 gen(seed);
    for (auto& v : field.data) {
        v = static_cast<float>((gen() * (2.0 / 4294967296.0) - 1.0) * amplitude);
    }
    return field;
}

void BM_trilinear_sample(benchmark::State& state) {
    const auto vol = random_volume({64, 64, 64}, 1);
    double p = 0.0;
    for (auto _ : state) {
        p += 0.37;
        if (p > 60.0) {
            p -= 60.0;
        }
        benchmark::DoNotOptimize(trilinear_sample(vol, {p, 0.5 * p, 0.25 * p}));
    }
}
BENCHMARK(BM_trilinear_sample);

void BM_warp_image(benchmark::State& state) {
    const auto dims = static_cast<int>(state.range(0));
    const auto img = random_volume({dims, dims, dims}, 2);
    const DeformationField phi{random_field({dims, dims, dims}, 3, 1.5)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(warp_image(img, phi));
    }
    state.SetItemsProcessed(state.iterations() * img.dims.voxels());
}
BENCHMARK(BM_warp_image)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_image_gradient(benchmark::State& state) {
    const auto img = random_volume({64, 64, 64}, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(image_gradient(img));
    }
    state.SetItemsProcessed(state.iterations() * img.dims.voxels());
}
BENCHMARK(BM_image_gradient)->Unit(benchmark::kMillisecond);

void BM_v_update_l1(benchmark::State& state) {
    const Dims3 dims{64, 64, 64};
    const auto target = random_volume(dims, 5);
    const auto warped = random_volume(dims, 6);
    const auto grad = random_field(dims, 7, 1.0);
    const auto w_hat = random_field(dims, 8, 1.0);
    const auto b_hat = random_field(dims, 9, 1.0);
    SolverConfig cfg;
    cfg.theta = 0.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(v_update_l1(target, warped, grad, w_hat, b_hat, cfg));
    }
    state.SetItemsProcessed(state.iterations() * dims.voxels());
}
BENCHMARK(BM_v_update_l1)->Unit(benchmark::kMillisecond);

void BM_v_update_l2(benchmark::State& state) {
    const Dims3 dims{64, 64, 64};
    const auto target = random_volume(dims, 10);
    const auto warped = random_volume(dims, 11);
    const auto grad = random_field(dims, 12, 1.0);
    const auto w_hat = random_field(dims, 13, 1.0);
    const auto b_hat = random_field(dims, 14, 1.0);
    SolverConfig cfg;
    cfg.data_term = 2;
    cfg.theta = 0.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(v_update_l2(target, warped, grad, w_hat, b_hat, cfg));
    }
    state.SetItemsProcessed(state.iterations() * dims.voxels());
}
BENCHMARK(BM_v_update_l2)->Unit(benchmark::kMillisecond);

void BM_w_update(benchmark::State& state) {
    const Dims3 dims{64, 64, 64};
    const auto v = random_field(dims, 15, 1.0);
    const auto b_hat = random_field(dims, 16, 1.0);
    const auto kernel = laplacian_symbol(2, dims);
    SolverConfig cfg;
    cfg.order = 2;
    cfg.lambda = 5.0;
    cfg.theta = 0.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(w_update(v, b_hat, kernel, cfg));
    }
    state.SetItemsProcessed(state.iterations() * dims.voxels());
}
BENCHMARK(BM_w_update)->Unit(benchmark::kMillisecond);

void BM_solve_velocity(benchmark::State& state) {
    const auto pair = make_translate_case({32, 32, 32}, {2, 0, 0});
    SolverConfig cfg;
    cfg.data_term = 1;
    cfg.order = 2;
    cfg.lambda = 5.0;
    cfg.theta = 0.05;
    cfg.max_iters = 10;
    cfg.tol = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_velocity(pair.target, pair.source, cfg));
    }
}
BENCHMARK(BM_solve_velocity)->Unit(benchmark::kMillisecond);

void BM_register_pair(benchmark::State& state) {
    const auto dims = static_cast<int>(state.range(0));
    const auto pair = make_translate_case({dims, dims, dims}, {3, 0, 0});
    SolverConfig solver;
    solver.data_term = 1;
    solver.order = 2;
    solver.lambda = 5.0;
    solver.theta = 0.1;
    const auto cfg = make_registration_config(Profile::capped, solver, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(register_pair(pair.target, pair.source, cfg));
    }
}
BENCHMARK(BM_register_pair)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
