// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
//
// Test-only reference implementations, kept independent of the library code paths
// they check: naive interpolation/warping loops, dense periodic operators solved
// with Eigen, brute-force metrics, and a sweep-based scalar subproblem solver.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "dreg/metrics.hpp"
#include "dreg/volume.hpp"

namespace oracle {

/// mt19937 with hand-rolled uniform mapping; stable across toolchains.
class Rng {
public:
    explicit Rng(std::uint32_t seed) : gen_(seed) {}
    double uniform() { return gen_() * (1.0 / 4294967296.0); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937 gen_;
};

dreg::ScalarVolume random_volume(dreg::Dims3 dims, std::uint32_t seed, double lo = 0.0,
                                 double hi = 1.0);

dreg::VectorField random_field(dreg::Dims3 dims, std::uint32_t seed, double amplitude);

/// Low-frequency random displacement interpolated from a coarse lattice; amplitude in
/// voxels. Small amplitudes give fields whose composition behaves smoothly.
dreg::VectorField smooth_random_field(dreg::Dims3 dims, std::uint32_t seed, double amplitude);

/// Straight-line re-implementation of trilinear interpolation with clamping.
double naive_trilinear(const dreg::ScalarVolume& vol, const dreg::Vec3& p);

/// Per-voxel gather using naive_trilinear.
dreg::ScalarVolume naive_warp(const dreg::ScalarVolume& img, const dreg::DeformationField& phi);

/// Dense negative discrete Laplacian with periodic wrap, voxels x voxels.
Eigen::MatrixXd dense_neg_laplacian(dreg::Dims3 dims);

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& m, int n);

/// Direct solve of (lambda K^order + theta I) w = theta rhs per component, K the dense
/// periodic negative Laplacian.
dreg::VectorField dense_w_solve(const dreg::VectorField& rhs, int order, double lambda,
                                double theta);

/// 0.5 * sum over components of w_c^T K^order w_c via the dense operator.
double dense_regulariser_energy(const dreg::VectorField& w, int order);

/// Scalar subproblem solved by a three-stage sweep over the line u + t*g:
/// argmin_t |rho(u) + t |g|^2| + (theta/2) t^2 |g|^2. Returns u + t* g.
dreg::Vec3 line_search_v_l1(const dreg::Vec3& g, const dreg::Vec3& u, double intensity_diff,
                            double theta);

/// All-pairs symmetric Hausdorff averaged over slices where both masks are non-empty;
/// returns -1 when no slice contributes.
double brute_force_hausdorff(const dreg::LabelVolume& a, const dreg::LabelVolume& b, int label);

}  // namespace oracle
