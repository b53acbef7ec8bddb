// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <utility>
#include <vector>

#include "dreg/admm.hpp"
#include "dreg/volume.hpp"

namespace dreg {

/// capped: fixed per-level iteration budgets tuned for speed.
/// converged: caps widened to safety bounds, stopping driven by the thresholds.
enum class Profile { capped, converged };

struct RegistrationConfig {
    SolverConfig solver;
    int levels = 3;
    std::vector<int> max_warps_per_level;       // [0] = coarsest level
    std::vector<int> max_admm_iters_per_level;  // [0] = coarsest level
    double warp_improvement_threshold = 0.02;   // relative mean-SAD decrease keeping a level running
    Profile profile = Profile::capped;
    bool smooth_levels = true;                  // 3-tap binomial prefilter on each pyramid level
};

/// Fills the per-level caps for the requested profile. capped at 3 levels gives
/// ADMM iterations (10, 5, 5) coarse-to-fine and warps (10, 10, 5); converged
/// replaces the caps with wide bounds and defaults the solver tolerance to 0.01
/// when none is set.
RegistrationConfig make_registration_config(Profile profile, SolverConfig solver, int levels = 3);

struct LevelLog {
    Dims3 dims;
    int warps = 0;                     // velocity fields accepted into the composition
    std::vector<double> mean_sad;      // [0] = before the first warp, then after each accepted warp
    std::vector<int> solver_iterations;
};

struct RegistrationResult {
    DeformationField phi;    // maps target voxel coordinates to source coordinates
    ScalarVolume warped;     // warp_image(source, phi), original intensity scale
    int velocity_count = 0;
    std::vector<LevelLog> per_level;  // [0] = coarsest
    double elapsed_seconds = 0.0;
};

/// 2x2x2 block averaging; odd axes are padded by edge replication first.
/// Dims are halved (rounded up), spacing doubled.
ScalarVolume downsample(const ScalarVolume& img);

/// Component-wise trilinear resample to target_dims (corner-aligned), then all
/// components scaled by 2: displacements are measured in voxels of the finer grid.
/// target_dims must be >= the source dims on every axis.
VectorField upsample_velocity(const VectorField& v, Dims3 target_dims);

DeformationField upsample_deformation(const DeformationField& phi, Dims3 target_dims);

/// Separable [1 2 1]/4 filter with edge clamping.
ScalarVolume binomial_smooth(const ScalarVolume& img);

/// Mean absolute intensity difference over all voxels.
double mean_sad(const ScalarVolume& a, const ScalarVolume& b);

/// Rescales both volumes with one shared affine map onto [0, 1].
std::pair<ScalarVolume, ScalarVolume> normalize_intensity_pair(const ScalarVolume& a,
                                                               const ScalarVolume& b);

/// Coarse-to-fine registration of source onto target. At each level the driver
/// alternates solve_velocity on the currently warped source with composition of
/// the new velocity into phi, until the warp cap is hit, the relative mean-SAD
/// improvement falls below the threshold, or a warp stops improving (a worsening
/// warp is reverted before the level terminates). phi is upsampled between levels.
/// Requires matching dims and every axis >= 4 * 2^(levels-1).
RegistrationResult register_pair(const ScalarVolume& target, const ScalarVolume& source,
                                 const RegistrationConfig& cfg);

}  // namespace dreg
