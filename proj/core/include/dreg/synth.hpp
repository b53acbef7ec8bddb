// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>

#include "dreg/metrics.hpp"
#include "dreg/volume.hpp"

namespace dreg {

/// Deterministic synthetic registration pair with ground-truth labels.
/// Intensities live in [0, 1]; spacing is 1 mm isotropic.
struct SynthPair {
    ScalarVolume target;        // I0
    ScalarVolume source;        // I1
    LabelVolume target_labels;
    LabelVolume source_labels;
};

/// Gaussian blob; the source samples the target at x + shift, so the ground-truth
/// displacement recovered by registration is -shift. sigma scales with the grid
/// (6 voxels at 64^3). Label 1 marks the blob support.
SynthPair make_translate_case(Dims3 dims, const Vec3& shift);

/// Sphere (target) against an ellipsoid of equal centre (source), smooth edges,
/// label 1 inside the surface.
SynthPair make_sphere_ellipsoid_case(Dims3 dims);

/// Sum-of-blobs image deformed by a seeded random smooth displacement field whose
/// gradients are small enough to keep the ground-truth map invertible. Source image
/// and labels are evaluated analytically at the displaced positions.
SynthPair make_random_smooth_case(Dims3 dims, std::uint32_t seed);

/// Replaces a deterministic pseudo-random fraction of voxels with 0 or 1.
void add_salt_pepper(ScalarVolume& vol, double fraction, std::uint32_t seed);

}  // namespace dreg
