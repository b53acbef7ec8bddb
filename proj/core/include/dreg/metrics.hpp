// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <vector>

#include "dreg/volume.hpp"

namespace dreg {

/// Integer segmentation labels on the same grid convention as ScalarVolume; 0 = background.
struct LabelVolume {
    Dims3 dims;
    Spacing3 spacing;
    std::vector<std::uint16_t> labels;

    LabelVolume() = default;
    LabelVolume(Dims3 d, Spacing3 s, std::uint16_t fill = 0);

    [[nodiscard]] std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims.x) *
                   (static_cast<std::size_t>(y) +
                    static_cast<std::size_t>(dims.y) * static_cast<std::size_t>(z));
    }
    [[nodiscard]] std::uint16_t at(int x, int y, int z) const { return labels[index(x, y, z)]; }
    std::uint16_t& at(int x, int y, int z) { return labels[index(x, y, z)]; }
};

/// 2 |A n B| / (|A| + |B|) over voxels carrying `label`; 1.0 when both masks are empty.
double dice(const LabelVolume& a, const LabelVolume& b, int label);

/// Symmetric Hausdorff distance per z-slice, in mm using in-plane spacing, averaged
/// over slices where both masks are non-empty. Throws std::invalid_argument when no
/// slice contributes.
double hausdorff_slice_avg(const LabelVolume& a, const LabelVolume& b, int label);

/// Nearest-neighbour resampling of labels at x + disp(x); labels are never blended.
LabelVolume warp_labels(const LabelVolume& lbl, const DeformationField& phi);

struct JacobianStats {
    double pct_nonpositive = 0.0;  // percent of interior voxels with determinant <= 0
    double min_det = 0.0;          // minimum determinant over interior voxels
};

/// Interior-only statistics of jacobian_determinant(phi); boundary voxels, where the
/// stencil is one-sided, are excluded.
JacobianStats jacobian_stats(const DeformationField& phi);

}  // namespace dreg
