// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "dreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dreg/parallel.hpp"

namespace dreg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_same_dims(const Dims3& a, const Dims3& b, const char* what) {
    if (!(a == b)) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
}

// 1-D squared Euclidean distance transform (lower envelope of parabolas) over
// sample positions i*step. f may contain +inf; the output is +inf only where no
// finite parabola exists.
void edt_1d(const std::vector<double>& f, std::vector<double>& d, int n, double step) {
    std::vector<int> v(static_cast<std::size_t>(n));
    std::vector<double> z(static_cast<std::size_t>(n) + 1);
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[static_cast<std::size_t>(q)] == kInf) {
            continue;
        }
        const double xq = q * step;
        double s = 0.0;
        while (k >= 0) {
            const double xv = v[static_cast<std::size_t>(k)] * step;
            s = ((f[static_cast<std::size_t>(q)] + xq * xq) -
                 (f[static_cast<std::size_t>(v[static_cast<std::size_t>(k)])] + xv * xv)) /
                (2.0 * (xq - xv));
            if (s > z[static_cast<std::size_t>(k)]) {
                break;
            }
            --k;
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
        } else {
            ++k;
            v[static_cast<std::size_t>(k)] = q;
            z[static_cast<std::size_t>(k)] = s;
            z[static_cast<std::size_t>(k) + 1] = kInf;
        }
    }
    if (k < 0) {
        std::fill(d.begin(), d.begin() + n, kInf);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        const double xq = q * step;
        while (z[static_cast<std::size_t>(j) + 1] < xq) {
            ++j;
        }
        const double xv = v[static_cast<std::size_t>(j)] * step;
        d[static_cast<std::size_t>(q)] =
            (xq - xv) * (xq - xv) + f[static_cast<std::size_t>(v[static_cast<std::size_t>(j)])];
    }
}

// Exact anisotropic squared distance to `mask` over one slice, row pass then column pass.
void slice_edt(const std::vector<bool>& mask, int nx, int ny, double sx, double sy,
               std::vector<double>& dist2) {
    std::vector<double> row(static_cast<std::size_t>(nx));
    std::vector<double> row_out(static_cast<std::size_t>(nx));
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
            row[static_cast<std::size_t>(x)] =
                mask[static_cast<std::size_t>(y) * nx + static_cast<std::size_t>(x)] ? 0.0 : kInf;
        }
        edt_1d(row, row_out, nx, sx);
        for (int x = 0; x < nx; ++x) {
            dist2[static_cast<std::size_t>(y) * nx + static_cast<std::size_t>(x)] =
                row_out[static_cast<std::size_t>(x)];
        }
    }
    std::vector<double> col(static_cast<std::size_t>(ny));
    std::vector<double> col_out(static_cast<std::size_t>(ny));
    for (int x = 0; x < nx; ++x) {
        for (int y = 0; y < ny; ++y) {
            col[static_cast<std::size_t>(y)] =
                dist2[static_cast<std::size_t>(y) * nx + static_cast<std::size_t>(x)];
        }
        edt_1d(col, col_out, ny, sy);
        for (int y = 0; y < ny; ++y) {
            dist2[static_cast<std::size_t>(y) * nx + static_cast<std::size_t>(x)] =
                col_out[static_cast<std::size_t>(y)];
        }
    }
}

double directed_max(const std::vector<bool>& from, const std::vector<double>& dist2_to,
                    std::size_t count) {
    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        if (from[i]) {
            worst = std::max(worst, dist2_to[i]);
        }
    }
    return worst;
}

}  // namespace

LabelVolume::LabelVolume(Dims3 d, Spacing3 s, std::uint16_t fill) : dims(d), spacing(s) {
    if (d.x < 1 || d.y < 1 || d.z < 1) {
        throw std::invalid_argument("label volume dims must be positive");
    }
    if (!(s.x > 0.0) || !(s.y > 0.0) || !(s.z > 0.0)) {
        throw std::invalid_argument("label volume spacing must be positive");
    }
    labels.assign(d.voxels(), fill);
}

double dice(const LabelVolume& a, const LabelVolume& b, int label) {
    check_same_dims(a.dims, b.dims, "dice");
    std::int64_t in_a = 0;
    std::int64_t in_b = 0;
    std::int64_t both = 0;
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
        const bool la = a.labels[i] == label;
        const bool lb = b.labels[i] == label;
        in_a += la;
        in_b += lb;
        both += la && lb;
    }
    if (in_a + in_b == 0) {
        return 1.0;
    }
    return 2.0 * static_cast<double>(both) / static_cast<double>(in_a + in_b);
}

double hausdorff_slice_avg(const LabelVolume& a, const LabelVolume& b, int label) {
    check_same_dims(a.dims, b.dims, "hausdorff_slice_avg");
    const int nx = a.dims.x;
    const int ny = a.dims.y;
    const std::size_t slice_size = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);

    double total = 0.0;
    int contributing = 0;
    std::vector<bool> mask_a(slice_size);
    std::vector<bool> mask_b(slice_size);
    std::vector<double> dist2(slice_size);

    for (int z = 0; z < a.dims.z; ++z) {
        const std::size_t base = slice_size * static_cast<std::size_t>(z);
        bool any_a = false;
        bool any_b = false;
        for (std::size_t i = 0; i < slice_size; ++i) {
            const bool la = a.labels[base + i] == label;
            const bool lb = b.labels[base + i] == label;
            mask_a[i] = la;
            mask_b[i] = lb;
            any_a |= la;
            any_b |= lb;
        }
        if (!any_a || !any_b) {
            continue;  // slices with an empty mask are skipped
        }
        slice_edt(mask_b, nx, ny, a.spacing.x, a.spacing.y, dist2);
        double worst = directed_max(mask_a, dist2, slice_size);
        slice_edt(mask_a, nx, ny, a.spacing.x, a.spacing.y, dist2);
        worst = std::max(worst, directed_max(mask_b, dist2, slice_size));
        total += std::sqrt(worst);
        ++contributing;
    }
    if (contributing == 0) {
        throw std::invalid_argument("hausdorff_slice_avg: no slice has both masks non-empty");
    }
    return total / contributing;
}

LabelVolume warp_labels(const LabelVolume& lbl, const DeformationField& phi) {
    check_same_dims(lbl.dims, phi.disp.dims, "warp_labels");
    LabelVolume out(lbl.dims, lbl.spacing);
    const int nx = lbl.dims.x;
    const int ny = lbl.dims.y;
    const int nz = lbl.dims.z;

    parallel_for(0, nz, [&](std::int64_t z0, std::int64_t z1) {
        for (int z = static_cast<int>(z0); z < static_cast<int>(z1); ++z) {
            for (int y = 0; y < ny; ++y) {
                std::size_t i = lbl.index(0, y, z);
                for (int x = 0; x < nx; ++x, ++i) {
                    const Vec3 u = phi.disp.get(i);
                    const int px = std::clamp(static_cast<int>(std::lround(x + u.x)), 0, nx - 1);
                    const int py = std::clamp(static_cast<int>(std::lround(y + u.y)), 0, ny - 1);
                    const int pz = std::clamp(static_cast<int>(std::lround(z + u.z)), 0, nz - 1);
                    out.labels[i] = lbl.at(px, py, pz);
                }
            }
        }
    });
    return out;
}

JacobianStats jacobian_stats(const DeformationField& phi) {
    const ScalarVolume det = jacobian_determinant(phi);
    const Dims3 d = det.dims;
    std::int64_t nonpositive = 0;
    std::int64_t interior = 0;
    double min_det = std::numeric_limits<double>::max();
    for (int z = 1; z < d.z - 1; ++z) {
        for (int y = 1; y < d.y - 1; ++y) {
            for (int x = 1; x < d.x - 1; ++x) {
                const double value = det.at(x, y, z);
                min_det = std::min(min_det, value);
                nonpositive += value <= 0.0;
                ++interior;
            }
        }
    }
    return {100.0 * static_cast<double>(nonpositive) / static_cast<double>(interior), min_det};
}

}  // namespace dreg
