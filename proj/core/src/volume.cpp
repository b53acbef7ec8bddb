// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "dreg/volume.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dreg/parallel.hpp"

namespace dreg {

namespace {

void check_geometry(const Dims3& d, const Spacing3& s) {
    if (d.x < 1 || d.y < 1 || d.z < 1) {
        throw std::invalid_argument("volume dims must be positive");
    }
    if (!(s.x > 0.0) || !(s.y > 0.0) || !(s.z > 0.0)) {
        throw std::invalid_argument("voxel spacing must be positive");
    }
}

void check_same_dims(const Dims3& a, const Dims3& b, const char* what) {
    if (!(a == b)) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
}

struct AxisSample {
    int lo;
    int hi;
    double frac;
};

inline AxisSample axis_sample(double coord, int dim) {
    const double c = std::clamp(coord, 0.0, static_cast<double>(dim - 1));
    const double f = std::floor(c);
    const int lo = static_cast<int>(f);
    return {lo, std::min(lo + 1, dim - 1), c - f};
}

}  // namespace

ScalarVolume::ScalarVolume(Dims3 d, Spacing3 s, float fill) : dims(d), spacing(s) {
    check_geometry(d, s);
    data.assign(d.voxels(), fill);
}

VectorField::VectorField(Dims3 d, Spacing3 s) : dims(d), spacing(s) {
    check_geometry(d, s);
    data.assign(3 * d.voxels(), 0.0f);
}

double trilinear_sample(const ScalarVolume& vol, const Vec3& p) {
    const AxisSample ax = axis_sample(p.x, vol.dims.x);
    const AxisSample ay = axis_sample(p.y, vol.dims.y);
    const AxisSample az = axis_sample(p.z, vol.dims.z);

    const double c000 = vol.at(ax.lo, ay.lo, az.lo);
    const double c100 = vol.at(ax.hi, ay.lo, az.lo);
    const double c010 = vol.at(ax.lo, ay.hi, az.lo);
    const double c110 = vol.at(ax.hi, ay.hi, az.lo);
    const double c001 = vol.at(ax.lo, ay.lo, az.hi);
    const double c101 = vol.at(ax.hi, ay.lo, az.hi);
    const double c011 = vol.at(ax.lo, ay.hi, az.hi);
    const double c111 = vol.at(ax.hi, ay.hi, az.hi);

    const double c00 = c000 + (c100 - c000) * ax.frac;
    const double c10 = c010 + (c110 - c010) * ax.frac;
    const double c01 = c001 + (c101 - c001) * ax.frac;
    const double c11 = c011 + (c111 - c011) * ax.frac;
    const double c0 = c00 + (c10 - c00) * ay.frac;
    const double c1 = c01 + (c11 - c01) * ay.frac;
    return c0 + (c1 - c0) * az.frac;
}

Vec3 trilinear_sample(const VectorField& field, const Vec3& p) {
    const AxisSample ax = axis_sample(p.x, field.dims.x);
    const AxisSample ay = axis_sample(p.y, field.dims.y);
    const AxisSample az = axis_sample(p.z, field.dims.z);

    const Vec3 c000 = field.at(ax.lo, ay.lo, az.lo);
    const Vec3 c100 = field.at(ax.hi, ay.lo, az.lo);
    const Vec3 c010 = field.at(ax.lo, ay.hi, az.lo);
    const Vec3 c110 = field.at(ax.hi, ay.hi, az.lo);
    const Vec3 c001 = field.at(ax.lo, ay.lo, az.hi);
    const Vec3 c101 = field.at(ax.hi, ay.lo, az.hi);
    const Vec3 c011 = field.at(ax.lo, ay.hi, az.hi);
    const Vec3 c111 = field.at(ax.hi, ay.hi, az.hi);

    const Vec3 c00 = c000 + (c100 - c000) * ax.frac;
    const Vec3 c10 = c010 + (c110 - c010) * ax.frac;
    const Vec3 c01 = c001 + (c101 - c001) * ax.frac;
    const Vec3 c11 = c011 + (c111 - c011) * ax.frac;
    const Vec3 c0 = c00 + (c10 - c00) * ay.frac;
    const Vec3 c1 = c01 + (c11 - c01) * ay.frac;
    return c0 + (c1 - c0) * az.frac;
}

ScalarVolume warp_image(const ScalarVolume& img, const DeformationField& phi) {
    check_same_dims(img.dims, phi.disp.dims, "warp_image");
    ScalarVolume out(img.dims, img.spacing);
    const int nx = img.dims.x;
    const int ny = img.dims.y;
    const int nz = img.dims.z;

    parallel_for(0, nz, [&](std::int64_t z0, std::int64_t z1) {
        for (int z = static_cast<int>(z0); z < static_cast<int>(z1); ++z) {
            for (int y = 0; y < ny; ++y) {
                std::size_t i = img.index(0, y, z);
                for (int x = 0; x < nx; ++x, ++i) {
                    const Vec3 u = phi.disp.get(i);
                    const Vec3 p{x + u.x, y + u.y, z + u.z};
                    out.data[i] = static_cast<float>(trilinear_sample(img, p));
                }
            }
        }
    });
    return out;
}

VectorField image_gradient(const ScalarVolume& img) {
    if (img.dims.x < 2 || img.dims.y < 2 || img.dims.z < 2) {
        throw std::invalid_argument("image_gradient: every axis must have size >= 2");
    }
    VectorField grad(img.dims, img.spacing);
    const int nx = img.dims.x;
    const int ny = img.dims.y;
    const int nz = img.dims.z;
    const std::size_t sx = 1;
    const std::size_t sy = static_cast<std::size_t>(nx);
    const std::size_t sz = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);

    // Central differences in the interior, one-sided on the faces.
    auto diff = [](const float* f, std::size_t i, int pos, int dim, std::size_t stride) {
        if (pos == 0) {
            return static_cast<double>(f[i + stride]) - static_cast<double>(f[i]);
        }
        if (pos == dim - 1) {
            return static_cast<double>(f[i]) - static_cast<double>(f[i - stride]);
        }
        return 0.5 * (static_cast<double>(f[i + stride]) - static_cast<double>(f[i - stride]));
    };

    parallel_for(0, nz, [&](std::int64_t z0, std::int64_t z1) {
        const float* f = img.data.data();
        for (int z = static_cast<int>(z0); z < static_cast<int>(z1); ++z) {
            for (int y = 0; y < ny; ++y) {
                std::size_t i = img.index(0, y, z);
                for (int x = 0; x < nx; ++x, ++i) {
                    grad.set(i, {diff(f, i, x, nx, sx), diff(f, i, y, ny, sy),
                                 diff(f, i, z, nz, sz)});
                }
            }
        }
    });
    return grad;
}

DeformationField compose_deformation(const DeformationField& phi, const VectorField& v) {
    check_same_dims(phi.disp.dims, v.dims, "compose_deformation");
    DeformationField out{VectorField(phi.disp.dims, phi.disp.spacing)};
    const int nx = v.dims.x;
    const int ny = v.dims.y;
    const int nz = v.dims.z;

    parallel_for(0, nz, [&](std::int64_t z0, std::int64_t z1) {
        for (int z = static_cast<int>(z0); z < static_cast<int>(z1); ++z) {
            for (int y = 0; y < ny; ++y) {
                std::size_t i = v.index(0, y, z);
                for (int x = 0; x < nx; ++x, ++i) {
                    const Vec3 step = v.get(i);
                    const Vec3 p{x + step.x, y + step.y, z + step.z};
                    out.disp.set(i, step + trilinear_sample(phi.disp, p));
                }
            }
        }
    });
    return out;
}

ScalarVolume jacobian_determinant(const DeformationField& phi) {
    const Dims3 d = phi.disp.dims;
    if (d.x < 3 || d.y < 3 || d.z < 3) {
        throw std::invalid_argument("jacobian_determinant: every axis must have size >= 3");
    }
    ScalarVolume det(d, phi.disp.spacing);
    const int nx = d.x;
    const int ny = d.y;
    const int nz = d.z;
    const std::size_t sx = 3;
    const std::size_t sy = 3 * static_cast<std::size_t>(nx);
    const std::size_t sz = 3 * static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);

    // Derivative of displacement component c along one axis; the identity part of
    // phi(x) = x + u(x) contributes the Kronecker delta added by the caller.
    auto du = [](const float* u, std::size_t i, int pos, int dim, std::size_t stride) {
        if (pos == 0) {
            return static_cast<double>(u[i + stride]) - static_cast<double>(u[i]);
        }
        if (pos == dim - 1) {
            return static_cast<double>(u[i]) - static_cast<double>(u[i - stride]);
        }
        return 0.5 * (static_cast<double>(u[i + stride]) - static_cast<double>(u[i - stride]));
    };

    parallel_for(0, nz, [&](std::int64_t z0, std::int64_t z1) {
        const float* u = phi.disp.data.data();
        for (int z = static_cast<int>(z0); z < static_cast<int>(z1); ++z) {
            for (int y = 0; y < ny; ++y) {
                std::size_t vox = det.index(0, y, z);
                for (int x = 0; x < nx; ++x, ++vox) {
                    const std::size_t i = 3 * vox;
                    double j[3][3];
                    for (int c = 0; c < 3; ++c) {
                        j[c][0] = du(u, i + c, x, nx, sx) + (c == 0 ? 1.0 : 0.0);
                        j[c][1] = du(u, i + c, y, ny, sy) + (c == 1 ? 1.0 : 0.0);
                        j[c][2] = du(u, i + c, z, nz, sz) + (c == 2 ? 1.0 : 0.0);
                    }
                    const double value = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
                                         j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
                                         j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
                    det.data[vox] = static_cast<float>(value);
                }
            }
        }
    });
    return det;
}

bool all_finite(const ScalarVolume& vol) {
    return std::all_of(vol.data.begin(), vol.data.end(),
                       [](float v) { return std::isfinite(v); });
}

bool all_finite(const VectorField& field) {
    return std::all_of(field.data.begin(), field.data.end(),
                       [](float v) { return std::isfinite(v); });
}

}  // namespace dreg
