// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace dreg {

/// Grid extents (M, N, H). Storage is x-fastest: index = x + M*(y + N*z).
struct Dims3 {
    int x = 0;
    int y = 0;
    int z = 0;

    [[nodiscard]] std::size_t voxels() const {
        return static_cast<std::size_t>(x) * static_cast<std::size_t>(y) *
               static_cast<std::size_t>(z);
    }
    friend bool operator==(const Dims3&, const Dims3&) = default;
};

/// Voxel spacing in mm along each axis. Carried through all containers; gradients,
/// displacements and velocities are expressed in voxel units regardless.
struct Spacing3 {
    double x = 1.0;
    double y = 1.0;
    double z = 1.0;
    friend bool operator==(const Spacing3&, const Spacing3&) = default;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
    friend Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
    friend Vec3 operator*(Vec3 a, double s) { return a *= s; }
    friend Vec3 operator*(double s, Vec3 a) { return a *= s; }

    [[nodiscard]] double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    [[nodiscard]] double squared_norm() const { return dot(*this); }
    [[nodiscard]] double norm() const { return std::sqrt(squared_norm()); }
};

/// Dense 3-D scalar field, float storage, x-fastest layout.
struct ScalarVolume {
    Dims3 dims;
    Spacing3 spacing;
    std::vector<float> data;

    ScalarVolume() = default;
    ScalarVolume(Dims3 d, Spacing3 s, float fill = 0.0f);

    [[nodiscard]] std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims.x) *
                   (static_cast<std::size_t>(y) +
                    static_cast<std::size_t>(dims.y) * static_cast<std::size_t>(z));
    }
    [[nodiscard]] float at(int x, int y, int z) const { return data[index(x, y, z)]; }
    float& at(int x, int y, int z) { return data[index(x, y, z)]; }
};

/// Dense 3-D field of 3-vectors, interleaved per voxel (vx, vy, vz), float storage.
struct VectorField {
    Dims3 dims;
    Spacing3 spacing;
    std::vector<float> data;  // 3 * dims.voxels() entries

    VectorField() = default;
    VectorField(Dims3 d, Spacing3 s);

    [[nodiscard]] std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims.x) *
                   (static_cast<std::size_t>(y) +
                    static_cast<std::size_t>(dims.y) * static_cast<std::size_t>(z));
    }
    [[nodiscard]] Vec3 get(std::size_t voxel) const {
        return {data[3 * voxel], data[3 * voxel + 1], data[3 * voxel + 2]};
    }
    void set(std::size_t voxel, const Vec3& v) {
        data[3 * voxel] = static_cast<float>(v.x);
        data[3 * voxel + 1] = static_cast<float>(v.y);
        data[3 * voxel + 2] = static_cast<float>(v.z);
    }
    [[nodiscard]] Vec3 at(int x, int y, int z) const { return get(index(x, y, z)); }
};

/// Deformation phi(x) = x + disp(x), displacements in voxel units of its own grid.
struct DeformationField {
    VectorField disp;

    static DeformationField identity(Dims3 d, Spacing3 s) { return {VectorField(d, s)}; }
};

inline DeformationField make_deformation(VectorField v) { return {std::move(v)}; }

/// Trilinear interpolation of the 8 surrounding voxels; p is clamped per axis to
/// [0, dim-1] before interpolation, making the sampler total on finite inputs.
double trilinear_sample(const ScalarVolume& vol, const Vec3& p);

/// Component-wise trilinear interpolation of a vector field, same clamping rule.
Vec3 trilinear_sample(const VectorField& field, const Vec3& p);

/// out(x) = img(x + disp(x)). Throws std::invalid_argument on dimension mismatch.
ScalarVolume warp_image(const ScalarVolume& img, const DeformationField& phi);

/// Central differences in the interior, one-sided on boundary faces; intensity per voxel.
/// Requires every axis >= 2.
VectorField image_gradient(const ScalarVolume& img);

/// Returns phi' = phi o (Id + v): disp'(x) = v(x) + disp(x + v(x)) with the stored
/// displacement sampled trilinearly. v is the newest velocity in the composition chain.
DeformationField compose_deformation(const DeformationField& phi, const VectorField& v);

/// Per-voxel determinant of d(x + disp)/dx, central differences in the interior and
/// one-sided on faces. Requires every axis >= 3.
ScalarVolume jacobian_determinant(const DeformationField& phi);

bool all_finite(const ScalarVolume& vol);
bool all_finite(const VectorField& field);

}  // namespace dreg
