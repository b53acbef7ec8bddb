// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "dreg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace dreg {

namespace {

// mt19937 raw draws mapped to uniforms by hand: the engine sequence is pinned by the
// standard while the library distributions are not, so outputs stay identical across
// toolchains.
class Uniform {
public:
    explicit Uniform(std::uint32_t seed) : gen_(seed) {}

    double next() { return gen_() * (1.0 / 4294967296.0); }  // [0, 1)
    double next(double lo, double hi) { return lo + (hi - lo) * next(); }

private:
    std::mt19937 gen_;
};

constexpr Spacing3 kUnitSpacing{1.0, 1.0, 1.0};

Vec3 centre_of(Dims3 dims) {
    return {0.5 * (dims.x - 1), 0.5 * (dims.y - 1), 0.5 * (dims.z - 1)};
}

int min_extent(Dims3 dims) { return std::min(dims.x, std::min(dims.y, dims.z)); }

double gaussian(const Vec3& p, const Vec3& centre, double sigma) {
    return std::exp(-(p - centre).squared_norm() / (2.0 * sigma * sigma));
}

// Smooth displacement backed by a coarse lattice of random vectors, trilinearly
// interpolated; coarse cells span several voxels, keeping spatial derivatives small.
class CoarseField {
public:
    CoarseField(Dims3 dims, std::uint32_t seed, double amplitude) : dims_(dims) {
        coarse_ = {std::max(2, dims.x / 8), std::max(2, dims.y / 8), std::max(2, dims.z / 8)};
        values_.resize(3 * coarse_.voxels());
        Uniform rng(seed);
        for (auto& v : values_) {
            v = rng.next(-amplitude, amplitude);
        }
    }

    [[nodiscard]] Vec3 at(const Vec3& p) const {
        const Vec3 g{coord(p.x, dims_.x, coarse_.x), coord(p.y, dims_.y, coarse_.y),
                     coord(p.z, dims_.z, coarse_.z)};
        Vec3 out;
        for (int c = 0; c < 3; ++c) {
            const double v = sample_component(g, c);
            (c == 0 ? out.x : c == 1 ? out.y : out.z) = v;
        }
        return out;
    }

private:
    static double coord(double x, int fine, int coarse) {
        if (fine <= 1) {
            return 0.0;
        }
        return std::clamp(x, 0.0, fine - 1.0) * (coarse - 1.0) / (fine - 1.0);
    }

    [[nodiscard]] double value(int x, int y, int z, int c) const {
        const std::size_t i = static_cast<std::size_t>(x) +
                              static_cast<std::size_t>(coarse_.x) *
                                  (static_cast<std::size_t>(y) +
                                   static_cast<std::size_t>(coarse_.y) *
                                       static_cast<std::size_t>(z));
        return values_[3 * i + static_cast<std::size_t>(c)];
    }

    [[nodiscard]] double sample_component(const Vec3& g, int c) const {
        const int x0 = std::min(static_cast<int>(g.x), coarse_.x - 1);
        const int y0 = std::min(static_cast<int>(g.y), coarse_.y - 1);
        const int z0 = std::min(static_cast<int>(g.z), coarse_.z - 1);
        const int x1 = std::min(x0 + 1, coarse_.x - 1);
        const int y1 = std::min(y0 + 1, coarse_.y - 1);
        const int z1 = std::min(z0 + 1, coarse_.z - 1);
        const double fx = g.x - x0;
        const double fy = g.y - y0;
        const double fz = g.z - z0;

        const double c00 = value(x0, y0, z0, c) + (value(x1, y0, z0, c) - value(x0, y0, z0, c)) * fx;
        const double c10 = value(x0, y1, z0, c) + (value(x1, y1, z0, c) - value(x0, y1, z0, c)) * fx;
        const double c01 = value(x0, y0, z1, c) + (value(x1, y0, z1, c) - value(x0, y0, z1, c)) * fx;
        const double c11 = value(x0, y1, z1, c) + (value(x1, y1, z1, c) - value(x0, y1, z1, c)) * fx;
        const double c0 = c00 + (c10 - c00) * fy;
        const double c1 = c01 + (c11 - c01) * fy;
        return c0 + (c1 - c0) * fz;
    }

    Dims3 dims_;
    Dims3 coarse_;
    std::vector<double> values_;
};

template <typename Intensity, typename Label>
SynthPair fill_pair(Dims3 dims, Intensity&& intensity, Label&& label) {
    SynthPair pair{ScalarVolume(dims, kUnitSpacing), ScalarVolume(dims, kUnitSpacing),
                   LabelVolume(dims, kUnitSpacing), LabelVolume(dims, kUnitSpacing)};
    std::size_t i = 0;
    for (int z = 0; z < dims.z; ++z) {
        for (int y = 0; y < dims.y; ++y) {
            for (int x = 0; x < dims.x; ++x, ++i) {
                const Vec3 p{static_cast<double>(x), static_cast<double>(y),
                             static_cast<double>(z)};
                pair.target.data[i] = static_cast<float>(intensity(p, false));
                pair.source.data[i] = static_cast<float>(intensity(p, true));
                pair.target_labels.labels[i] = label(p, false);
                pair.source_labels.labels[i] = label(p, true);
            }
        }
    }
    return pair;
}

}  // namespace

SynthPair make_translate_case(Dims3 dims, const Vec3& shift) {
    const Vec3 centre = centre_of(dims);
    const double sigma = std::max(2.0, min_extent(dims) * 6.0 / 64.0);
    const double radius = sigma * std::sqrt(2.0 * std::log(2.0));  // half-maximum surface

    auto intensity = [&](const Vec3& p, bool source) {
        const Vec3 q = source ? p + shift : p;
        return gaussian(q, centre, sigma);
    };
    auto label = [&](const Vec3& p, bool source) -> std::uint16_t {
        const Vec3 q = source ? p + shift : p;
        return (q - centre).norm() <= radius ? 1 : 0;
    };
    return fill_pair(dims, intensity, label);
}

SynthPair make_sphere_ellipsoid_case(Dims3 dims) {
    const Vec3 centre = centre_of(dims);
    const double radius = 0.22 * min_extent(dims);
    const Vec3 sphere_axes{radius, radius, radius};
    const Vec3 ellipsoid_axes{1.25 * radius, 0.8 * radius, 1.05 * radius};
    const double edge = 1.5;  // voxels of smooth falloff at the surface

    auto level = [](const Vec3& p, const Vec3& centre_, const Vec3& axes) {
        const Vec3 d = p - centre_;
        return std::sqrt((d.x / axes.x) * (d.x / axes.x) + (d.y / axes.y) * (d.y / axes.y) +
                         (d.z / axes.z) * (d.z / axes.z));
    };
    auto intensity = [&](const Vec3& p, bool source) {
        const Vec3& axes = source ? ellipsoid_axes : sphere_axes;
        const double signed_depth = (1.0 - level(p, centre, axes)) * radius;
        return 1.0 / (1.0 + std::exp(-signed_depth / edge));
    };
    auto label = [&](const Vec3& p, bool source) -> std::uint16_t {
        const Vec3& axes = source ? ellipsoid_axes : sphere_axes;
        return level(p, centre, axes) <= 1.0 ? 1 : 0;
    };
    return fill_pair(dims, intensity, label);
}

SynthPair make_random_smooth_case(Dims3 dims, std::uint32_t seed) {
    Uniform rng(seed);
    const double extent = min_extent(dims);

    struct Blob {
        Vec3 centre;
        double sigma;
        double amplitude;
    };
    std::vector<Blob> blobs(3);
    for (auto& blob : blobs) {
        blob.centre = {rng.next(0.3, 0.7) * (dims.x - 1), rng.next(0.3, 0.7) * (dims.y - 1),
                       rng.next(0.3, 0.7) * (dims.z - 1)};
        blob.sigma = rng.next(0.08, 0.14) * extent;
        blob.amplitude = rng.next(0.5, 1.0);
    }
    // Amplitude ~1.5 voxels over >= 8-voxel coarse cells keeps |grad u| well below
    // the folding threshold, so the ground-truth map stays invertible.
    const CoarseField warp_field(dims, seed + 1, std::min(1.5, extent / 16.0));

    auto base = [&](const Vec3& p) {
        double v = 0.0;
        for (const auto& blob : blobs) {
            v += blob.amplitude * gaussian(p, blob.centre, blob.sigma);
        }
        return std::min(v, 1.0);
    };
    auto inside = [&](const Vec3& p) -> std::uint16_t {
        for (const auto& blob : blobs) {
            if ((p - blob.centre).norm() <= blob.sigma * std::sqrt(2.0 * std::log(2.0))) {
                return 1;
            }
        }
        return 0;
    };
    auto intensity = [&](const Vec3& p, bool source) {
        return source ? base(p + warp_field.at(p)) : base(p);
    };
    auto label = [&](const Vec3& p, bool source) -> std::uint16_t {
        return source ? inside(p + warp_field.at(p)) : inside(p);
    };
    return fill_pair(dims, intensity, label);
}

void add_salt_pepper(ScalarVolume& vol, double fraction, std::uint32_t seed) {
    Uniform rng(seed);
    for (auto& v : vol.data) {
        if (rng.next() < fraction) {
            v = rng.next() < 0.5 ? 0.0f : 1.0f;
        }
    }
}

}  // namespace dreg
