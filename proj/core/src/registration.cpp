// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "dreg/registration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dreg/errors.hpp"
#include "dreg/parallel.hpp"

namespace dreg {

namespace {

void check_same_dims(const Dims3& a, const Dims3& b, const char* what) {
    if (!(a == b)) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }
}

// Corner-aligned coordinate of target index i on a source axis of extent m.
inline double source_coord(int i, int target_extent, int source_extent) {
    if (target_extent <= 1) {
        return 0.0;
    }
    return static_cast<double>(i) * static_cast<double>(source_extent - 1) /
           static_cast<double>(target_extent - 1);
}

ScalarVolume smooth_axis(const ScalarVolume& img, int axis) {
    ScalarVolume out(img.dims, img.spacing);
    const int nx = img.dims.x;
    const int ny = img.dims.y;
    const int nz = img.dims.z;
    const int extent = axis == 0 ? nx : (axis == 1 ? ny : nz);
    const std::size_t stride = axis == 0 ? 1
                               : axis == 1
                                   ? static_cast<std::size_t>(nx)
                                   : static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);

    parallel_for(0, nz, [&](std::int64_t z0, std::int64_t z1) {
        const float* f = img.data.data();
        for (int z = static_cast<int>(z0); z < static_cast<int>(z1); ++z) {
            for (int y = 0; y < ny; ++y) {
                std::size_t i = img.index(0, y, z);
                for (int x = 0; x < nx; ++x, ++i) {
                    const int pos = axis == 0 ? x : (axis == 1 ? y : z);
                    const double lo = f[pos > 0 ? i - stride : i];
                    const double hi = f[pos < extent - 1 ? i + stride : i];
                    out.data[i] = static_cast<float>(0.25 * (lo + hi) + 0.5 * f[i]);
                }
            }
        }
    });
    return out;
}

}  // namespace

RegistrationConfig make_registration_config(Profile profile, SolverConfig solver, int levels) {
    if (levels < 1) {
        throw std::invalid_argument("registration: levels must be >= 1");
    }
    RegistrationConfig cfg;
    cfg.profile = profile;
    cfg.levels = levels;
    if (profile == Profile::capped) {
        cfg.max_admm_iters_per_level.assign(static_cast<std::size_t>(levels), 5);
        cfg.max_admm_iters_per_level.front() = 10;  // coarsest level gets the larger budget
        cfg.max_warps_per_level.assign(static_cast<std::size_t>(levels), 10);
        cfg.max_warps_per_level.back() = 5;  // finest level runs fewer warps
    } else {
        cfg.max_admm_iters_per_level.assign(static_cast<std::size_t>(levels), 200);
        cfg.max_warps_per_level.assign(static_cast<std::size_t>(levels), 50);
        if (solver.tol <= 0.0) {
            solver.tol = 0.01;
        }
    }
    cfg.solver = std::move(solver);
    return cfg;
}

ScalarVolume downsample(const ScalarVolume& img) {
    const Dims3 d = img.dims;
    const Dims3 out_dims{(d.x + 1) / 2, (d.y + 1) / 2, (d.z + 1) / 2};
    ScalarVolume out(out_dims,
                     {img.spacing.x * 2.0, img.spacing.y * 2.0, img.spacing.z * 2.0});

    // Clamped reads realise the edge-replication padding for odd extents.
    parallel_for(0, out_dims.z, [&](std::int64_t z0, std::int64_t z1) {
        for (int z = static_cast<int>(z0); z < static_cast<int>(z1); ++z) {
            for (int y = 0; y < out_dims.y; ++y) {
                for (int x = 0; x < out_dims.x; ++x) {
                    double sum = 0.0;
                    for (int dz = 0; dz < 2; ++dz) {
                        for (int dy = 0; dy < 2; ++dy) {
                            for (int dx = 0; dx < 2; ++dx) {
                                sum += img.at(std::min(2 * x + dx, d.x - 1),
                                              std::min(2 * y + dy, d.y - 1),
                                              std::min(2 * z + dz, d.z - 1));
                            }
                        }
                    }
                    out.at(x, y, z) = static_cast<float>(sum / 8.0);
                }
            }
        }
    });
    return out;
}

VectorField upsample_velocity(const VectorField& v, Dims3 target_dims) {
    if (target_dims.x < v.dims.x || target_dims.y < v.dims.y || target_dims.z < v.dims.z) {
        throw std::invalid_argument("upsample_velocity: target dims smaller than source");
    }
    VectorField out(target_dims,
                    {v.spacing.x / 2.0, v.spacing.y / 2.0, v.spacing.z / 2.0});

    parallel_for(0, target_dims.z, [&](std::int64_t z0, std::int64_t z1) {
        for (int z = static_cast<int>(z0); z < static_cast<int>(z1); ++z) {
            for (int y = 0; y < target_dims.y; ++y) {
                std::size_t i = out.index(0, y, z);
                for (int x = 0; x < target_dims.x; ++x, ++i) {
                    const Vec3 p{source_coord(x, target_dims.x, v.dims.x),
                                 source_coord(y, target_dims.y, v.dims.y),
                                 source_coord(z, target_dims.z, v.dims.z)};
                    out.set(i, 2.0 * trilinear_sample(v, p));
                }
            }
        }
    });
    return out;
}

DeformationField upsample_deformation(const DeformationField& phi, Dims3 target_dims) {
    return {upsample_velocity(phi.disp, target_dims)};
}

ScalarVolume binomial_smooth(const ScalarVolume& img) {
    return smooth_axis(smooth_axis(smooth_axis(img, 0), 1), 2);
}

double mean_sad(const ScalarVolume& a, const ScalarVolume& b) {
    check_same_dims(a.dims, b.dims, "mean_sad");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        sum += std::abs(static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]));
    }
    return sum / static_cast<double>(a.data.size());
}

std::pair<ScalarVolume, ScalarVolume> normalize_intensity_pair(const ScalarVolume& a,
                                                               const ScalarVolume& b) {
    check_same_dims(a.dims, b.dims, "normalize_intensity_pair");
    float lo = std::numeric_limits<float>::max();
    float hi = std::numeric_limits<float>::lowest();
    for (float v : a.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (float v : b.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double range = static_cast<double>(hi) - static_cast<double>(lo);
    const double scale = range > 0.0 ? 1.0 / range : 0.0;

    auto apply = [&](const ScalarVolume& src) {
        ScalarVolume out(src.dims, src.spacing);
        for (std::size_t i = 0; i < src.data.size(); ++i) {
            out.data[i] = static_cast<float>((static_cast<double>(src.data[i]) - lo) * scale);
        }
        return out;
    };
    return {apply(a), apply(b)};
}

RegistrationResult register_pair(const ScalarVolume& target, const ScalarVolume& source,
                                 const RegistrationConfig& cfg) {
    check_same_dims(target.dims, source.dims, "register_pair");
    validate(cfg.solver);
    if (cfg.levels < 1) {
        throw std::invalid_argument("register_pair: levels must be >= 1");
    }
    const auto levels = static_cast<std::size_t>(cfg.levels);
    if (cfg.max_warps_per_level.size() != levels ||
        cfg.max_admm_iters_per_level.size() != levels) {
        throw std::invalid_argument("register_pair: per-level caps must list one entry per level");
    }
    if (!(cfg.warp_improvement_threshold > 0.0 && cfg.warp_improvement_threshold < 1.0)) {
        throw std::invalid_argument("register_pair: warp improvement threshold must be in (0,1)");
    }
    const int min_extent = 4 << (cfg.levels - 1);
    if (target.dims.x < min_extent || target.dims.y < min_extent || target.dims.z < min_extent) {
        throw std::invalid_argument("register_pair: dims too small for the level count");
    }
    if (!all_finite(target) || !all_finite(source)) {
        throw numeric_error("register_pair: input volumes contain non-finite values");
    }

    const auto t_start = std::chrono::steady_clock::now();

    auto [norm_target, norm_source] = normalize_intensity_pair(target, source);

    // Pyramids indexed coarse-to-fine: [0] = coarsest, [levels-1] = original resolution.
    std::vector<ScalarVolume> pyr_target(levels);
    std::vector<ScalarVolume> pyr_source(levels);
    pyr_target[levels - 1] = std::move(norm_target);
    pyr_source[levels - 1] = std::move(norm_source);
    for (std::size_t l = levels - 1; l > 0; --l) {
        pyr_target[l - 1] = downsample(pyr_target[l]);
        pyr_source[l - 1] = downsample(pyr_source[l]);
    }
    if (cfg.smooth_levels) {
        for (std::size_t l = 0; l < levels; ++l) {
            pyr_target[l] = binomial_smooth(pyr_target[l]);
            pyr_source[l] = binomial_smooth(pyr_source[l]);
        }
    }

    RegistrationResult result;
    result.per_level.resize(levels);
    DeformationField phi;

    for (std::size_t l = 0; l < levels; ++l) {
        const ScalarVolume& level_target = pyr_target[l];
        const ScalarVolume& level_source = pyr_source[l];
        const Dims3 dims = level_target.dims;

        if (l == 0) {
            phi = DeformationField::identity(dims, level_target.spacing);
        } else {
            phi = upsample_deformation(phi, dims);
            phi.disp.spacing = level_target.spacing;
        }

        SolverConfig solver = cfg.solver;
        solver.max_iters = cfg.max_admm_iters_per_level[l];

        LevelLog& log = result.per_level[l];
        log.dims = dims;

        ScalarVolume warped = warp_image(level_source, phi);
        double sad_prev = mean_sad(warped, level_target);
        log.mean_sad.push_back(sad_prev);

        const int max_warps = cfg.max_warps_per_level[l];
        for (int warp = 0; warp < max_warps; ++warp) {
            SolveResult solved = solve_velocity(level_target, warped, solver);
            DeformationField phi_candidate = compose_deformation(phi, solved.velocity);
            ScalarVolume warped_candidate = warp_image(level_source, phi_candidate);
            const double sad_new = mean_sad(warped_candidate, level_target);

            if (sad_new > sad_prev) {
                break;  // the candidate worsened the fit; keep the previous composition
            }
            phi = std::move(phi_candidate);
            warped = std::move(warped_candidate);
            log.mean_sad.push_back(sad_new);
            log.solver_iterations.push_back(solved.diagnostics.iterations);
            log.warps += 1;
            result.velocity_count += 1;

            const double improvement =
                (sad_prev - sad_new) / std::max(sad_prev, std::numeric_limits<double>::min());
            sad_prev = sad_new;
            if (improvement < cfg.warp_improvement_threshold) {
                break;
            }
        }
    }

    if (!all_finite(phi.disp)) {
        throw numeric_error("register_pair: deformation contains non-finite values");
    }
    result.phi = std::move(phi);
    result.warped = warp_image(source, result.phi);
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

}  // namespace dreg
