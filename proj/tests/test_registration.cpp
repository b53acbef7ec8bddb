// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dreg/errors.hpp"
#include "dreg/metrics.hpp"
#include "dreg/registration.hpp"
#include "dreg/synth.hpp"
#include "oracles.hpp"

using namespace dreg;

namespace {

// Independent reference chain for the up/down round trip: naive corner-aligned
// upsample by 2 with doubling, then naive block-mean downsample with halving.
VectorField reference_roundtrip(const VectorField& v) {
    const Dims3 fine{2 * v.dims.x, 2 * v.dims.y, 2 * v.dims.z};
    VectorField up(fine, v.spacing);
    for (int z = 0; z < fine.z; ++z) {
        for (int y = 0; y < fine.y; ++y) {
            for (int x = 0; x < fine.x; ++x) {
                auto map = [](int i, int big, int small) {
                    return big <= 1 ? 0.0
                                    : static_cast<double>(i) * (small - 1.0) / (big - 1.0);
                };
                const Vec3 p{map(x, fine.x, v.dims.x), map(y, fine.y, v.dims.y),
                             map(z, fine.z, v.dims.z)};
                up.set(up.index(x, y, z), 2.0 * trilinear_sample(v, p));
            }
        }
    }
    VectorField down(v.dims, v.spacing);
    for (int z = 0; z < v.dims.z; ++z) {
        for (int y = 0; y < v.dims.y; ++y) {
            for (int x = 0; x < v.dims.x; ++x) {
                Vec3 sum;
                for (int dz = 0; dz < 2; ++dz) {
                    for (int dy = 0; dy < 2; ++dy) {
                        for (int dx = 0; dx < 2; ++dx) {
                            sum += up.at(2 * x + dx, 2 * y + dy, 2 * z + dz);
                        }
                    }
                }
                down.set(down.index(x, y, z), (1.0 / 16.0) * sum);  // mean of 8, then / 2
            }
        }
    }
    return down;
}

}  // namespace

TEST_SUITE_BEGIN("registration");

TEST_CASE("downsampling a constant volume keeps the constant") {
    const ScalarVolume img({8, 8, 8}, {1.0, 1.0, 1.0}, 2.5f);
    const auto out = downsample(img);
    CHECK(out.dims == Dims3{4, 4, 4});
    CHECK(out.spacing.x == doctest::Approx(2.0));
    for (float v : out.data) {
        CHECK(v == doctest::Approx(2.5));
    }
}

TEST_CASE("a 2x2x2 block averages to its mean") {
    ScalarVolume img({2, 2, 2}, {1.0, 1.0, 1.0});
    std::iota(img.data.begin(), img.data.end(), 0.0f);
    const auto out = downsample(img);
    CHECK(out.dims == Dims3{1, 1, 1});
    CHECK(out.data[0] == doctest::Approx(3.5));
}

TEST_CASE("downsampling a ramp doubles the per-index slope") {
    ScalarVolume img({8, 4, 4}, {1.0, 1.0, 1.0});
    for (int z = 0; z < 4; ++z) {
        for (int y = 0; y < 4; ++y) {
            for (int x = 0; x < 8; ++x) {
                img.at(x, y, z) = static_cast<float>(x);
            }
        }
    }
    const auto out = downsample(img);
    for (int x = 0; x < 4; ++x) {
        CHECK(out.at(x, 0, 0) == doctest::Approx(2.0 * x + 0.5));
    }
}

TEST_CASE("odd axes are padded by edge replication") {
    ScalarVolume img({3, 2, 2}, {1.0, 1.0, 1.0}, 1.0f);
    const auto out = downsample(img);
    CHECK(out.dims == Dims3{2, 1, 1});
    CHECK(out.at(0, 0, 0) == doctest::Approx(1.0));
    CHECK(out.at(1, 0, 0) == doctest::Approx(1.0));
}

TEST_CASE("upsampling preserves zero and doubles uniform fields") {
    const VectorField zero({4, 4, 4}, {1.0, 1.0, 1.0});
    const auto up_zero = upsample_velocity(zero, {8, 8, 8});
    for (float v : up_zero.data) {
        CHECK(v == 0.0f);
    }

    VectorField uniform({4, 4, 4}, {1.0, 1.0, 1.0});
    for (std::size_t i = 0; i < uniform.dims.voxels(); ++i) {
        uniform.set(i, {1.0, 0.0, 0.0});
    }
    const auto up = upsample_velocity(uniform, {8, 8, 8});
    for (std::size_t i = 0; i < up.dims.voxels(); ++i) {
        const Vec3 u = up.get(i);
        CHECK(u.x == doctest::Approx(2.0));
        CHECK(u.y == doctest::Approx(0.0));
        CHECK(u.z == doctest::Approx(0.0));
    }
}

TEST_CASE("upsampling rejects shrinking targets") {
    const VectorField v({4, 4, 4}, {1.0, 1.0, 1.0});
    CHECK_THROWS_AS(upsample_velocity(v, {3, 4, 4}), std::invalid_argument);
}

TEST_CASE("up/down round trip matches the reference chain and recovers octant corners") {
    // Field constant per 2x2x2 octant of a 4^3 grid.
    VectorField v({4, 4, 4}, {1.0, 1.0, 1.0});
    oracle::Rng rng(13);
    Vec3 octants[2][2][2];
    for (auto& plane : octants) {
        for (auto& row : plane) {
            for (auto& val : row) {
                val = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
            }
        }
    }
    for (int z = 0; z < 4; ++z) {
        for (int y = 0; y < 4; ++y) {
            for (int x = 0; x < 4; ++x) {
                v.set(v.index(x, y, z), octants[z / 2][y / 2][x / 2]);
            }
        }
    }

    // route under test: library upsample, then block-mean downsample + halving
    const auto up = upsample_velocity(v, {8, 8, 8});
    VectorField down(v.dims, v.spacing);
    for (int z = 0; z < 4; ++z) {
        for (int y = 0; y < 4; ++y) {
            for (int x = 0; x < 4; ++x) {
                Vec3 sum;
                for (int dz = 0; dz < 2; ++dz) {
                    for (int dy = 0; dy < 2; ++dy) {
                        for (int dx = 0; dx < 2; ++dx) {
                            sum += up.at(2 * x + dx, 2 * y + dy, 2 * z + dz);
                        }
                    }
                }
                down.set(down.index(x, y, z), (1.0 / 16.0) * sum);
            }
        }
    }

    const auto reference = reference_roundtrip(v);
    for (std::size_t i = 0; i < down.data.size(); ++i) {
        CHECK(down.data[i] == doctest::Approx(reference.data[i]).epsilon(1e-6));
    }
    // corner voxels sample entirely inside one constant octant and must recover it
    for (int cz : {0, 3}) {
        for (int cy : {0, 3}) {
            for (int cx : {0, 3}) {
                const Vec3 got = down.at(cx, cy, cz);
                const Vec3 expected = octants[cz / 2][cy / 2][cx / 2];
                CHECK(std::abs(got.x - expected.x) <= 1e-6);
                CHECK(std::abs(got.y - expected.y) <= 1e-6);
                CHECK(std::abs(got.z - expected.z) <= 1e-6);
            }
        }
    }
}

TEST_CASE("capped profile fixes the per-level budgets") {
    SolverConfig solver;
    solver.lambda = 10.0;
    solver.theta = 0.05;
    const auto cfg = make_registration_config(Profile::capped, solver, 3);
    CHECK(cfg.max_admm_iters_per_level == std::vector<int>{10, 5, 5});
    CHECK(cfg.max_warps_per_level == std::vector<int>{10, 10, 5});
    CHECK(cfg.warp_improvement_threshold == doctest::Approx(0.02));

    const auto converged = make_registration_config(Profile::converged, solver, 3);
    CHECK(converged.solver.tol == doctest::Approx(0.01));
    CHECK(converged.max_warps_per_level.size() == 3);
}

TEST_CASE("registering identical volumes stays near the identity") {
    const auto pair = make_sphere_ellipsoid_case({16, 16, 16});
    SolverConfig solver;
    solver.data_term = 1;
    solver.order = 2;
    solver.lambda = 10.0;
    solver.theta = 0.05;
    const auto cfg = make_registration_config(Profile::capped, solver, 2);
    const auto result = register_pair(pair.target, pair.target, cfg);

    double mean_abs = 0.0;
    for (float v : result.phi.disp.data) {
        mean_abs += std::abs(static_cast<double>(v));
    }
    mean_abs /= static_cast<double>(result.phi.disp.data.size());
    CHECK(mean_abs <= 0.05);

    const auto warped_lbl = warp_labels(pair.target_labels, result.phi);
    CHECK(dice(warped_lbl, pair.target_labels, 1) >= 0.99);
}

TEST_CASE("a translated blob is recovered to sub-voxel accuracy") {
    const Vec3 shift{2.0, 0.0, 0.0};
    const auto pair = make_translate_case({32, 32, 32}, shift);
    SolverConfig solver;
    solver.data_term = 1;
    solver.order = 2;
    solver.lambda = 10.0;
    solver.theta = 0.05;
    const auto cfg = make_registration_config(Profile::capped, solver, 3);
    const auto result = register_pair(pair.target, pair.source, cfg);

    Vec3 mean;
    int count = 0;
    for (std::size_t i = 0; i < pair.target_labels.labels.size(); ++i) {
        if (pair.target_labels.labels[i] == 1) {
            mean += result.phi.disp.get(i);
            ++count;
        }
    }
    REQUIRE(count > 0);
    mean *= 1.0 / count;
    const Vec3 expected{-shift.x, -shift.y, -shift.z};
    CHECK((mean - expected).norm() <= 0.5);

    // the recomputed warp must be what the result carries, bit for bit
    const auto rewarped = warp_image(pair.source, result.phi);
    CHECK(rewarped.data == result.warped.data);
}

TEST_CASE("sphere-to-ellipsoid registration reaches high overlap without folding") {
    const auto pair = make_sphere_ellipsoid_case({32, 32, 32});
    SolverConfig solver;
    solver.data_term = 1;
    solver.order = 2;
    solver.lambda = 5.0;
    solver.theta = 0.05;
    const auto cfg = make_registration_config(Profile::capped, solver, 3);
    const auto result = register_pair(pair.target, pair.source, cfg);

    const auto warped_lbl = warp_labels(pair.source_labels, result.phi);
    CHECK(dice(warped_lbl, pair.target_labels, 1) >= 0.90);
    const auto stats = jacobian_stats(result.phi);
    CHECK(stats.pct_nonpositive == 0.0);
}

TEST_CASE("accepted mean SAD is monotone non-increasing within each level") {
    const auto pair = make_sphere_ellipsoid_case({16, 16, 16});
    SolverConfig solver;
    solver.data_term = 2;
    solver.order = 1;
    solver.lambda = 5.0;
    solver.theta = 0.05;
    const auto cfg = make_registration_config(Profile::capped, solver, 2);
    const auto result = register_pair(pair.target, pair.source, cfg);

    int total_warps = 0;
    for (const auto& level : result.per_level) {
        for (std::size_t i = 1; i < level.mean_sad.size(); ++i) {
            CHECK(level.mean_sad[i] <= level.mean_sad[i - 1]);
        }
        total_warps += level.warps;
    }
    CHECK(result.velocity_count == total_warps);
    const int cap = std::accumulate(cfg.max_warps_per_level.begin(),
                                    cfg.max_warps_per_level.end(), 0);
    CHECK(result.velocity_count <= cap);
}

TEST_CASE("the converged profile stops on its thresholds and still registers") {
    const auto pair = make_sphere_ellipsoid_case({24, 24, 24});
    SolverConfig solver;
    solver.data_term = 1;
    solver.order = 2;
    solver.lambda = 5.0;
    solver.theta = 0.05;
    const auto cfg = make_registration_config(Profile::converged, solver, 2);
    const auto result = register_pair(pair.target, pair.source, cfg);

    // wide safety caps must not be what terminated the run
    CHECK(result.velocity_count <
          cfg.max_warps_per_level[0] + cfg.max_warps_per_level[1]);
    const auto warped_lbl = warp_labels(pair.source_labels, result.phi);
    CHECK(dice(warped_lbl, pair.target_labels, 1) >= 0.90);
    CHECK(jacobian_stats(result.phi).pct_nonpositive == 0.0);
}

TEST_CASE("non-finite inputs are reported as numerical failures") {
    auto pair = make_translate_case({16, 16, 16}, {1.0, 0.0, 0.0});
    pair.source.data[100] = std::numeric_limits<float>::quiet_NaN();
    SolverConfig solver;
    solver.lambda = 1.0;
    solver.theta = 0.05;
    const auto cfg = make_registration_config(Profile::capped, solver, 2);
    CHECK_THROWS_AS(register_pair(pair.target, pair.source, cfg), numeric_error);
}

TEST_CASE("registration is deterministic") {
    const auto pair = make_translate_case({16, 16, 16}, {1.0, 0.0, 0.0});
    SolverConfig solver;
    solver.data_term = 1;
    solver.order = 2;
    solver.lambda = 8.0;
    solver.theta = 0.05;
    const auto cfg = make_registration_config(Profile::capped, solver, 2);
    const auto a = register_pair(pair.target, pair.source, cfg);
    const auto b = register_pair(pair.target, pair.source, cfg);
    CHECK(a.phi.disp.data == b.phi.disp.data);
    CHECK(a.warped.data == b.warped.data);
    CHECK(a.velocity_count == b.velocity_count);
}

TEST_CASE("invalid configurations are rejected") {
    const auto pair = make_translate_case({16, 16, 16}, {1.0, 0.0, 0.0});
    SolverConfig solver;
    solver.lambda = 1.0;
    solver.theta = 0.05;
    auto cfg = make_registration_config(Profile::capped, solver, 2);

    ScalarVolume wrong({8, 16, 16}, {1.0, 1.0, 1.0});
    CHECK_THROWS_AS(register_pair(pair.target, wrong, cfg), std::invalid_argument);

    cfg.max_warps_per_level.pop_back();
    CHECK_THROWS_AS(register_pair(pair.target, pair.source, cfg), std::invalid_argument);

    cfg = make_registration_config(Profile::capped, solver, 2);
    cfg.warp_improvement_threshold = 1.5;
    CHECK_THROWS_AS(register_pair(pair.target, pair.source, cfg), std::invalid_argument);

    // 16^3 cannot sustain 4 levels (needs >= 32)
    cfg = make_registration_config(Profile::capped, solver, 4);
    CHECK_THROWS_AS(register_pair(pair.target, pair.source, cfg), std::invalid_argument);
}

TEST_SUITE_END();
