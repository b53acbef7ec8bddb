// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dreg/regularizer.hpp"
#include "oracles.hpp"

using namespace dreg;

TEST_SUITE_BEGIN("regularizer");

TEST_CASE("first order terms are the three unit derivatives") {
    const auto terms = multinomial_terms(1);
    REQUIRE(terms.size() == 3);
    CHECK(terms[0].k1 == 1);
    CHECK(terms[0].coef == 1);
    CHECK(terms[1].k2 == 1);
    CHECK(terms[1].coef == 1);
    CHECK(terms[2].k3 == 1);
    CHECK(terms[2].coef == 1);
}

TEST_CASE("second order coefficients follow n!/(k1!k2!k3!)") {
    const auto terms = multinomial_terms(2);
    REQUIRE(terms.size() == 6);
    // order: (2,0,0),(1,1,0),(1,0,1),(0,2,0),(0,1,1),(0,0,2)
    const int expected_k[6][3] = {{2, 0, 0}, {1, 1, 0}, {1, 0, 1},
                                  {0, 2, 0}, {0, 1, 1}, {0, 0, 2}};
    const int expected_coef[6] = {1, 2, 2, 1, 2, 1};
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(terms[i].k1 == expected_k[i][0]);
        CHECK(terms[i].k2 == expected_k[i][1]);
        CHECK(terms[i].k3 == expected_k[i][2]);
        CHECK(terms[i].coef == expected_coef[i]);
    }
}

TEST_CASE("coefficients sum to 3^n and count to (n+1)(n+2)/2") {
    for (int n = 1; n <= 6; ++n) {
        const auto terms = multinomial_terms(n);
        CHECK(terms.size() == static_cast<std::size_t>((n + 1) * (n + 2) / 2));
        int sum = 0;
        int expected = 1;
        for (const auto& t : terms) {
            sum += t.coef;
            CHECK(t.k1 + t.k2 + t.k3 == n);
        }
        for (int i = 0; i < n; ++i) {
            expected *= 3;
        }
        CHECK(sum == expected);
    }
}

TEST_CASE("order outside [1,6] is rejected") {
    CHECK_THROWS_AS(multinomial_terms(0), std::invalid_argument);
    CHECK_THROWS_AS(multinomial_terms(7), std::invalid_argument);
    CHECK_THROWS_AS(laplacian_symbol(0, {4, 4, 4}), std::invalid_argument);
    CHECK_THROWS_AS(laplacian_symbol(7, {4, 4, 4}), std::invalid_argument);
    CHECK_THROWS_AS(laplacian_symbol(1, {1, 4, 4}), std::invalid_argument);
}

TEST_CASE("symbol is zero exactly at zero frequency") {
    for (int n = 1; n <= 3; ++n) {
        CHECK(laplacian_symbol(n, {4, 6, 8}).at(0, 0, 0) == 0.0);
        CHECK(laplacian_symbol(n, {5, 5, 5}).at(0, 0, 0) == 0.0);
    }
}

TEST_CASE("symbol at the pure-x Nyquist bin is 4^n for even M") {
    const Dims3 dims{8, 6, 4};
    for (int n = 1; n <= 3; ++n) {
        const auto kernel = laplacian_symbol(n, dims);
        CHECK(kernel.at(4, 0, 0) == doctest::Approx(std::pow(4.0, n)).epsilon(1e-12));
    }
    // all-axis Nyquist with n=2: (2*6)^2
    CHECK(laplacian_symbol(2, dims).at(4, 3, 2) == doctest::Approx(144.0).epsilon(1e-12));
}

TEST_CASE("symbol values stay within [0, 12^n] and vanish only at zero frequency") {
    for (int n : {1, 3}) {
        const Dims3 dims{6, 5, 4};
        const auto kernel = laplacian_symbol(n, dims);
        const double bound = std::pow(12.0, n);
        for (int r = 0; r < dims.z; ++r) {
            for (int q = 0; q < dims.y; ++q) {
                for (int p = 0; p < dims.x; ++p) {
                    const double v = kernel.at(p, q, r);
                    CHECK(v >= 0.0);
                    CHECK(v <= bound);
                    if (p != 0 || q != 0 || r != 0) {
                        CHECK(v > 0.0);
                    }
                }
            }
        }
    }
}

TEST_CASE("energy vanishes on constant and zero fields") {
    VectorField constant({6, 6, 6}, {1.0, 1.0, 1.0});
    for (std::size_t i = 0; i < constant.dims.voxels(); ++i) {
        constant.set(i, {1.25, -0.5, 3.0});
    }
    CHECK(regulariser_energy(constant, 1) <= 1e-12);
    CHECK(regulariser_energy(constant, 3) <= 1e-12);
    const VectorField zero({6, 6, 6}, {1.0, 1.0, 1.0});
    CHECK(regulariser_energy(zero, 2) == 0.0);
}

TEST_CASE("energy of a sinusoid matches the dense quadratic form") {
    const Dims3 dims{8, 8, 8};
    VectorField w(dims, {1.0, 1.0, 1.0});
    for (int z = 0; z < dims.z; ++z) {
        for (int y = 0; y < dims.y; ++y) {
            for (int x = 0; x < dims.x; ++x) {
                w.set(w.index(x, y, z),
                      {std::sin(2.0 * std::numbers::pi * x / dims.x), 0.0, 0.0});
            }
        }
    }
    const double spectral = regulariser_energy(w, 1);
    const double dense = oracle::dense_regulariser_energy(w, 1);
    CHECK(spectral == doctest::Approx(dense).epsilon(1e-9));
}

TEST_CASE("energy of random fields matches the dense quadratic form for n up to 3") {
    // one even and one odd x extent: the odd case has no self-conjugate Nyquist bin
    for (const Dims3 dims : {Dims3{4, 6, 4}, Dims3{5, 4, 4}}) {
        for (int n = 1; n <= 3; ++n) {
            const auto w = oracle::random_field(
                dims, 100 + static_cast<std::uint32_t>(n + dims.x), 1.0);
            const double spectral = regulariser_energy(w, n);
            const double dense = oracle::dense_regulariser_energy(w, n);
            CHECK(spectral == doctest::Approx(dense).epsilon(1e-9));
        }
    }
}

TEST_CASE("energy is quadratically homogeneous and non-negative") {
    const auto w = oracle::random_field({6, 6, 6}, 5, 2.0);
    const double base = regulariser_energy(w, 2);
    CHECK(base >= 0.0);
    VectorField scaled = w;
    const double alpha = 3.25;  // exactly representable, so scaling adds no float noise
    for (auto& v : scaled.data) {
        v = static_cast<float>(v * alpha);
    }
    CHECK(regulariser_energy(scaled, 2) ==
          doctest::Approx(alpha * alpha * base).epsilon(1e-6));
}

TEST_SUITE_END();
