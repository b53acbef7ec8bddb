// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "dreg/errors.hpp"
#include "dreg/io.hpp"
#include "oracles.hpp"

using namespace dreg;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "dreg_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::vector<unsigned char> slurp(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void dump(const fs::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("scalar volumes round-trip bit for bit") {
    const auto vol = oracle::random_volume({4, 4, 4}, 3, -2.0, 5.0);
    const auto path = temp_file("scalar.dreg");
    write_volume(path, vol);
    const auto back = read_scalar(path);
    CHECK(back.dims == vol.dims);
    CHECK(back.spacing == vol.spacing);
    CHECK(back.data == vol.data);
}

TEST_CASE("vector fields and labels round-trip bit for bit") {
    const auto field = oracle::random_field({3, 5, 2}, 8, 4.0);
    const auto vec_path = temp_file("vector.dreg");
    write_volume(vec_path, field);
    const auto field_back = read_vector(vec_path);
    CHECK(field_back.data == field.data);
    CHECK(field_back.spacing == field.spacing);

    LabelVolume lbl({4, 3, 2}, {1.2, 1.2, 2.0});
    oracle::Rng rng(9);
    for (auto& v : lbl.labels) {
        v = static_cast<std::uint16_t>(rng.uniform() * 1000.0);
    }
    const auto lbl_path = temp_file("labels.dreg");
    write_volume(lbl_path, lbl);
    const auto lbl_back = read_label(lbl_path);
    CHECK(lbl_back.labels == lbl.labels);
}

TEST_CASE("deformations are stored as vector fields") {
    const DeformationField phi{oracle::random_field({4, 4, 4}, 11, 1.0)};
    const auto path = temp_file("phi.dreg");
    write_volume(path, phi);
    const auto back = read_deformation(path);
    CHECK(back.disp.data == phi.disp.data);
    CHECK_THROWS_AS(read_scalar(path), io_error);  // kind mismatch
}

TEST_CASE("bad magic is rejected") {
    const auto path = temp_file("magic.dreg");
    write_volume(path, oracle::random_volume({2, 2, 2}, 1));
    auto bytes = slurp(path);
    bytes[0] = 'X';
    bytes[1] = 'X';
    dump(path, bytes);
    CHECK_THROWS_AS(read_volume(path), io_error);
}

TEST_CASE("unsupported versions are rejected") {
    const auto path = temp_file("version.dreg");
    write_volume(path, oracle::random_volume({2, 2, 2}, 1));
    auto bytes = slurp(path);
    bytes[4] = 2;
    dump(path, bytes);
    CHECK_THROWS_AS(read_volume(path), io_error);
}

TEST_CASE("unknown kind bytes are rejected") {
    const auto path = temp_file("kind.dreg");
    write_volume(path, oracle::random_volume({2, 2, 2}, 1));
    auto bytes = slurp(path);
    bytes[8] = 3;
    dump(path, bytes);
    CHECK_THROWS_AS(read_volume(path), io_error);
}

TEST_CASE("truncated payloads are rejected") {
    // header advertises 2x2x2 scalars but carries only 7 of the 8 values
    const auto path = temp_file("short.dreg");
    write_volume(path, oracle::random_volume({2, 2, 2}, 2));
    auto bytes = slurp(path);
    bytes.resize(bytes.size() - 4);
    dump(path, bytes);
    CHECK_THROWS_AS(read_volume(path), io_error);
}

TEST_CASE("trailing bytes are rejected") {
    const auto path = temp_file("long.dreg");
    write_volume(path, oracle::random_volume({2, 2, 2}, 2));
    auto bytes = slurp(path);
    bytes.push_back(0);
    dump(path, bytes);
    CHECK_THROWS_AS(read_volume(path), io_error);
}

TEST_CASE("non-finite payload values are rejected") {
    const auto path = temp_file("nan.dreg");
    write_volume(path, oracle::random_volume({2, 2, 2}, 2));
    auto bytes = slurp(path);
    // quiet NaN, little endian, first payload float
    const std::size_t payload = 45;
    bytes[payload] = 0x00;
    bytes[payload + 1] = 0x00;
    bytes[payload + 2] = 0xC0;
    bytes[payload + 3] = 0x7F;
    dump(path, bytes);
    CHECK_THROWS_AS(read_volume(path), io_error);
}

TEST_CASE("missing files raise io errors") {
    CHECK_THROWS_AS(read_volume(temp_file("does_not_exist.dreg")), io_error);
}

TEST_CASE("absurd header dims are rejected before allocation") {
    const auto path = temp_file("huge.dreg");
    write_volume(path, oracle::random_volume({2, 2, 2}, 2));
    auto bytes = slurp(path);
    // dims.x := 2^31 - 1 in the header
    bytes[9] = 0xFF;
    bytes[10] = 0xFF;
    bytes[11] = 0xFF;
    bytes[12] = 0x7F;
    dump(path, bytes);
    CHECK_THROWS_AS(read_volume(path), io_error);
}

TEST_CASE("report for an identity registration carries the contract fields") {
    RunReport report;
    report.dice[1] = 1.0;
    report.hausdorff_mm[1] = 0.0;
    report.jacobian_pct_nonpositive = 0.0;
    report.runtime_seconds = 0.125;
    report.velocity_count = 3;
    report.config = {"l1", 2, 10.0, 0.05, 3, "capped", 0.0, 0.02, 1e-6, 1};

    const auto path = temp_file("report.json");
    write_report(path, report);

    std::ifstream f(path);
    nlohmann::json j;
    f >> j;  // must parse as ordinary JSON
    CHECK(j["dice"]["1"].get<double>() == doctest::Approx(1.0));
    CHECK(j["hausdorff_mm"]["1"].get<double>() == doctest::Approx(0.0));
    CHECK(j["jacobian_pct_nonpositive"].get<double>() == doctest::Approx(0.0));
    CHECK(j["runtime_seconds"].get<double>() == doctest::Approx(0.125));
    CHECK(j["velocity_count"].get<int>() == 3);
    CHECK(j["config"]["data_term"].get<std::string>() == "l1");
    CHECK(j["config"]["order"].get<int>() == 2);
    CHECK(j["config"]["lambda"].get<double>() == doctest::Approx(10.0));
    CHECK(j["config"]["profile"].get<std::string>() == "capped");
    CHECK(j["config"]["threads"].get<int>() == 1);
}

TEST_CASE("report numbers are serialised with 6 significant digits") {
    RunReport report;
    report.dice[2] = 0.123456789;
    report.runtime_seconds = 1.23456789e-3;
    report.config = {"l2", 1, 1.0 / 3.0, 0.05, 3, "converged", 0.01, 0.02, 1e-6, 1};
    const auto path = temp_file("digits.json");
    write_report(path, report);

    std::ifstream f(path);
    nlohmann::json j;
    f >> j;
    CHECK(j["dice"]["2"].get<double>() == doctest::Approx(0.123457).epsilon(1e-9));
    CHECK(j["runtime_seconds"].get<double>() == doctest::Approx(0.00123457).epsilon(1e-9));
    CHECK(j["config"]["lambda"].get<double>() == doctest::Approx(0.333333).epsilon(1e-9));
}

TEST_SUITE_END();
