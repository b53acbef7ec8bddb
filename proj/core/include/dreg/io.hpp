// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>

#include "dreg/metrics.hpp"
#include "dreg/volume.hpp"

namespace dreg {

// Volume container, fixed little-endian layout:
//   offset 0   magic "DREG"
//   offset 4   u32 version = 1
//   offset 8   u8 kind: 0 scalar, 1 vector, 2 label
//   offset 9   3 x u32 dims (M, N, H)
//   offset 21  3 x f64 spacing (mm)
//   offset 45  payload: f32 (scalar: M*N*H; vector: 3*M*N*H interleaved per voxel)
//              or u16 (label), exactly the length implied by the header.
// Trailing bytes and non-finite payload values are rejected on read.

enum class VolumeKind : std::uint8_t { scalar = 0, vector = 1, label = 2 };

using AnyVolume = std::variant<ScalarVolume, VectorField, LabelVolume>;

AnyVolume read_volume(const std::filesystem::path& path);

/// Typed readers; throw io_error when the file's kind does not match.
ScalarVolume read_scalar(const std::filesystem::path& path);
VectorField read_vector(const std::filesystem::path& path);
LabelVolume read_label(const std::filesystem::path& path);
DeformationField read_deformation(const std::filesystem::path& path);

void write_volume(const std::filesystem::path& path, const ScalarVolume& vol);
void write_volume(const std::filesystem::path& path, const VectorField& field);
void write_volume(const std::filesystem::path& path, const LabelVolume& lbl);
void write_volume(const std::filesystem::path& path, const DeformationField& phi);

/// Configuration echo embedded in run reports.
struct ReportConfig {
    std::string data_term;  // "l1" or "l2"
    int order = 0;
    double lambda = 0.0;
    double theta = 0.0;
    int levels = 0;
    std::string profile;    // "capped" or "converged"
    double tol = 0.0;
    double warp_improvement_threshold = 0.0;
    double epsilon = 0.0;
    int threads = 1;
};

struct RunReport {
    std::map<int, double> dice;          // per label
    std::map<int, double> hausdorff_mm;  // per label
    double jacobian_pct_nonpositive = 0.0;
    double runtime_seconds = 0.0;
    int velocity_count = 0;
    ReportConfig config;
};

/// JSON report with keys: dice, hausdorff_mm, jacobian_pct_nonpositive,
/// runtime_seconds, velocity_count, config. Numbers carry 6 significant digits.
void write_report(const std::filesystem::path& path, const RunReport& report);

}  // namespace dreg
