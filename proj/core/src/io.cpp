// Copyright the dreg authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#include "dreg/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "dreg/errors.hpp"

namespace dreg {

namespace {

constexpr char kMagic[4] = {'D', 'R', 'E', 'G'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 + 1 + 3 * 4 + 3 * 8;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xffu));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xffu));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xffu));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xffu));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
    }
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | p[i];
    }
    return v;
}

std::vector<unsigned char> encode_header(VolumeKind kind, const Dims3& dims,
                                         const Spacing3& spacing) {
    std::vector<unsigned char> out;
    out.reserve(kHeaderBytes);
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, kVersion);
    out.push_back(static_cast<unsigned char>(kind));
    put_u32(out, static_cast<std::uint32_t>(dims.x));
    put_u32(out, static_cast<std::uint32_t>(dims.y));
    put_u32(out, static_cast<std::uint32_t>(dims.z));
    put_u64(out, std::bit_cast<std::uint64_t>(spacing.x));
    put_u64(out, std::bit_cast<std::uint64_t>(spacing.y));
    put_u64(out, std::bit_cast<std::uint64_t>(spacing.z));
    return out;
}

void append_f32(std::vector<unsigned char>& out, const std::vector<float>& values) {
    for (float v : values) {
        put_u32(out, std::bit_cast<std::uint32_t>(v));
    }
}

void write_bytes(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw io_error("cannot open for writing: " + path.string());
    }
    file.write(reinterpret_cast<const char*>(bytes.data()),
               static_cast<std::streamsize>(bytes.size()));
    if (!file) {
        throw io_error("write failed: " + path.string());
    }
}

struct Header {
    VolumeKind kind;
    Dims3 dims;
    Spacing3 spacing;
};

Header decode_header(const std::vector<unsigned char>& bytes, const std::filesystem::path& path) {
    if (bytes.size() < kHeaderBytes) {
        throw io_error("truncated header: " + path.string());
    }
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw io_error("bad magic: " + path.string());
    }
    if (get_u32(bytes.data() + 4) != kVersion) {
        throw io_error("unsupported version: " + path.string());
    }
    const unsigned char kind_byte = bytes[8];
    if (kind_byte > 2) {
        throw io_error("unknown volume kind: " + path.string());
    }
    Header h;
    h.kind = static_cast<VolumeKind>(kind_byte);
    const std::uint32_t raw_dims[3] = {get_u32(bytes.data() + 9), get_u32(bytes.data() + 13),
                                       get_u32(bytes.data() + 17)};
    constexpr std::uint32_t kMaxExtent = 65536;
    std::uint64_t voxels = 1;
    for (std::uint32_t d : raw_dims) {
        if (d < 1 || d > kMaxExtent) {
            throw io_error("dims out of range: " + path.string());
        }
        voxels *= d;
    }
    if (voxels > (std::uint64_t{1} << 31)) {
        throw io_error("volume too large: " + path.string());
    }
    h.dims = {static_cast<int>(raw_dims[0]), static_cast<int>(raw_dims[1]),
              static_cast<int>(raw_dims[2])};
    h.spacing = {std::bit_cast<double>(get_u64(bytes.data() + 21)),
                 std::bit_cast<double>(get_u64(bytes.data() + 29)),
                 std::bit_cast<double>(get_u64(bytes.data() + 37))};
    if (!std::isfinite(h.spacing.x) || !std::isfinite(h.spacing.y) ||
        !std::isfinite(h.spacing.z) || h.spacing.x <= 0.0 || h.spacing.y <= 0.0 ||
        h.spacing.z <= 0.0) {
        throw io_error("invalid spacing: " + path.string());
    }
    return h;
}

std::vector<float> decode_f32_payload(const std::vector<unsigned char>& bytes,
                                      std::size_t count, const std::filesystem::path& path) {
    const std::size_t expected = kHeaderBytes + 4 * count;
    if (bytes.size() < expected) {
        throw io_error("truncated payload: " + path.string());
    }
    if (bytes.size() > expected) {
        throw io_error("trailing bytes: " + path.string());
    }
    std::vector<float> values(count);
    const unsigned char* p = bytes.data() + kHeaderBytes;
    for (std::size_t i = 0; i < count; ++i, p += 4) {
        values[i] = std::bit_cast<float>(get_u32(p));
        if (!std::isfinite(values[i])) {
            throw io_error("non-finite payload value: " + path.string());
        }
    }
    return values;
}

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary | std::ios::ate);
    if (!file) {
        throw io_error("cannot open: " + path.string());
    }
    const std::streamsize size = file.tellg();
    file.seekg(0);
    std::vector<unsigned char> bytes(static_cast<std::size_t>(size));
    file.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!file) {
        throw io_error("read failed: " + path.string());
    }
    return bytes;
}

// Round to 6 significant digits through the shortest decimal form.
double sig6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::strtod(buf, nullptr);
}

}  // namespace

AnyVolume read_volume(const std::filesystem::path& path) {
    const auto bytes = read_bytes(path);
    const Header h = decode_header(bytes, path);
    const std::size_t voxels = h.dims.voxels();

    switch (h.kind) {
        case VolumeKind::scalar: {
            ScalarVolume vol(h.dims, h.spacing);
            vol.data = decode_f32_payload(bytes, voxels, path);
            return vol;
        }
        case VolumeKind::vector: {
            VectorField field(h.dims, h.spacing);
            field.data = decode_f32_payload(bytes, 3 * voxels, path);
            return field;
        }
        case VolumeKind::label: {
            const std::size_t expected = kHeaderBytes + 2 * voxels;
            if (bytes.size() < expected) {
                throw io_error("truncated payload: " + path.string());
            }
            if (bytes.size() > expected) {
                throw io_error("trailing bytes: " + path.string());
            }
            LabelVolume lbl(h.dims, h.spacing);
            const unsigned char* p = bytes.data() + kHeaderBytes;
            for (std::size_t i = 0; i < voxels; ++i, p += 2) {
                lbl.labels[i] = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
            }
            return lbl;
        }
    }
    throw io_error("unknown volume kind: " + path.string());
}

ScalarVolume read_scalar(const std::filesystem::path& path) {
    auto any = read_volume(path);
    if (auto* vol = std::get_if<ScalarVolume>(&any)) {
        return std::move(*vol);
    }
    throw io_error("expected a scalar volume: " + path.string());
}

VectorField read_vector(const std::filesystem::path& path) {
    auto any = read_volume(path);
    if (auto* field = std::get_if<VectorField>(&any)) {
        return std::move(*field);
    }
    throw io_error("expected a vector field: " + path.string());
}

LabelVolume read_label(const std::filesystem::path& path) {
    auto any = read_volume(path);
    if (auto* lbl = std::get_if<LabelVolume>(&any)) {
        return std::move(*lbl);
    }
    throw io_error("expected a label volume: " + path.string());
}

DeformationField read_deformation(const std::filesystem::path& path) {
    return {read_vector(path)};
}

void write_volume(const std::filesystem::path& path, const ScalarVolume& vol) {
    auto bytes = encode_header(VolumeKind::scalar, vol.dims, vol.spacing);
    bytes.reserve(bytes.size() + 4 * vol.data.size());
    append_f32(bytes, vol.data);
    write_bytes(path, bytes);
}

void write_volume(const std::filesystem::path& path, const VectorField& field) {
    auto bytes = encode_header(VolumeKind::vector, field.dims, field.spacing);
    bytes.reserve(bytes.size() + 4 * field.data.size());
    append_f32(bytes, field.data);
    write_bytes(path, bytes);
}

void write_volume(const std::filesystem::path& path, const LabelVolume& lbl) {
    auto bytes = encode_header(VolumeKind::label, lbl.dims, lbl.spacing);
    bytes.reserve(bytes.size() + 2 * lbl.labels.size());
    for (std::uint16_t v : lbl.labels) {
        bytes.push_back(static_cast<unsigned char>(v & 0xffu));
        bytes.push_back(static_cast<unsigned char>((v >> 8) & 0xffu));
    }
    write_bytes(path, bytes);
}

void write_volume(const std::filesystem::path& path, const DeformationField& phi) {
    write_volume(path, phi.disp);
}

void write_report(const std::filesystem::path& path, const RunReport& report) {
    nlohmann::ordered_json j;
    auto label_map = [](const std::map<int, double>& values) {
        nlohmann::ordered_json m = nlohmann::ordered_json::object();
        for (const auto& [label, value] : values) {
            m[std::to_string(label)] = sig6(value);
        }
        return m;
    };
    j["dice"] = label_map(report.dice);
    j["hausdorff_mm"] = label_map(report.hausdorff_mm);
    j["jacobian_pct_nonpositive"] = sig6(report.jacobian_pct_nonpositive);
    j["runtime_seconds"] = sig6(report.runtime_seconds);
    j["velocity_count"] = report.velocity_count;
    j["config"] = {{"data_term", report.config.data_term},
                   {"order", report.config.order},
                   {"lambda", sig6(report.config.lambda)},
                   {"theta", sig6(report.config.theta)},
                   {"levels", report.config.levels},
                   {"profile", report.config.profile},
                   {"tol", sig6(report.config.tol)},
                   {"warp_improvement_threshold", sig6(report.config.warp_improvement_threshold)},
                   {"epsilon", sig6(report.config.epsilon)},
                   {"threads", report.config.threads}};

    std::ofstream file(path, std::ios::trunc);
    if (!file) {
        throw io_error("cannot open for writing: " + path.string());
    }
    file << j.dump(2) << "\n";
    if (!file) {
        throw io_error("write failed: " + path.string());
    }
}

}  // namespace dreg
