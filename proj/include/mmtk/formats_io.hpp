// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mmtk/errors.hpp"
#include "mmtk/image.hpp"
#include "mmtk/scene_motion.hpp"

namespace mmtk {

// All multi-byte integers and floats in the binary formats below are
// little-endian. Byte layouts are frozen in docs/formats.md.

// --- Minimal named-tensor container ("MMTK" magic) ---

enum class TensorDType : std::uint8_t { F32 = 0, F64 = 1, U8 = 2 };

std::size_t dtype_size(TensorDType dtype);

struct TensorEntry {
    TensorDType dtype = TensorDType::F32;
    std::vector<std::uint64_t> dims;
    std::vector<std::uint8_t> payload; // raw little-endian, dims product * dtype size

    std::uint64_t element_count() const;
    std::vector<float> as_f32() const;
    std::vector<double> as_f64() const;
    const std::vector<std::uint8_t>& as_u8() const;
};

// Ordered named entries with unique names.
struct TensorContainer {
    std::vector<std::pair<std::string, TensorEntry>> entries;

    void add_f32(const std::string& name, std::vector<std::uint64_t> dims,
                 const std::vector<float>& values);
    void add_f64(const std::string& name, std::vector<std::uint64_t> dims,
                 const std::vector<double>& values);
    void add_u8(const std::string& name, std::vector<std::uint64_t> dims,
                std::vector<std::uint8_t> bytes);

    bool contains(const std::string& name) const;
    const TensorEntry& at(const std::string& name) const; // throws FormatError when absent
};

void write_tensor(const TensorContainer& container, const std::filesystem::path& path);
TensorContainer read_tensor(const std::filesystem::path& path);

// --- Camera trajectories (TUM text format + intrinsics sidecar) ---

// TUM lines "timestamp tx ty tz qx qy qz qw"; '#' starts a comment. The
// sidecar holds "fx fy cx cy width height" lines, one per frame or a single
// line applied to every frame. Quaternions are normalized on read.
CameraTrajectory read_trajectory(const std::filesystem::path& trajectory_path,
                                 const std::filesystem::path& intrinsics_path);
void write_trajectory(const CameraTrajectory& traj,
                      const std::filesystem::path& trajectory_path,
                      const std::filesystem::path& intrinsics_path);

// --- Depth maps ---

// Reads a 16-bit PGM (P5, maxval > 255, big-endian samples) or a grayscale
// PFM ("Pf", header scale sign selects endianness). depth = raw * scale;
// zero raw values map to invalid depth.
DepthMap read_depth(const std::filesystem::path& path, double scale);
void write_depth_pgm16(const DepthMap& depth, const std::filesystem::path& path, double scale);

// --- Middlebury .flo motion fields ---

// Invalid pixels are stored as the Middlebury sentinel; readers treat any
// |u| > 1e8 as invalid.
inline constexpr float kFloInvalidValue = 1e9f;
inline constexpr float kFloInvalidThreshold = 1e8f;

void write_flo(const MotionField& field, const std::filesystem::path& path);
MotionField read_flo(const std::filesystem::path& path);

// --- Flow visualizations ---

// Dense color-wheel rendering: hue from the displacement angle, saturation
// from magnitude over max_magnitude (field maximum when <= 0), value 1.
// Zero motion renders white; invalid pixels black.
Image8 flow_to_color(const MotionField& field, double max_magnitude = 0.0);

// Directed line segments, one per stride x stride cell anchored at the cell
// center: white source dot, green shaft and arrowhead ending exactly at
// source + displacement. Sub-half-pixel displacements draw the dot only.
Image8 flow_to_arrows(const MotionField& field, int stride, const Image8* underlay = nullptr);

// --- 8-bit RGB rasters (binary PPM, maxval 255) ---

Image8 read_ppm(const std::filesystem::path& path);
void write_ppm(const Image8& image, const std::filesystem::path& path);

} // namespace mmtk
