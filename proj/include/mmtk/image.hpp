// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace mmtk {

// Interleaved 8-bit RGB raster, row-major from the top-left pixel.
struct Image8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // size = width * height * 3

    Image8() = default;
    Image8(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::uint8_t* pixel(int x, int y) {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    const std::uint8_t* pixel(int x, int y) const {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    bool contains(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

// Per-pixel metric depth in world units. A pixel is valid iff its value is
// finite and strictly positive; zeros are the canonical invalid encoding.
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<float> values; // size = width * height, row-major

    DepthMap() = default;
    DepthMap(int w, int h, float fill = 0.0f)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    float& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }

    static bool is_valid_depth(float d) { return std::isfinite(d) && d > 0.0f; }
};

} // namespace mmtk
