// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#include "mmtk/raster.hpp"

#include <algorithm>
#include <cmath>

namespace mmtk {

namespace {

double point_segment_distance(double px, double py, double x0, double y0, double x1, double y1) {
    const double dx = x1 - x0;
    const double dy = y1 - y0;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = std::clamp(((px - x0) * dx + (py - y0) * dy) / len2, 0.0, 1.0);
    }
    const double ex = px - (x0 + t * dx);
    const double ey = py - (y0 + t * dy);
    return std::hypot(ex, ey);
}

void set_pixel(Image8& img, int x, int y, const Rgb& color) {
    std::uint8_t* p = img.pixel(x, y);
    p[0] = color[0];
    p[1] = color[1];
    p[2] = color[2];
}

} // namespace

void draw_segment(Image8& img, double x0, double y0, double x1, double y1,
                  double thickness, const Rgb& color) {
    const double half = thickness / 2.0;
    const int min_x = std::max(0, static_cast<int>(std::floor(std::min(x0, x1) - half)));
    const int max_x = std::min(img.width - 1, static_cast<int>(std::ceil(std::max(x0, x1) + half)));
    const int min_y = std::max(0, static_cast<int>(std::floor(std::min(y0, y1) - half)));
    const int max_y = std::min(img.height - 1, static_cast<int>(std::ceil(std::max(y0, y1) + half)));
    for (int y = min_y; y <= max_y; ++y) {
        for (int x = min_x; x <= max_x; ++x) {
            if (point_segment_distance(x, y, x0, y0, x1, y1) <= half) {
                set_pixel(img, x, y, color);
            }
        }
    }
}

void draw_disc(Image8& img, double cx, double cy, double radius, const Rgb& color) {
    const int min_x = std::max(0, static_cast<int>(std::floor(cx - radius)));
    const int max_x = std::min(img.width - 1, static_cast<int>(std::ceil(cx + radius)));
    const int min_y = std::max(0, static_cast<int>(std::floor(cy - radius)));
    const int max_y = std::min(img.height - 1, static_cast<int>(std::ceil(cy + radius)));
    for (int y = min_y; y <= max_y; ++y) {
        for (int x = min_x; x <= max_x; ++x) {
            if (std::hypot(x - cx, y - cy) <= radius) {
                set_pixel(img, x, y, color);
            }
        }
    }
}

} // namespace mmtk
