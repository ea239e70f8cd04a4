// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "mmtk/image.hpp"

namespace mmtk {

using Rgb = std::array<std::uint8_t, 3>;

// Deterministic coverage rule shared by the pose rasterizer and the flow
// visualizers: a pixel is painted iff its integer center lies within the
// stated distance of the primitive. Out-of-canvas coverage is clipped.

// Paints pixels whose center is within thickness/2 of the segment (x0,y0)-(x1,y1).
void draw_segment(Image8& img, double x0, double y0, double x1, double y1,
                  double thickness, const Rgb& color);

// Paints pixels whose center is within `radius` of (cx, cy).
void draw_disc(Image8& img, double cx, double cy, double radius, const Rgb& color);

} // namespace mmtk
