// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "mmtk/image.hpp"

namespace mmtk {

// Two equally sized H x W x 3 images with values in [0, 1] (8-bit inputs are
// divided by 255 on ingest). Layout (y * W + x) * 3 + c.
struct ImagePair {
    int width = 0;
    int height = 0;
    std::vector<double> a;
    std::vector<double> b;

    static ImagePair make(const Image8& a, const Image8& b); // throws on size mismatch
};

// Mean absolute difference over all elements.
double l1(const ImagePair& pair);

// 10 log10(1 / MSE) on the [0, 1] range, capped at the 99 dB sentinel
// (identical images report exactly 99).
double psnr(const ImagePair& pair);

// Mean local SSIM on BT.601 luminance: 11x11 Gaussian window (sigma 1.5),
// K1 = 0.01, K2 = 0.03, L = 1, averaged over fully interior windows.
// Requires min(H, W) >= 11.
double ssim(const ImagePair& pair);

} // namespace mmtk
