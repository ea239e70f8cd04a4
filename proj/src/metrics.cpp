// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#include "mmtk/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace mmtk {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;
constexpr double kPsnrCapDb = 99.0;

std::array<double, kWindow * kWindow> gaussian_window() {
    std::array<double, kWindow * kWindow> w{};
    const int half = kWindow / 2;
    double sum = 0.0;
    for (int y = 0; y < kWindow; ++y) {
        for (int x = 0; x < kWindow; ++x) {
            const double dy = y - half;
            const double dx = x - half;
            w[y * kWindow + x] = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
            sum += w[y * kWindow + x];
        }
    }
    for (double& v : w) {
        v /= sum;
    }
    return w;
}

std::vector<double> luminance(const std::vector<double>& rgb, int width, int height) {
    std::vector<double> out(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = 0.299 * rgb[i * 3] + 0.587 * rgb[i * 3 + 1] + 0.114 * rgb[i * 3 + 2];
    }
    return out;
}

void check(const ImagePair& pair) {
    const std::size_t expected = static_cast<std::size_t>(pair.width) * pair.height * 3;
    if (pair.width < 1 || pair.height < 1 || pair.a.size() != expected ||
        pair.b.size() != expected) {
        throw std::invalid_argument("ImagePair: sizes do not match declared dimensions");
    }
}

} // namespace

ImagePair ImagePair::make(const Image8& a, const Image8& b) {
    if (a.width != b.width || a.height != b.height) {
        throw std::invalid_argument("ImagePair: image dimensions differ");
    }
    if (a.width < 1 || a.height < 1) {
        throw std::invalid_argument("ImagePair: empty images");
    }
    ImagePair pair;
    pair.width = a.width;
    pair.height = a.height;
    pair.a.resize(a.data.size());
    pair.b.resize(b.data.size());
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        pair.a[i] = a.data[i] / 255.0;
        pair.b[i] = b.data[i] / 255.0;
    }
    return pair;
}

double l1(const ImagePair& pair) {
    check(pair);
    double sum = 0.0;
    for (std::size_t i = 0; i < pair.a.size(); ++i) {
        sum += std::abs(pair.a[i] - pair.b[i]);
    }
    return sum / static_cast<double>(pair.a.size());
}

double psnr(const ImagePair& pair) {
    check(pair);
    double sum = 0.0;
    for (std::size_t i = 0; i < pair.a.size(); ++i) {
        const double d = pair.a[i] - pair.b[i];
        sum += d * d;
    }
    const double mse = sum / static_cast<double>(pair.a.size());
    if (mse <= 0.0) {
        return kPsnrCapDb;
    }
    return std::min(kPsnrCapDb, 10.0 * std::log10(1.0 / mse));
}

double ssim(const ImagePair& pair) {
    check(pair);
    if (std::min(pair.width, pair.height) < kWindow) {
        throw std::invalid_argument("ssim: images must be at least 11x11");
    }
    const std::vector<double> ya = luminance(pair.a, pair.width, pair.height);
    const std::vector<double> yb = luminance(pair.b, pair.width, pair.height);
    static const std::array<double, kWindow * kWindow> window = gaussian_window();

    const double c1 = kK1 * kK1;
    const double c2 = kK2 * kK2;
    const int w = pair.width;

    double total = 0.0;
    std::size_t count = 0;
    for (int y = 0; y + kWindow <= pair.height; ++y) {
        for (int x = 0; x + kWindow <= pair.width; ++x) {
            double mu_a = 0.0, mu_b = 0.0;
            double aa = 0.0, bb = 0.0, ab = 0.0;
            for (int wy = 0; wy < kWindow; ++wy) {
                for (int wx = 0; wx < kWindow; ++wx) {
                    const double weight = window[wy * kWindow + wx];
                    const double va = ya[static_cast<std::size_t>(y + wy) * w + (x + wx)];
                    const double vb = yb[static_cast<std::size_t>(y + wy) * w + (x + wx)];
                    mu_a += weight * va;
                    mu_b += weight * vb;
                    aa += weight * va * va;
                    bb += weight * vb * vb;
                    ab += weight * va * vb;
                }
            }
            const double var_a = aa - mu_a * mu_a;
            const double var_b = bb - mu_b * mu_b;
            const double cov = ab - mu_a * mu_b;
            const double numer = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            const double denom = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            total += numer / denom;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

} // namespace mmtk
