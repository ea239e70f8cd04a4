// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mmtk/scene_motion.hpp"

namespace mmtk {

struct TensorContainer;

// C x H x W activations, row-major by (c, h, w).
struct FeatureTensor {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;

    FeatureTensor() = default;
    FeatureTensor(int c, int h, int w)
        : channels(c), height(h), width(w),
          data(static_cast<std::size_t>(c) * h * w, 0.0f) {}

    std::size_t index(int c, int y, int x) const {
        return (static_cast<std::size_t>(c) * height + y) * width + x;
    }
    float at(int c, int y, int x) const { return data[index(c, y, x)]; }
    float& at(int c, int y, int x) { return data[index(c, y, x)]; }
    std::size_t size() const { return data.size(); }
};

// Per-channel mean and (population) standard deviation.
struct NormStats {
    std::vector<float> mu;
    std::vector<float> sigma;
};

// Spatially varying modulation: gamma and beta share the target C x H x W shape.
struct ModulationParams {
    FeatureTensor gamma;
    FeatureTensor beta;
};

// Shape-preserving convolution: odd kernel, symmetric zero padding (k-1)/2.
struct ConvSpec {
    int out_channels = 0;
    int in_channels = 0;
    int kh = 0;
    int kw = 0;
    std::vector<float> weights; // out x in x kh x kw
    std::vector<float> bias;    // out

    int padding_h() const { return (kh - 1) / 2; }
    int padding_w() const { return (kw - 1) / 2; }
    void validate() const; // throws std::invalid_argument on bad shapes

    static ConvSpec zeros(int out_channels, int in_channels, int kh, int kw);
};

// The three-convolution modulation stack: shared conv + ReLU feeding two
// parallel heads that emit gamma and beta.
struct ManSpecs {
    ConvSpec shared;
    ConvSpec gamma_head;
    ConvSpec beta_head;

    void validate(int feature_channels) const;
};

// Per-channel normalization over the spatial extent:
// out = (f - mu_c) / sqrt(var_c + eps). Constant channels are handled by eps.
std::pair<FeatureTensor, NormStats> instance_norm(const FeatureTensor& f, float eps = 1e-5f);

// Cross-correlation with symmetric zero padding; output spatial size equals
// input spatial size. Throws std::invalid_argument on a channel mismatch.
FeatureTensor conv2d(const FeatureTensor& input, const ConvSpec& spec);

// align-corners-false bilinear resampling with edge-clamped taps, applied
// per channel. Displacement values are not rescaled by the resize ratio.
FeatureTensor resize_bilinear(const FeatureTensor& field, int out_height, int out_width);

// Motion field as a 2 x H x W feature (u then v); invalid pixels zero-filled.
FeatureTensor motion_to_feature(const MotionField& field);

// gamma/beta from a motion field: zero-fill, bilinear resize to the target
// spatial size, shared conv + ReLU, then the two heads.
ModulationParams modulation_params(const MotionField& motion, const ManSpecs& specs,
                                   int target_channels, int target_height, int target_width);

// Motion-adaptive normalization forward pass:
// out = gamma(m) * instance_norm(f) + beta(m), elementwise over C x H x W.
FeatureTensor man_apply(const FeatureTensor& f, const MotionField& motion, const ManSpecs& specs,
                        float eps = 1e-5f);

// Seeded 3x3 stack with the given hidden width; weights are uniform in
// +-sqrt(1 / (in * kh * kw)) drawn from a splitmix-fed mt19937_64 so files
// generated from a seed are reproducible across platforms. Zero-initialized
// heads make man_apply the zero map.
ManSpecs make_man_specs(std::uint64_t seed, int hidden_channels, int feature_channels,
                        bool zero_init_heads = false);

// Tensor-container layout: one entry per ConvSpec field, named
// "<layer>.weights" / "<layer>.bias" for shared, gamma_head, beta_head.
TensorContainer man_specs_to_container(const ManSpecs& specs);
ManSpecs man_specs_from_container(const TensorContainer& container);

} // namespace mmtk
