// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#include "mmtk/man_norm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "mmtk/formats_io.hpp"

namespace mmtk {

void ConvSpec::validate() const {
    if (out_channels < 1 || in_channels < 1) {
        throw std::invalid_argument("ConvSpec: channel counts must be positive");
    }
    if (kh < 1 || kw < 1 || kh % 2 == 0 || kw % 2 == 0) {
        throw std::invalid_argument("ConvSpec: kernel sizes must be odd and positive");
    }
    const std::size_t expected =
        static_cast<std::size_t>(out_channels) * in_channels * kh * kw;
    if (weights.size() != expected) {
        throw std::invalid_argument("ConvSpec: weight count does not match shape");
    }
    if (bias.size() != static_cast<std::size_t>(out_channels)) {
        throw std::invalid_argument("ConvSpec: bias count does not match out channels");
    }
}

ConvSpec ConvSpec::zeros(int out_channels, int in_channels, int kh, int kw) {
    ConvSpec spec;
    spec.out_channels = out_channels;
    spec.in_channels = in_channels;
    spec.kh = kh;
    spec.kw = kw;
    spec.weights.assign(static_cast<std::size_t>(out_channels) * in_channels * kh * kw, 0.0f);
    spec.bias.assign(out_channels, 0.0f);
    return spec;
}

void ManSpecs::validate(int feature_channels) const {
    shared.validate();
    gamma_head.validate();
    beta_head.validate();
    if (shared.in_channels != 2) {
        throw std::invalid_argument("ManSpecs: shared conv must take the 2-channel motion field");
    }
    if (gamma_head.in_channels != shared.out_channels ||
        beta_head.in_channels != shared.out_channels) {
        throw std::invalid_argument("ManSpecs: head input channels must match shared output");
    }
    if (gamma_head.out_channels != feature_channels ||
        beta_head.out_channels != feature_channels) {
        throw std::invalid_argument("ManSpecs: head output channels must match the feature");
    }
}

std::pair<FeatureTensor, NormStats> instance_norm(const FeatureTensor& f, float eps) {
    if (f.height < 1 || f.width < 1 || f.channels < 1) {
        throw std::invalid_argument("instance_norm: feature must be non-empty");
    }
    const std::size_t plane = static_cast<std::size_t>(f.height) * f.width;
    FeatureTensor out(f.channels, f.height, f.width);
    NormStats stats;
    stats.mu.resize(f.channels);
    stats.sigma.resize(f.channels);

    for (int c = 0; c < f.channels; ++c) {
        const float* src = f.data.data() + c * plane;
        double sum = 0.0;
        for (std::size_t i = 0; i < plane; ++i) {
            sum += src[i];
        }
        const double mean = sum / static_cast<double>(plane);
        double var_sum = 0.0;
        for (std::size_t i = 0; i < plane; ++i) {
            const double d = src[i] - mean;
            var_sum += d * d;
        }
        const double var = var_sum / static_cast<double>(plane);
        const double inv = 1.0 / std::sqrt(var + static_cast<double>(eps));
        float* dst = out.data.data() + c * plane;
        for (std::size_t i = 0; i < plane; ++i) {
            dst[i] = static_cast<float>((src[i] - mean) * inv);
        }
        stats.mu[c] = static_cast<float>(mean);
        stats.sigma[c] = static_cast<float>(std::sqrt(var));
    }
    return {std::move(out), std::move(stats)};
}

FeatureTensor conv2d(const FeatureTensor& input, const ConvSpec& spec) {
    spec.validate();
    if (input.channels != spec.in_channels) {
        throw std::invalid_argument("conv2d: input channel count does not match spec");
    }
    const int h = input.height;
    const int w = input.width;
    const int ph = spec.padding_h();
    const int pw = spec.padding_w();

    FeatureTensor out(spec.out_channels, h, w);
    for (int oc = 0; oc < spec.out_channels; ++oc) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double acc = spec.bias[oc];
                for (int ic = 0; ic < spec.in_channels; ++ic) {
                    const std::size_t wbase =
                        ((static_cast<std::size_t>(oc) * spec.in_channels + ic) * spec.kh) *
                        spec.kw;
                    for (int ky = 0; ky < spec.kh; ++ky) {
                        const int sy = y + ky - ph;
                        if (sy < 0 || sy >= h) {
                            continue;
                        }
                        for (int kx = 0; kx < spec.kw; ++kx) {
                            const int sx = x + kx - pw;
                            if (sx < 0 || sx >= w) {
                                continue;
                            }
                            acc += static_cast<double>(spec.weights[wbase + ky * spec.kw + kx]) *
                                   static_cast<double>(input.at(ic, sy, sx));
                        }
                    }
                }
                out.at(oc, y, x) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

FeatureTensor resize_bilinear(const FeatureTensor& field, int out_height, int out_width) {
    if (field.height < 1 || field.width < 1) {
        throw std::invalid_argument("resize_bilinear: input must be at least 1x1");
    }
    if (out_height < 1 || out_width < 1) {
        throw std::invalid_argument("resize_bilinear: output must be at least 1x1");
    }
    FeatureTensor out(field.channels, out_height, out_width);
    const double sy = static_cast<double>(field.height) / out_height;
    const double sx = static_cast<double>(field.width) / out_width;

    for (int c = 0; c < field.channels; ++c) {
        for (int y = 0; y < out_height; ++y) {
            // edge-clamped sampling: clamp the source coordinate before
            // splitting it into tap index and weight
            const double src_y =
                std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(field.height - 1));
            const int y0 = static_cast<int>(std::floor(src_y));
            const int y1 = std::min(y0 + 1, field.height - 1);
            const double wy = src_y - y0;
            for (int x = 0; x < out_width; ++x) {
                const double src_x =
                    std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(field.width - 1));
                const int x0 = static_cast<int>(std::floor(src_x));
                const int x1 = std::min(x0 + 1, field.width - 1);
                const double wx = src_x - x0;

                // lerp form keeps constant inputs exactly constant
                const double top = field.at(c, y0, x0) +
                                   wx * (static_cast<double>(field.at(c, y0, x1)) -
                                         field.at(c, y0, x0));
                const double bottom = field.at(c, y1, x0) +
                                      wx * (static_cast<double>(field.at(c, y1, x1)) -
                                            field.at(c, y1, x0));
                out.at(c, y, x) = static_cast<float>(top + wy * (bottom - top));
            }
        }
    }
    return out;
}

FeatureTensor motion_to_feature(const MotionField& field) {
    FeatureTensor out(2, field.height, field.width);
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            if (field.is_valid(x, y)) {
                out.at(0, y, x) = field.u(x, y);
                out.at(1, y, x) = field.v(x, y);
            }
        }
    }
    return out;
}

ModulationParams modulation_params(const MotionField& motion, const ManSpecs& specs,
                                   int target_channels, int target_height, int target_width) {
    specs.validate(target_channels);
    if (motion.width < 1 || motion.height < 1) {
        throw std::invalid_argument("modulation_params: motion field is empty");
    }
    FeatureTensor m = motion_to_feature(motion);
    if (m.height != target_height || m.width != target_width) {
        m = resize_bilinear(m, target_height, target_width);
    }
    FeatureTensor hidden = conv2d(m, specs.shared);
    for (float& v : hidden.data) {
        v = v > 0.0f ? v : 0.0f;
    }
    ModulationParams params;
    params.gamma = conv2d(hidden, specs.gamma_head);
    params.beta = conv2d(hidden, specs.beta_head);
    return params;
}

FeatureTensor man_apply(const FeatureTensor& f, const MotionField& motion, const ManSpecs& specs,
                        float eps) {
    const ModulationParams params =
        modulation_params(motion, specs, f.channels, f.height, f.width);
    FeatureTensor normed = instance_norm(f, eps).first;
    FeatureTensor out(f.channels, f.height, f.width);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] = params.gamma.data[i] * normed.data[i] + params.beta.data[i];
    }
    return out;
}

namespace {

// Uniform floats derived from raw engine output; distribution code in <random>
// is implementation-defined, the engine sequence is not.
double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

ConvSpec random_conv(std::mt19937_64& rng, int out_channels, int in_channels, int k) {
    ConvSpec spec = ConvSpec::zeros(out_channels, in_channels, k, k);
    const double bound = std::sqrt(1.0 / (static_cast<double>(in_channels) * k * k));
    for (float& w : spec.weights) {
        w = static_cast<float>((2.0 * next_unit(rng) - 1.0) * bound);
    }
    return spec;
}

void container_conv(TensorContainer& container, const std::string& layer, const ConvSpec& spec) {
    container.add_f32(layer + ".weights",
                      {static_cast<std::uint64_t>(spec.out_channels),
                       static_cast<std::uint64_t>(spec.in_channels),
                       static_cast<std::uint64_t>(spec.kh), static_cast<std::uint64_t>(spec.kw)},
                      spec.weights);
    container.add_f32(layer + ".bias", {static_cast<std::uint64_t>(spec.out_channels)}, spec.bias);
}

ConvSpec conv_from_container(const TensorContainer& container, const std::string& layer) {
    const TensorEntry& weights = container.at(layer + ".weights");
    const TensorEntry& bias = container.at(layer + ".bias");
    if (weights.dims.size() != 4 || bias.dims.size() != 1) {
        throw FormatError("weight container: entry '" + layer + "' has unexpected rank");
    }
    ConvSpec spec;
    spec.out_channels = static_cast<int>(weights.dims[0]);
    spec.in_channels = static_cast<int>(weights.dims[1]);
    spec.kh = static_cast<int>(weights.dims[2]);
    spec.kw = static_cast<int>(weights.dims[3]);
    spec.weights = weights.as_f32();
    spec.bias = bias.as_f32();
    spec.validate();
    return spec;
}

} // namespace

ManSpecs make_man_specs(std::uint64_t seed, int hidden_channels, int feature_channels,
                        bool zero_init_heads) {
    if (hidden_channels < 1 || feature_channels < 1) {
        throw std::invalid_argument("make_man_specs: channel counts must be positive");
    }
    std::mt19937_64 rng(seed);
    ManSpecs specs;
    specs.shared = random_conv(rng, hidden_channels, 2, 3);
    if (zero_init_heads) {
        specs.gamma_head = ConvSpec::zeros(feature_channels, hidden_channels, 3, 3);
        specs.beta_head = ConvSpec::zeros(feature_channels, hidden_channels, 3, 3);
    } else {
        specs.gamma_head = random_conv(rng, feature_channels, hidden_channels, 3);
        specs.beta_head = random_conv(rng, feature_channels, hidden_channels, 3);
    }
    return specs;
}

TensorContainer man_specs_to_container(const ManSpecs& specs) {
    TensorContainer container;
    container_conv(container, "shared", specs.shared);
    container_conv(container, "gamma_head", specs.gamma_head);
    container_conv(container, "beta_head", specs.beta_head);
    return container;
}

ManSpecs man_specs_from_container(const TensorContainer& container) {
    ManSpecs specs;
    specs.shared = conv_from_container(container, "shared");
    specs.gamma_head = conv_from_container(container, "gamma_head");
    specs.beta_head = conv_from_container(container, "beta_head");
    return specs;
}

} // namespace mmtk
