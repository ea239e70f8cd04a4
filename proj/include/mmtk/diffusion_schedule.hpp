// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace mmtk {

// Forward-noising schedule. Indexing convention: t = 0 is data, so
// alpha_bar(0) = 1 and alpha(t) is defined for t in [1, T]. alpha_bar is
// strictly decreasing.
struct NoiseSchedule {
    std::vector<double> alphas;     // alphas[t - 1] = alpha_t
    std::vector<double> alpha_bars; // alpha_bars[t] = prod_{s<=t} alpha_s, alpha_bars[0] = 1

    int steps() const { return static_cast<int>(alphas.size()); }
    double alpha(int t) const;     // t in [1, T]
    double alpha_bar(int t) const; // t in [0, T]
};

// Arbitrary-shape floating array; x0, x_t, and noise all share this role.
struct LatentTensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    static LatentTensor zeros(std::vector<std::size_t> shape);
    bool same_shape(const LatentTensor& other) const { return shape == other.shape; }
};

// Linear beta schedule: T values evenly spaced over [beta_start, beta_end],
// alpha_t = 1 - beta_t. Requires T >= 1 and 0 < beta_start <= beta_end < 1.
NoiseSchedule make_schedule(int steps, double beta_start, double beta_end);

// One Markov noising step: x_t = sqrt(alpha_t) x_{t-1} + sqrt(1 - alpha_t) noise.
LatentTensor q_sample_step(const LatentTensor& x_prev, int t, const LatentTensor& noise,
                           const NoiseSchedule& sched);

// Closed form from data: x_t = sqrt(abar_t) x_0 + sqrt(1 - abar_t) noise.
LatentTensor q_sample_closed(const LatentTensor& x0, int t, const LatentTensor& noise,
                             const NoiseSchedule& sched);

// Mean squared difference over all elements.
double simple_loss(const LatentTensor& eps, const LatentTensor& eps_pred);

// Deterministic DDIM update from t to t_prev (t > t_prev >= 0):
// x0_hat = (x_t - sqrt(1 - abar_t) eps) / sqrt(abar_t), then re-noise to
// t_prev with the same predicted noise. Only eta = 0 is supported.
LatentTensor ddim_step(const LatentTensor& x_t, const LatentTensor& eps_pred, int t, int t_prev,
                       const NoiseSchedule& sched, double eta = 0.0);

} // namespace mmtk
