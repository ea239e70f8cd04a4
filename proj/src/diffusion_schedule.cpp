// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#include "mmtk/diffusion_schedule.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mmtk {

double NoiseSchedule::alpha(int t) const {
    if (t < 1 || t > steps()) {
        throw std::invalid_argument("NoiseSchedule: step " + std::to_string(t) +
                                    " outside [1, " + std::to_string(steps()) + "]");
    }
    return alphas[t - 1];
}

double NoiseSchedule::alpha_bar(int t) const {
    if (t < 0 || t > steps()) {
        throw std::invalid_argument("NoiseSchedule: step " + std::to_string(t) +
                                    " outside [0, " + std::to_string(steps()) + "]");
    }
    return alpha_bars[t];
}

LatentTensor LatentTensor::zeros(std::vector<std::size_t> shape) {
    LatentTensor out;
    std::size_t total = 1;
    for (std::size_t d : shape) {
        total *= d;
    }
    out.shape = std::move(shape);
    out.data.assign(total, 0.0);
    return out;
}

NoiseSchedule make_schedule(int steps, double beta_start, double beta_end) {
    if (steps < 1) {
        throw std::invalid_argument("make_schedule: steps must be >= 1");
    }
    if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0)) {
        throw std::invalid_argument("make_schedule: need 0 < beta_start <= beta_end < 1");
    }
    NoiseSchedule sched;
    sched.alphas.resize(steps);
    sched.alpha_bars.resize(steps + 1);
    sched.alpha_bars[0] = 1.0;
    for (int t = 1; t <= steps; ++t) {
        const double beta =
            steps == 1 ? beta_start
                       : beta_start + (beta_end - beta_start) * (t - 1) / (steps - 1.0);
        sched.alphas[t - 1] = 1.0 - beta;
        sched.alpha_bars[t] = sched.alpha_bars[t - 1] * sched.alphas[t - 1];
    }
    return sched;
}

namespace {

LatentTensor blend(const LatentTensor& a, double wa, const LatentTensor& b, double wb,
                   const char* op) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
    }
    LatentTensor out;
    out.shape = a.shape;
    out.data.resize(a.data.size());
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        out.data[i] = wa * a.data[i] + wb * b.data[i];
    }
    return out;
}

} // namespace

LatentTensor q_sample_step(const LatentTensor& x_prev, int t, const LatentTensor& noise,
                           const NoiseSchedule& sched) {
    const double alpha = sched.alpha(t);
    return blend(x_prev, std::sqrt(alpha), noise, std::sqrt(1.0 - alpha), "q_sample_step");
}

LatentTensor q_sample_closed(const LatentTensor& x0, int t, const LatentTensor& noise,
                             const NoiseSchedule& sched) {
    const double abar = sched.alpha_bar(t);
    return blend(x0, std::sqrt(abar), noise, std::sqrt(1.0 - abar), "q_sample_closed");
}

double simple_loss(const LatentTensor& eps, const LatentTensor& eps_pred) {
    if (!eps.same_shape(eps_pred)) {
        throw std::invalid_argument("simple_loss: shape mismatch");
    }
    if (eps.data.empty()) {
        throw std::invalid_argument("simple_loss: empty tensors");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < eps.data.size(); ++i) {
        const double d = eps.data[i] - eps_pred.data[i];
        sum += d * d;
    }
    return sum / static_cast<double>(eps.data.size());
}

LatentTensor ddim_step(const LatentTensor& x_t, const LatentTensor& eps_pred, int t, int t_prev,
                       const NoiseSchedule& sched, double eta) {
    if (eta != 0.0) {
        throw std::invalid_argument("ddim_step: only the deterministic eta = 0 rule is supported");
    }
    if (t_prev < 0 || t <= t_prev) {
        throw std::invalid_argument("ddim_step: need t > t_prev >= 0");
    }
    const double abar_t = sched.alpha_bar(t);
    const double abar_prev = sched.alpha_bar(t_prev);
    // x0_hat = (x_t - sqrt(1 - abar_t) eps) / sqrt(abar_t)
    const LatentTensor x0_hat =
        blend(x_t, 1.0 / std::sqrt(abar_t), eps_pred, -std::sqrt(1.0 - abar_t) / std::sqrt(abar_t),
              "ddim_step");
    return blend(x0_hat, std::sqrt(abar_prev), eps_pred, std::sqrt(1.0 - abar_prev), "ddim_step");
}

} // namespace mmtk
