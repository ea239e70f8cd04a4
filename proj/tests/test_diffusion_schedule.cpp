// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mmtk/diffusion_schedule.hpp"

using namespace mmtk;

namespace {

LatentTensor random_latent(std::mt19937& rng, std::size_t n, double mean = 0.0,
                           double sigma = 1.0) {
    std::normal_distribution<double> normal(mean, sigma);
    LatentTensor t = LatentTensor::zeros({n});
    for (double& v : t.data) {
        v = normal(rng);
    }
    return t;
}

double sample_variance(const LatentTensor& t) {
    double sum = 0.0;
    for (double v : t.data) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(t.data.size());
    double sq = 0.0;
    for (double v : t.data) {
        sq += (v - mean) * (v - mean);
    }
    return sq / static_cast<double>(t.data.size() - 1);
}

} // namespace

TEST_CASE("make_schedule single step") {
    const NoiseSchedule sched = make_schedule(1, 0.5, 0.5);
    CHECK(sched.steps() == 1);
    CHECK(sched.alpha(1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sched.alpha_bar(0) == 1.0);
    CHECK(sched.alpha_bar(1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("make_schedule SD defaults: alpha_bar(T) below 1e-4") {
    const NoiseSchedule sched = make_schedule(1000, 1e-4, 0.02);
    // independent product over the same linear grid
    double product = 1.0;
    for (int t = 1; t <= 1000; ++t) {
        product *= 1.0 - (1e-4 + (0.02 - 1e-4) * (t - 1) / 999.0);
    }
    CHECK(sched.alpha_bar(1000) == doctest::Approx(product).epsilon(1e-12));
    CHECK(sched.alpha_bar(1000) < 1e-4);
}

TEST_CASE("alpha_bar is strictly decreasing") {
    std::mt19937 rng(401);
    for (int trial = 0; trial < 20; ++trial) {
        const int steps = 1 + static_cast<int>(rng() % 200);
        const double b0 = std::uniform_real_distribution<double>(1e-5, 0.1)(rng);
        const double b1 = std::uniform_real_distribution<double>(b0, 0.5)(rng);
        const NoiseSchedule sched = make_schedule(steps, b0, b1);
        for (int t = 1; t <= steps; ++t) {
            CHECK(sched.alpha_bar(t) < sched.alpha_bar(t - 1));
            CHECK(sched.alpha(t) > 0.0);
            CHECK(sched.alpha(t) < 1.0);
        }
    }
}

TEST_CASE("make_schedule rejects invalid ranges") {
    CHECK_THROWS_AS(make_schedule(0, 1e-4, 0.02), std::invalid_argument);
    CHECK_THROWS_AS(make_schedule(10, 0.0, 0.02), std::invalid_argument);
    CHECK_THROWS_AS(make_schedule(10, 0.03, 0.02), std::invalid_argument);
    CHECK_THROWS_AS(make_schedule(10, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("q_sample_step limits") {
    std::mt19937 rng(409);
    const LatentTensor x = random_latent(rng, 32);
    const LatentTensor noise = random_latent(rng, 32);

    SUBCASE("tiny beta keeps x almost unchanged") {
        const NoiseSchedule sched = make_schedule(1, 1e-12, 1e-12);
        const LatentTensor out = q_sample_step(x, 1, noise, sched);
        for (std::size_t i = 0; i < out.data.size(); ++i) {
            CHECK(out.data[i] == doctest::Approx(x.data[i]).epsilon(1e-5));
        }
    }
    SUBCASE("zero x_prev leaves the scaled noise") {
        const NoiseSchedule sched = make_schedule(4, 0.1, 0.4);
        const LatentTensor zero = LatentTensor::zeros({32});
        const LatentTensor out = q_sample_step(zero, 2, noise, sched);
        const double w = std::sqrt(1.0 - sched.alpha(2));
        for (std::size_t i = 0; i < out.data.size(); ++i) {
            CHECK(out.data[i] == doctest::Approx(w * noise.data[i]).epsilon(1e-12));
        }
    }
    SUBCASE("step index range is enforced") {
        const NoiseSchedule sched = make_schedule(4, 0.1, 0.4);
        CHECK_THROWS_AS(q_sample_step(x, 0, noise, sched), std::invalid_argument);
        CHECK_THROWS_AS(q_sample_step(x, 5, noise, sched), std::invalid_argument);
    }
    SUBCASE("shape mismatch") {
        const NoiseSchedule sched = make_schedule(4, 0.1, 0.4);
        const LatentTensor other = LatentTensor::zeros({16});
        CHECK_THROWS_AS(q_sample_step(x, 1, other, sched), std::invalid_argument);
    }
}

TEST_CASE("iterated steps match the closed form variance (Monte Carlo)") {
    std::mt19937 rng(419);
    const int steps = 10;
    const NoiseSchedule sched = make_schedule(steps, 0.02, 0.3);
    const std::size_t n = 100000;

    LatentTensor x = random_latent(rng, n); // unit-variance data
    for (int t = 1; t <= steps; ++t) {
        const LatentTensor noise = random_latent(rng, n);
        x = q_sample_step(x, t, noise, sched);
    }
    const double expected = sched.alpha_bar(steps) * 1.0 + (1.0 - sched.alpha_bar(steps));
    CHECK(std::abs(sample_variance(x) - expected) < 0.02 * expected);
}

TEST_CASE("q_sample_closed basics") {
    std::mt19937 rng(421);
    const NoiseSchedule sched = make_schedule(100, 1e-3, 0.1);
    const LatentTensor x0 = random_latent(rng, 64);
    const LatentTensor noise = random_latent(rng, 64);

    SUBCASE("t = 0 returns the data exactly") {
        const LatentTensor out = q_sample_closed(x0, 0, noise, sched);
        CHECK(out.data == x0.data);
    }
    SUBCASE("zero data leaves scaled noise") {
        const LatentTensor zero = LatentTensor::zeros({64});
        const LatentTensor out = q_sample_closed(zero, 40, noise, sched);
        const double w = std::sqrt(1.0 - sched.alpha_bar(40));
        for (std::size_t i = 0; i < out.data.size(); ++i) {
            CHECK(out.data[i] == doctest::Approx(w * noise.data[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("q_sample_closed preserves unit variance (Monte Carlo)") {
    std::mt19937 rng(431);
    const NoiseSchedule sched = make_schedule(1000, 1e-4, 0.02);
    const std::size_t n = 100000;
    const LatentTensor x0 = random_latent(rng, n);
    const LatentTensor noise = random_latent(rng, n);
    for (int t : {1, 250, 500, 1000}) {
        const LatentTensor xt = q_sample_closed(x0, t, noise, sched);
        CHECK(std::abs(sample_variance(xt) - 1.0) < 0.02);
    }
}

TEST_CASE("mean consistency: E[x_t] = sqrt(alpha_bar_t) E[x0]") {
    std::mt19937 rng(433);
    const NoiseSchedule sched = make_schedule(500, 1e-4, 0.02);
    const std::size_t n = 100000;
    const LatentTensor x0 = random_latent(rng, n, /*mean=*/1.0);
    const LatentTensor noise = random_latent(rng, n);
    const LatentTensor xt = q_sample_closed(x0, 300, noise, sched);
    double sum = 0.0;
    for (double v : xt.data) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(n);
    CHECK(std::abs(mean - std::sqrt(sched.alpha_bar(300))) < 0.02);
}

TEST_CASE("simple_loss examples") {
    LatentTensor a = LatentTensor::zeros({3, 4});
    LatentTensor b = LatentTensor::zeros({3, 4});
    CHECK(simple_loss(a, b) == 0.0);

    for (double& v : b.data) {
        v = 2.0;
    }
    CHECK(simple_loss(a, b) == doctest::Approx(4.0).epsilon(1e-15));

    LatentTensor mismatched = LatentTensor::zeros({4, 3});
    CHECK_THROWS_AS(simple_loss(a, mismatched), std::invalid_argument);
}

TEST_CASE("simple_loss is permutation invariant") {
    std::mt19937 rng(439);
    LatentTensor a = random_latent(rng, 128);
    LatentTensor b = random_latent(rng, 128);
    const double base = simple_loss(a, b);

    std::vector<std::size_t> perm(128);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        perm[i] = i;
    }
    std::shuffle(perm.begin(), perm.end(), rng);
    LatentTensor pa = LatentTensor::zeros({128});
    LatentTensor pb = LatentTensor::zeros({128});
    for (std::size_t i = 0; i < perm.size(); ++i) {
        pa.data[i] = a.data[perm[i]];
        pb.data[i] = b.data[perm[i]];
    }
    CHECK(simple_loss(pa, pb) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("ddim_step with the true noise inverts q_sample_closed") {
    std::mt19937 rng(443);
    const NoiseSchedule sched = make_schedule(1000, 1e-4, 0.02);
    const LatentTensor x0 = random_latent(rng, 256);
    const LatentTensor noise = random_latent(rng, 256);

    SUBCASE("single shot from any t to 0") {
        for (int t : {50, 400, 1000}) {
            const LatentTensor xt = q_sample_closed(x0, t, noise, sched);
            const LatentTensor back = ddim_step(xt, noise, t, 0, sched);
            for (std::size_t i = 0; i < back.data.size(); ++i) {
                CHECK(std::abs(back.data[i] - x0.data[i]) < 1e-6);
            }
        }
    }
    SUBCASE("inter-step consistency: t -> t_prev lands on q_sample_closed(t_prev)") {
        const LatentTensor xt = q_sample_closed(x0, 800, noise, sched);
        const LatentTensor stepped = ddim_step(xt, noise, 800, 350, sched);
        const LatentTensor direct = q_sample_closed(x0, 350, noise, sched);
        for (std::size_t i = 0; i < stepped.data.size(); ++i) {
            CHECK(std::abs(stepped.data[i] - direct.data[i]) < 1e-6);
        }
    }
}

TEST_CASE("20 uniform DDIM steps reproduce the single-shot reconstruction") {
    std::mt19937 rng(449);
    const NoiseSchedule sched = make_schedule(1000, 1e-4, 0.02);
    const LatentTensor x0 = random_latent(rng, 256);
    const LatentTensor noise = random_latent(rng, 256);

    LatentTensor x = q_sample_closed(x0, 1000, noise, sched);
    for (int t = 1000; t > 0; t -= 50) {
        x = ddim_step(x, noise, t, t - 50, sched);
    }
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        CHECK(std::abs(x.data[i] - x0.data[i]) < 1e-5);
    }
}

TEST_CASE("ddim_step contract violations") {
    std::mt19937 rng(457);
    const NoiseSchedule sched = make_schedule(100, 1e-3, 0.1);
    const LatentTensor x = random_latent(rng, 8);
    const LatentTensor noise = random_latent(rng, 8);
    CHECK_THROWS_AS(ddim_step(x, noise, 50, 50, sched), std::invalid_argument);
    CHECK_THROWS_AS(ddim_step(x, noise, 50, 60, sched), std::invalid_argument);
    CHECK_THROWS_AS(ddim_step(x, noise, 50, -1, sched), std::invalid_argument);
    CHECK_THROWS_AS(ddim_step(x, noise, 50, 20, sched, 0.5), std::invalid_argument);
}
