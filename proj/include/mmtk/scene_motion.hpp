// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "mmtk/geometry.hpp"
#include "mmtk/image.hpp"

namespace mmtk {

struct TrajectoryFrame {
    CameraPose pose;
    Intrinsics intrinsics;
};

// Ordered camera frames. Motion computation needs at least two frames and
// all intrinsics must share one canvas size.
struct CameraTrajectory {
    std::vector<TrajectoryFrame> frames;

    std::size_t size() const { return frames.size(); }
};

// Per-pixel 2D displacement for one frame pair (frame_index -> frame_index+1),
// anchored at source pixels. Displaced endpoints may fall outside the canvas;
// that does not invalidate a pixel. Invalid means the source depth was
// missing or either projection fell behind the camera.
struct MotionField {
    int width = 0;
    int height = 0;
    int frame_index = 0;
    std::vector<float> uv;             // interleaved (u, v), row-major
    std::vector<std::uint8_t> valid;

    MotionField() = default;
    MotionField(int w, int h)
        : width(w), height(h),
          uv(static_cast<std::size_t>(w) * h * 2, 0.0f),
          valid(static_cast<std::size_t>(w) * h, 0) {}

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    float u(int x, int y) const { return uv[index(x, y) * 2]; }
    float v(int x, int y) const { return uv[index(x, y) * 2 + 1]; }
    bool is_valid(int x, int y) const { return valid[index(x, y)] != 0; }
    void set(int x, int y, float du, float dv, bool ok) {
        uv[index(x, y) * 2] = du;
        uv[index(x, y) * 2 + 1] = dv;
        valid[index(x, y)] = ok ? 1 : 0;
    }
};

// Per-pixel Pluecker ray embedding of a camera pose: unit direction d and
// moment o x d, 6 channels per pixel, stored (y * W + x) * 6 + c.
struct PluckerField {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    PluckerField() = default;
    PluckerField(int w, int h)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h * 6, 0.0) {}

    const double* at(int x, int y) const {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 6;
    }
    double* at(int x, int y) {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 6;
    }
};

struct MotionStats {
    double mean_magnitude = 0.0; // px, over valid pixels
    double max_magnitude = 0.0;  // px
    double valid_fraction = 0.0;
};

// Scene motion between two camera frames over a static reference scene:
// every valid depth pixel is unprojected through k_l, mapped by the relative
// camera motion, and reprojected through k_l1; the displacement is the
// difference of the two projections. Throws std::invalid_argument on a
// depth/intrinsics size mismatch and std::runtime_error when the depth map
// has no valid pixel at all.
MotionField track_pair(const DepthMap& depth, const Intrinsics& k_l, const Intrinsics& k_l1,
                       const CameraPose& pose_l, const CameraPose& pose_l1);

// track_pair over every consecutive pair; the reference depth map is
// re-unprojected in each source frame's camera. Returns L-1 fields.
std::vector<MotionField> track_sequence(const DepthMap& depth, const CameraTrajectory& traj);

// World-frame ray field of one camera: per pixel the normalized ray direction
// and its moment about the world origin.
PluckerField plucker_embedding(const CameraPose& pose, const Intrinsics& k);

// Summary over valid pixels, accumulated in a fixed sequential order.
MotionStats motion_stats(const MotionField& field);

} // namespace mmtk
