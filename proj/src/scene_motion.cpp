// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#include "mmtk/scene_motion.hpp"

#include <cmath>
#include <stdexcept>

namespace mmtk {

MotionField track_pair(const DepthMap& depth, const Intrinsics& k_l, const Intrinsics& k_l1,
                       const CameraPose& pose_l, const CameraPose& pose_l1) {
    k_l.validate();
    k_l1.validate();
    if (depth.width != k_l.width || depth.height != k_l.height) {
        throw std::invalid_argument("track_pair: depth map dimensions do not match source intrinsics");
    }

    const RigidTransform rel = relative_motion(pose_l, pose_l1);
    const Eigen::Matrix3d r = rel.rotation();
    const Eigen::Vector3d t = rel.translation();

    MotionField field(depth.width, depth.height);
    std::size_t valid_count = 0;

    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            const float draw = depth.at(x, y);
            if (!DepthMap::is_valid_depth(draw)) {
                continue;
            }
            const double d = static_cast<double>(draw);
            if (!(d >= kZEps)) {
                continue; // too close for a stable source projection
            }
            // Frame-l camera point and its coordinates in the frame-(l+1) camera.
            const double px = d * (x - k_l.cx) / k_l.fx;
            const double py = d * (y - k_l.cy) / k_l.fy;
            const Eigen::Vector3d p(px, py, d);
            const Eigen::Vector3d q = r * p + t;
            if (!(q.z() >= kZEps)) {
                continue; // behind the target camera
            }
            // Displacement as the difference of the two projections. When the
            // relative motion is the exact identity and the intrinsics match,
            // both projections share every intermediate value and the
            // difference is exactly zero.
            const double u0 = k_l.fx * p.x() / p.z() + k_l.cx;
            const double v0 = k_l.fy * p.y() / p.z() + k_l.cy;
            const double u1 = k_l1.fx * q.x() / q.z() + k_l1.cx;
            const double v1 = k_l1.fy * q.y() / q.z() + k_l1.cy;
            field.set(x, y, static_cast<float>(u1 - u0), static_cast<float>(v1 - v0), true);
            ++valid_count;
        }
    }

    if (valid_count == 0) {
        throw std::runtime_error("track_pair: depth map has no valid pixels, motion field is empty");
    }
    return field;
}

std::vector<MotionField> track_sequence(const DepthMap& depth, const CameraTrajectory& traj) {
    if (traj.size() < 2) {
        throw std::invalid_argument("track_sequence: trajectory needs at least 2 frames");
    }
    const int w = traj.frames.front().intrinsics.width;
    const int h = traj.frames.front().intrinsics.height;
    for (const TrajectoryFrame& frame : traj.frames) {
        if (frame.intrinsics.width != w || frame.intrinsics.height != h) {
            throw std::invalid_argument("track_sequence: all frames must share one canvas size");
        }
    }

    std::vector<MotionField> fields;
    fields.reserve(traj.size() - 1);
    for (std::size_t l = 0; l + 1 < traj.size(); ++l) {
        MotionField f = track_pair(depth, traj.frames[l].intrinsics, traj.frames[l + 1].intrinsics,
                                   traj.frames[l].pose, traj.frames[l + 1].pose);
        f.frame_index = static_cast<int>(l);
        fields.push_back(std::move(f));
    }
    return fields;
}

PluckerField plucker_embedding(const CameraPose& pose, const Intrinsics& k) {
    k.validate();
    const Eigen::Matrix3d r = quat_to_rotation(pose.rotation);
    const Eigen::Vector3d o = pose.translation;

    PluckerField field(k.width, k.height);
    for (int y = 0; y < k.height; ++y) {
        for (int x = 0; x < k.width; ++x) {
            const Eigen::Vector3d ray_cam((x - k.cx) / k.fx, (y - k.cy) / k.fy, 1.0);
            const Eigen::Vector3d d = (r * ray_cam).normalized();
            const Eigen::Vector3d m = o.cross(d);
            double* out = field.at(x, y);
            out[0] = d.x();
            out[1] = d.y();
            out[2] = d.z();
            out[3] = m.x();
            out[4] = m.y();
            out[5] = m.z();
        }
    }
    return field;
}

MotionStats motion_stats(const MotionField& field) {
    MotionStats stats;
    const std::size_t total = field.valid.size();
    if (total == 0) {
        return stats;
    }
    double sum = 0.0;
    double max_mag = 0.0;
    std::size_t count = 0;
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            if (!field.is_valid(x, y)) {
                continue;
            }
            const double mag = std::hypot(static_cast<double>(field.u(x, y)),
                                          static_cast<double>(field.v(x, y)));
            sum += mag;
            max_mag = std::max(max_mag, mag);
            ++count;
        }
    }
    if (count == 0) {
        return stats;
    }
    stats.mean_magnitude = sum / static_cast<double>(count);
    stats.max_magnitude = max_mag;
    stats.valid_fraction = static_cast<double>(count) / static_cast<double>(total);
    return stats;
}

} // namespace mmtk
