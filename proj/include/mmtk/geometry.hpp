// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <vector>

#include "mmtk/image.hpp"

namespace mmtk {

// Camera convention, fixed project-wide: right-handed, +z forward, +x right,
// +y down (image-aligned). Poses are camera-to-world. Quaternions are stored
// in (x, y, z, w) order at the file boundary, matching TUM trajectories.

// Perspective-division guard: a point with camera-frame z < kZEps is flagged
// invalid, never clamped.
inline constexpr double kZEps = 1e-6;

// 7-DoF camera pose: translation plus unit quaternion. Normalized on ingest;
// construction throws std::invalid_argument on a zero-norm quaternion.
struct CameraPose {
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();
    Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();

    // Builds a pose from TUM-ordered fields, normalizing the quaternion.
    static CameraPose from_tum(double tx, double ty, double tz,
                               double qx, double qy, double qz, double qw);
};

// 4x4 homogeneous transform with orthonormal upper-left 3x3 and bottom row
// (0, 0, 0, 1).
struct RigidTransform {
    Eigen::Matrix4d matrix = Eigen::Matrix4d::Identity();

    Eigen::Matrix3d rotation() const { return matrix.topLeftCorner<3, 3>(); }
    Eigen::Vector3d translation() const { return matrix.topRightCorner<3, 1>(); }
    Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
        return rotation() * p + translation();
    }

    static RigidTransform from_parts(const Eigen::Matrix3d& r, const Eigen::Vector3d& t);
};

// Pinhole intrinsics in pixel units.
struct Intrinsics {
    double fx = 0, fy = 0;
    double cx = 0, cy = 0;
    int width = 0, height = 0;

    // Throws std::invalid_argument unless fx, fy > 0 and width, height >= 1.
    void validate() const;
};

// One 3D point per valid depth pixel, tagged with its source pixel.
struct PointCloud {
    std::vector<Eigen::Vector3d> points;
    std::vector<Eigen::Vector2i> source_pixels;
};

// Projection results. depths carry sign; pixels are only meaningful where
// valid (z >= kZEps), no perspective division is performed otherwise.
struct ProjectedPoints {
    std::vector<Eigen::Vector2d> pixels;
    std::vector<double> depths;
    std::vector<std::uint8_t> valid;
};

// Rotation matrix from a (not necessarily unit) quaternion; q and -q yield
// the same matrix. Throws std::invalid_argument on zero norm.
Eigen::Matrix3d quat_to_rotation(const Eigen::Quaterniond& q);

// Camera-to-world transform of a pose: X_w = R * X_c + t.
RigidTransform pose_to_cam_to_world(const CameraPose& pose);

// Inverse computed as (R^T, -R^T t).
RigidTransform invert_transform(const RigidTransform& t);

// compose(a, b) applies b first: (compose(a, b))(x) = a(b(x)).
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

// World-to-camera of `to` composed with camera-to-world of `from`, i.e. the
// transform taking frame-`from` camera coordinates into frame-`to` camera
// coordinates. Computed at the quaternion level so that bitwise-identical
// poses produce the exact identity transform.
RigidTransform relative_motion(const CameraPose& from, const CameraPose& to);

// Back-projects every valid depth pixel (u, v, d) to the camera-frame point
// (d*(u-cx)/fx, d*(v-cy)/fy, d). Invalid pixels (d <= 0 or non-finite) are
// skipped. Throws std::invalid_argument on a dimension mismatch.
PointCloud unproject(const DepthMap& depth, const Intrinsics& k);

// Perspective projection (fx*x/z + cx, fy*y/z + cy) of camera-frame points.
// Per-point invalidity (z < kZEps) is not an error.
ProjectedPoints project(const PointCloud& cloud, const Intrinsics& k);

} // namespace mmtk
