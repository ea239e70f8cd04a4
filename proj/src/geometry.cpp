// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0

#include "mmtk/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace mmtk {

namespace {

// Hamilton product written out in scalars. Keeping the arithmetic explicit
// (rather than delegating to Eigen) guarantees that conj(q) * q has an
// exactly zero vector part, which relative_motion relies on to make a static
// camera produce an exactly zero motion field downstream.
Eigen::Quaterniond quat_mul(const Eigen::Quaterniond& p, const Eigen::Quaterniond& q) {
    const double pw = p.w(), px = p.x(), py = p.y(), pz = p.z();
    const double qw = q.w(), qx = q.x(), qy = q.y(), qz = q.z();
    Eigen::Quaterniond out;
    out.w() = pw * qw - px * qx - py * qy - pz * qz;
    out.x() = pw * qx + px * qw + py * qz - pz * qy;
    out.y() = pw * qy + py * qw + pz * qx - px * qz;
    out.z() = pw * qz + pz * qw + px * qy - py * qx;
    return out;
}

} // namespace

CameraPose CameraPose::from_tum(double tx, double ty, double tz,
                                double qx, double qy, double qz, double qw) {
    const double norm2 = qx * qx + qy * qy + qz * qz + qw * qw;
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
        throw std::invalid_argument("CameraPose: quaternion has zero or non-finite norm");
    }
    CameraPose pose;
    pose.translation = Eigen::Vector3d(tx, ty, tz);
    // Skip the division for already-unit input so that parsing a freshly
    // serialized pose is a fixed point (write -> read -> write is
    // byte-stable). The guard is far tighter than the 1e-6 norm invariant.
    if (std::abs(norm2 - 1.0) <= 1e-12) {
        pose.rotation = Eigen::Quaterniond(qw, qx, qy, qz);
    } else {
        const double norm = std::sqrt(norm2);
        pose.rotation = Eigen::Quaterniond(qw / norm, qx / norm, qy / norm, qz / norm);
    }
    return pose;
}

RigidTransform RigidTransform::from_parts(const Eigen::Matrix3d& r, const Eigen::Vector3d& t) {
    RigidTransform out;
    out.matrix.setIdentity();
    out.matrix.topLeftCorner<3, 3>() = r;
    out.matrix.topRightCorner<3, 1>() = t;
    return out;
}

void Intrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) {
        throw std::invalid_argument("Intrinsics: focal lengths must be positive");
    }
    if (width < 1 || height < 1) {
        throw std::invalid_argument("Intrinsics: image size must be at least 1x1");
    }
}

Eigen::Matrix3d quat_to_rotation(const Eigen::Quaterniond& q) {
    const double norm = std::sqrt(q.x() * q.x() + q.y() * q.y() + q.z() * q.z() + q.w() * q.w());
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw std::invalid_argument("quat_to_rotation: zero-norm quaternion");
    }
    const double x = q.x() / norm, y = q.y() / norm, z = q.z() / norm, w = q.w() / norm;

    Eigen::Matrix3d r;
    r(0, 0) = 1.0 - 2.0 * (y * y + z * z);
    r(0, 1) = 2.0 * (x * y - z * w);
    r(0, 2) = 2.0 * (x * z + y * w);
    r(1, 0) = 2.0 * (x * y + z * w);
    r(1, 1) = 1.0 - 2.0 * (x * x + z * z);
    r(1, 2) = 2.0 * (y * z - x * w);
    r(2, 0) = 2.0 * (x * z - y * w);
    r(2, 1) = 2.0 * (y * z + x * w);
    r(2, 2) = 1.0 - 2.0 * (x * x + y * y);
    return r;
}

RigidTransform pose_to_cam_to_world(const CameraPose& pose) {
    return RigidTransform::from_parts(quat_to_rotation(pose.rotation), pose.translation);
}

RigidTransform invert_transform(const RigidTransform& t) {
    const Eigen::Matrix3d rt = t.rotation().transpose();
    return RigidTransform::from_parts(rt, -(rt * t.translation()));
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
    RigidTransform out;
    out.matrix = a.matrix * b.matrix;
    return out;
}

RigidTransform relative_motion(const CameraPose& from, const CameraPose& to) {
    // Y_to * T_from = (R_to^T R_from, R_to^T (t_from - t_to)). The rotation is
    // assembled from the relative quaternion conj(q_to) * q_from; the
    // translation difference is rotated through the conjugate's matrix so a
    // zero difference stays exactly zero.
    const Eigen::Quaterniond to_conj(to.rotation.w(), -to.rotation.x(),
                                     -to.rotation.y(), -to.rotation.z());
    const Eigen::Quaterniond q_rel = quat_mul(to_conj, from.rotation);
    const Eigen::Matrix3d r_rel = quat_to_rotation(q_rel);
    const Eigen::Vector3d t_rel =
        quat_to_rotation(to_conj) * (from.translation - to.translation);
    return RigidTransform::from_parts(r_rel, t_rel);
}

PointCloud unproject(const DepthMap& depth, const Intrinsics& k) {
    k.validate();
    if (depth.width != k.width || depth.height != k.height) {
        throw std::invalid_argument("unproject: depth map dimensions do not match intrinsics");
    }
    PointCloud cloud;
    cloud.points.reserve(depth.values.size());
    cloud.source_pixels.reserve(depth.values.size());
    for (int v = 0; v < depth.height; ++v) {
        for (int u = 0; u < depth.width; ++u) {
            const float d = depth.at(u, v);
            if (!DepthMap::is_valid_depth(d)) {
                continue;
            }
            const double dd = static_cast<double>(d);
            cloud.points.emplace_back(dd * (u - k.cx) / k.fx, dd * (v - k.cy) / k.fy, dd);
            cloud.source_pixels.emplace_back(u, v);
        }
    }
    return cloud;
}

ProjectedPoints project(const PointCloud& cloud, const Intrinsics& k) {
    k.validate();
    ProjectedPoints out;
    const std::size_t n = cloud.points.size();
    out.pixels.resize(n, Eigen::Vector2d::Zero());
    out.depths.resize(n, 0.0);
    out.valid.resize(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d& p = cloud.points[i];
        out.depths[i] = p.z();
        if (!(p.z() >= kZEps)) {
            continue;
        }
        out.pixels[i] = Eigen::Vector2d(k.fx * p.x() / p.z() + k.cx,
                                        k.fy * p.y() / p.z() + k.cy);
        out.valid[i] = 1;
    }
    return out;
}

} // namespace mmtk
