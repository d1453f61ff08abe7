#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "realseal/manifest.hpp"
#include "realseal/result.hpp"

namespace realseal::geometry {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        double n = norm();
        return {x / n, y / n, z / n};
    }
};

struct Mat3 {
    // Row-major.
    std::array<std::array<double, 3>, 3> m{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

    static Mat3 identity() { return {}; }
    Vec3 operator*(const Vec3& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }
    Mat3 transposed() const;
    Mat3 operator*(const Mat3& o) const;
    bool orthonormal(double tol = 1e-9) const;  // and det = +1

    // Rotation about an axis, radians.
    static Mat3 rotation(const Vec3& axis, double angle);
};

struct Pixel {
    double u = 0, v = 0;
};

// World-to-camera pose: x_cam = rotation * x_world + translation.
struct PinholeCamera {
    double focal_px = 1.0;
    double cx = 0.0, cy = 0.0;
    Mat3 rotation;
    Vec3 translation;

    Vec3 center() const { return -(rotation.transposed() * translation); }
    Vec3 world_ray_direction(const Pixel& px) const;
    bool valid(double tol = 1e-9) const { return focal_px > 0 && rotation.orthonormal(tol); }
};

struct CameraRig {
    PinholeCamera cam_a, cam_b;

    double baseline() const { return (cam_a.center() - cam_b.center()).norm(); }
    bool valid() const { return cam_a.valid() && cam_b.valid() && baseline() > 0; }
};

// A matched pixel pair, cam A then cam B.
struct PixelPair {
    Pixel a, b;
};

using CorrespondenceSet = std::vector<PixelPair>;

enum class GeometryErrorKind {
    BehindCamera,
    DegenerateRays,
    DegeneratePoints,
    InsufficientGeometry,
    InvalidCamera,
};

struct GeometryError {
    GeometryErrorKind kind;
    std::string detail;
};

inline constexpr double kDefaultMinRayAngle = 1e-6;  // radians

// Calibrated on the acceptance operating point (f=500 px, baseline 1,
// depth 5, pixel noise 0.5): noisy flat screens score <= 0.009, volumetric
// scenes with unit depth spread score >= 0.08.
inline constexpr double kDefaultPlanarityThreshold = 0.02;

Result<Pixel, GeometryError> project(const Vec3& point_world, const PinholeCamera& camera);

// Midpoint of the shortest segment between the two back-projected rays.
Result<Vec3, GeometryError> triangulate(const PixelPair& pair, const CameraRig& rig,
                                        double min_ray_angle = kDefaultMinRayAngle);

struct PlaneFit {
    Vec3 normal;          // unit
    double offset = 0;    // plane is {p : normal . p = offset}
    double rms_residual = 0;
};

// Least-squares plane through >= 3 non-collinear points: normal is the
// smallest principal direction of the centered cloud.
Result<PlaneFit, GeometryError> fit_plane(std::span<const Vec3> points);

struct PlanarityReport {
    std::vector<Vec3> points_3d;
    Vec3 plane_normal;
    double plane_offset = 0;
    double rms_residual = 0;
    double normalized_score = 0;  // rms_residual / mean depth in cam A
    SceneLabel label = SceneLabel::Label3D;
    double threshold_used = kDefaultPlanarityThreshold;
};

Result<PlanarityReport, GeometryError> classify_scene(std::span<const PixelPair> correspondences,
                                                      const CameraRig& rig,
                                                      double threshold = kDefaultPlanarityThreshold);

// Rig and correspondence files use the shared kv grammar
// (cam_a.focal_px=..., pair.0.a.u=...).
std::string serialize_rig(const CameraRig& rig);
Result<CameraRig, GeometryError> parse_rig(std::string_view text);
std::string serialize_correspondences(std::span<const PixelPair> pairs);
Result<CorrespondenceSet, GeometryError> parse_correspondences(std::string_view text);

// Two forward-facing cameras with identical intrinsics, cam B displaced by
// baseline along +x. The workhorse rig for captures and the design harness.
CameraRig make_stereo_rig(double focal_px, double baseline);

}  // namespace realseal::geometry
