#pragma once

#include <tofir/common.hpp>
#include <tofir/thermal_model.hpp>
#include <tofir/tof_model.hpp>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <string>

namespace tofir {

inline constexpr double kOrthonormalityTolerance = 1e-9;

/// Rigid transform from the TOF frame to the IR frame: p_ir = R p_tof + T.
class Extrinsics {
public:
    Extrinsics() = default;

    /// Throws ConfigError unless R is orthonormal with determinant +1.
    Extrinsics(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
        : rotation_(rotation), translation_(translation)
    {
        check_rotation(rotation_);
        if (!translation_.allFinite())
            throw ConfigError("extrinsics: translation must be finite");
    }

    static Extrinsics identity() { return {}; }

    const Eigen::Matrix3d& rotation() const noexcept { return rotation_; }
    const Eigen::Vector3d& translation() const noexcept { return translation_; }

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const noexcept { return rotation_ * p + translation_; }

    Extrinsics inverse() const
    {
        const Eigen::Matrix3d rt = rotation_.transpose();
        return Extrinsics(rt, -(rt * translation_));
    }

    static void check_rotation(const Eigen::Matrix3d& r)
    {
        if (!r.allFinite())
            throw ConfigError("extrinsics: rotation has non-finite entries");
        const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).norm();
        if (ortho > kOrthonormalityTolerance)
            throw ConfigError("extrinsics: rotation is not orthonormal (|R^T R - I| = " + std::to_string(ortho) + ")");
        const double det = r.determinant();
        if (std::abs(det - 1.0) > kOrthonormalityTolerance)
            throw ConfigError("extrinsics: rotation determinant is " + std::to_string(det) + ", expected +1");
    }

private:
    Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

inline PointCloud transform_points(const PointCloud& cloud, const Extrinsics& ext)
{
    PointCloud out = cloud;
    for (auto& p : out.points)
        if (p.valid)
            p.position = ext.apply(p.position);
    return out;
}

enum class FusionStatus : std::uint8_t {
    valid = 0,
    invalid_range = 1,
    behind_ir_camera = 2,
    out_of_ir_field = 3,
};

inline const char* to_string(FusionStatus s) noexcept
{
    switch (s) {
    case FusionStatus::valid: return "valid";
    case FusionStatus::invalid_range: return "invalid-range";
    case FusionStatus::behind_ir_camera: return "behind-ir-camera";
    case FusionStatus::out_of_ir_field: return "out-of-ir-field";
    }
    return "unknown";
}

struct ThermogramEntry {
    Eigen::Vector3d position = Eigen::Vector3d::Zero(); ///< TOF frame, meters
    double temperature = 0.0;                           ///< kelvin, meaningful when valid
    FusionStatus status = FusionStatus::invalid_range;

    bool valid() const noexcept { return status == FusionStatus::valid; }
};

/// One entry per TOF pixel, index-aligned with the range frame.
using Thermogram = Grid<ThermogramEntry>;

/// Assigns an IR temperature to every valid range pixel: back-project,
/// move into the IR frame, project onto the IR sensor and interpolate.
/// Positions stay in the TOF frame. Occlusion between the two viewpoints is
/// not modelled.
inline Thermogram fuse(const RangeFrame& range, const ThermalFrame& thermal, const TofIntrinsics& tof_intr,
                       const IrIntrinsics& ir_intr, const Extrinsics& ext,
                       Interpolation method = Interpolation::bilinear)
{
    tof_intr.validate();
    ir_intr.validate();
    require_dimensions(range.width(), range.height(), tof_intr.width, tof_intr.height, "fuse: range frame");
    require_dimensions(thermal.width(), thermal.height(), ir_intr.width, ir_intr.height, "fuse: thermal frame");
    validate_thermal_frame(thermal);

    Thermogram out(range.width(), range.height());
    for (int y = 0; y < range.height(); ++y) {
        for (int x = 0; x < range.width(); ++x) {
            const RangePixel& p = range(x, y);
            ThermogramEntry& e = out(x, y);
            if (!p.valid) {
                e.status = FusionStatus::invalid_range;
                continue;
            }
            e.position = backproject_pixel(x + 0.5, y + 0.5, p.distance, tof_intr);
            const auto pixel = project_to_ir(ext.apply(e.position), ir_intr);
            if (!pixel) {
                e.status = FusionStatus::behind_ir_camera;
                continue;
            }
            const auto t = sample_temperature(thermal, pixel->x(), pixel->y(), method);
            if (!t) {
                e.status = FusionStatus::out_of_ir_field;
                continue;
            }
            e.temperature = *t;
            e.status = FusionStatus::valid;
        }
    }
    return out;
}

} // namespace tofir
