#pragma once

// Thermal camera model: calibrated temperature images, pinhole projection
// onto the IR sensor and sub-pixel temperature sampling. Pixel and sensor
// coordinate conventions match tof_model.hpp.

#include <tofir/common.hpp>

#include <Eigen/Core>

#include <cmath>
#include <optional>

namespace tofir {

struct IrIntrinsics {
    double focal_length = 0.0; ///< meters
    double pixel_pitch = 0.0;  ///< meters per pixel
    int width = 0;
    int height = 0;
    double cx = 0.0;
    double cy = 0.0;
    // Reserved; projection is distortion-free in this version.
    double k1 = 0.0;
    double k2 = 0.0;

    static IrIntrinsics centered(int width, int height, double focal_length, double pixel_pitch)
    {
        IrIntrinsics intr;
        intr.width = width;
        intr.height = height;
        intr.focal_length = focal_length;
        intr.pixel_pitch = pixel_pitch;
        intr.cx = width / 2.0;
        intr.cy = height / 2.0;
        return intr;
    }

    void validate() const
    {
        if (!(focal_length > 0.0))
            throw ConfigError("ir intrinsics: focal length must be positive");
        if (!(pixel_pitch > 0.0))
            throw ConfigError("ir intrinsics: pixel pitch must be positive");
        if (width <= 0 || height <= 0)
            throw ConfigError("ir intrinsics: width and height must be positive");
        if (!(cx >= 0.0 && cx <= width && cy >= 0.0 && cy <= height))
            throw ConfigError("ir intrinsics: principal point must lie inside the sensor");
    }

    friend bool operator==(const IrIntrinsics&, const IrIntrinsics&) = default;
};

/// Absolute temperatures in kelvin, one per IR pixel.
using ThermalFrame = Grid<double>;

inline void validate_thermal_frame(const ThermalFrame& frame)
{
    if (frame.empty())
        throw StructuralError("thermal frame is empty");
    for (double t : frame)
        if (!(t > 0.0))
            throw ConfigError("thermal frame: temperatures must be positive kelvin values");
}

/// Continuous IR pixel coordinates of a point given in the IR camera frame:
/// f_IR * (X/Z, Y/Z) converted to pixels and offset by the principal point.
/// Returns nullopt when the point is not in front of the camera.
inline std::optional<Eigen::Vector2d> project_to_ir(const Eigen::Vector3d& point, const IrIntrinsics& intr) noexcept
{
    if (!(point.z() > 0.0))
        return std::nullopt;
    const double scale = intr.focal_length / (intr.pixel_pitch * point.z());
    return Eigen::Vector2d(point.x() * scale + intr.cx, point.y() * scale + intr.cy);
}

/// Bilinear blend of a pixel-center cell. The first corner index runs along
/// x: t01 is (x0, y1), t10 is (x1, y0).
inline double bilinear(double t00, double t01, double t10, double t11, double fx, double fy) noexcept
{
    return (1.0 - fx) * ((1.0 - fy) * t00 + fy * t01) + fx * ((1.0 - fy) * t10 + fy * t11);
}

enum class Interpolation { bilinear };

/// Temperature at continuous pixel coordinates (x, y). Valid samples lie in
/// the rectangle spanned by the outermost pixel centers; anything outside
/// returns nullopt rather than a clamped value.
inline std::optional<double> sample_temperature(const ThermalFrame& frame, double x, double y,
                                                Interpolation method = Interpolation::bilinear) noexcept
{
    const double gx = x - 0.5;
    const double gy = y - 0.5;
    const int w = frame.width();
    const int h = frame.height();
    if (!(gx >= 0.0 && gy >= 0.0 && gx <= w - 1 && gy <= h - 1))
        return std::nullopt;

    int x0 = static_cast<int>(std::floor(gx));
    int y0 = static_cast<int>(std::floor(gy));
    // The far edge belongs to the last cell.
    x0 = std::min(x0, std::max(w - 2, 0));
    y0 = std::min(y0, std::max(h - 2, 0));
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = gx - x0;
    const double fy = gy - y0;

    switch (method) {
    case Interpolation::bilinear:
        return bilinear(frame(x0, y0), frame(x0, y1), frame(x1, y0), frame(x1, y1), fx, fy);
    }
    return std::nullopt;
}

} // namespace tofir
