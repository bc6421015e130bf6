#pragma once

// Time-of-flight camera model: four-bucket demodulation, phase/distance
// conversion, radial undistortion and back-projection to metric points.
//
// Conventions used throughout:
//  - Pixel (i, j) covers the continuous square [i, i+1) x [j, j+1); its
//    center is (i + 0.5, j + 0.5). x runs along columns, y along rows.
//  - Sensor coordinates (u, v) are metric offsets from the principal point:
//    u = (x - cx) * pixel_pitch. The focal length uses the same unit.
//  - Radial distortion coefficients act on normalized coordinates (u/f, v/f).
//  - Camera frame: X right, Y down, Z along the optical axis.

#include <tofir/common.hpp>

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace tofir {

struct TofIntrinsics {
    double focal_length = 0.0;   ///< meters (same unit as pixel_pitch)
    double pixel_pitch = 0.0;    ///< meters per pixel
    int width = 0;
    int height = 0;
    double cx = 0.0;             ///< principal point, continuous pixel coordinates
    double cy = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    double modulation_frequency = 0.0; ///< Hz

    /// Intrinsics with the principal point at the image center.
    static TofIntrinsics centered(int width, int height, double focal_length, double pixel_pitch,
                                  double modulation_frequency)
    {
        TofIntrinsics intr;
        intr.width = width;
        intr.height = height;
        intr.focal_length = focal_length;
        intr.pixel_pitch = pixel_pitch;
        intr.cx = width / 2.0;
        intr.cy = height / 2.0;
        intr.modulation_frequency = modulation_frequency;
        return intr;
    }

    void validate() const
    {
        if (!(focal_length > 0.0))
            throw ConfigError("tof intrinsics: focal length must be positive");
        if (!(pixel_pitch > 0.0))
            throw ConfigError("tof intrinsics: pixel pitch must be positive");
        if (!(modulation_frequency > 0.0))
            throw ConfigError("tof intrinsics: modulation frequency must be positive");
        if (width <= 0 || height <= 0)
            throw ConfigError("tof intrinsics: width and height must be positive");
        if (!(cx >= 0.0 && cx <= width && cy >= 0.0 && cy <= height))
            throw ConfigError("tof intrinsics: principal point must lie inside the sensor");
        if (!std::isfinite(k1) || !std::isfinite(k2))
            throw ConfigError("tof intrinsics: distortion coefficients must be finite");
    }

    friend bool operator==(const TofIntrinsics&, const TofIntrinsics&) = default;
};

/// Raw intensity samples of one pixel, taken a quarter period apart.
struct Buckets {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double a4 = 0.0;

    friend bool operator==(const Buckets&, const Buckets&) = default;
};

using RawTofFrame = Grid<Buckets>;

struct RangePixel {
    double distance = 0.0;  ///< meters
    double amplitude = 0.0;
    double offset = 0.0;
    bool valid = false;

    friend bool operator==(const RangePixel&, const RangePixel&) = default;
};

using RangeFrame = Grid<RangePixel>;

struct CloudPoint {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    std::size_t pixel = 0; ///< row-major index of the source pixel
    bool valid = false;
};

struct PointCloud {
    int width = 0;
    int height = 0;
    std::vector<CloudPoint> points;
};

enum class InvalidPointPolicy {
    placeholder, ///< keep one entry per pixel, invalid ones flagged
    drop,        ///< emit valid points only
};

/// Under/over-exposure thresholds, in intensity units.
struct ExposureLimits {
    double amplitude_min = 1.0;
    double amplitude_max = 3000.0;
    double offset_max = 3500.0;

    void validate() const
    {
        if (!(amplitude_min >= 0.0 && amplitude_max >= 0.0 && offset_max >= 0.0))
            throw ArgumentError("exposure limits must be non-negative");
        if (!(amplitude_min < amplitude_max))
            throw ArgumentError("exposure limits: amplitude_min must be below amplitude_max");
    }

    bool accepts(const RangePixel& p) const noexcept
    {
        return p.amplitude >= amplitude_min && p.amplitude <= amplitude_max && p.offset <= offset_max;
    }
};

// ---------------------------------------------------------------------------
// Phase and distance

/// Largest distance measurable before the phase wraps: c / (2 f_mod).
inline double unambiguous_range(double modulation_frequency)
{
    if (!(modulation_frequency > 0.0))
        throw ArgumentError("modulation frequency must be positive");
    return kSpeedOfLight / (2.0 * modulation_frequency);
}

inline double phase_to_distance(double phase, double modulation_frequency)
{
    return kSpeedOfLight * phase / (4.0 * std::numbers::pi * modulation_frequency);
}

/// Phase in [0, 2pi) of a return from distance D. The distance is first
/// reduced modulo the unambiguous range, so D and D + range map to the
/// same phase whenever D + range is itself exactly representable.
inline double distance_to_phase(double distance, double modulation_frequency)
{
    const double range = unambiguous_range(modulation_frequency);
    const double cycles = std::floor(distance / range);
    double reduced = std::fma(-range, cycles, distance);
    if (reduced < 0.0)
        reduced += range;
    if (reduced >= range)
        reduced -= range;
    const double phase = reduced * (4.0 * std::numbers::pi * modulation_frequency / kSpeedOfLight);
    return phase < 2.0 * std::numbers::pi ? phase : 0.0;
}

struct Demodulated {
    double phase = 0.0;     ///< radians in [0, 2pi)
    double amplitude = 0.0;
    double offset = 0.0;
};

/// Phase, amplitude and offset of one pixel's four samples. The phase uses
/// atan2, so every sign combination resolves to the correct quadrant.
inline Demodulated demodulate_pixel(const Buckets& s) noexcept
{
    const double sine = s.a1 - s.a3;
    const double cosine = s.a2 - s.a4;
    Demodulated out;
    double phase = std::atan2(sine, cosine);
    if (phase < 0.0)
        phase += 2.0 * std::numbers::pi;
    // atan2 of a tiny negative angle rounds up to exactly 2pi after the shift.
    if (phase >= 2.0 * std::numbers::pi)
        phase = 0.0;
    out.phase = phase;
    out.amplitude = std::sqrt(sine * sine + cosine * cosine) / 2.0;
    out.offset = (s.a1 + s.a2 + s.a3 + s.a4) / 4.0;
    return out;
}

/// Inverse of demodulate_pixel: A1 = b + a sin(phi), A2 = b + a cos(phi),
/// A3 = b - a sin(phi), A4 = b - a cos(phi).
inline Buckets synthesize_buckets(double phase, double amplitude, double offset) noexcept
{
    const double s = amplitude * std::sin(phase);
    const double c = amplitude * std::cos(phase);
    return {offset + s, offset + c, offset - s, offset - c};
}

inline Buckets synthesize_buckets_for_distance(double distance, double amplitude, double offset,
                                               double modulation_frequency)
{
    return synthesize_buckets(distance_to_phase(distance, modulation_frequency), amplitude, offset);
}

inline RangeFrame apply_exposure_limits(RangeFrame frame, const ExposureLimits& limits)
{
    limits.validate();
    for (auto& p : frame)
        if (p.valid && !limits.accepts(p))
            p.valid = false;
    return frame;
}

/// Converts raw samples to distance, amplitude and offset. Zero-amplitude
/// pixels are marked invalid; when limits are given, pixels outside them are
/// marked invalid as well. The wrap index is taken as zero: targets beyond
/// the unambiguous range alias back into it.
inline RangeFrame demodulate(const RawTofFrame& raw, const TofIntrinsics& intr,
                             const std::optional<ExposureLimits>& limits = std::nullopt)
{
    intr.validate();
    require_dimensions(raw.width(), raw.height(), intr.width, intr.height, "demodulate");
    RangeFrame out(raw.width(), raw.height());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const Demodulated d = demodulate_pixel(raw[i]);
        RangePixel& p = out[i];
        p.amplitude = d.amplitude;
        p.offset = d.offset;
        p.valid = d.amplitude > 0.0;
        p.distance = p.valid ? phase_to_distance(d.phase, intr.modulation_frequency) : 0.0;
    }
    if (limits)
        return apply_exposure_limits(std::move(out), *limits);
    return out;
}

// ---------------------------------------------------------------------------
// Distortion and geometry

/// Radial undistortion: r_u = r_d + k1 r_d^3 + k2 r_d^5, applied along the
/// ray through (u, v). The center is a fixed point.
inline Eigen::Vector2d undistort_pixel(double u, double v, double k1, double k2) noexcept
{
    const double r2 = u * u + v * v;
    if (r2 == 0.0)
        return {u, v};
    // r_u / r_d written without the square root.
    const double scale = 1.0 + k1 * r2 + k2 * r2 * r2;
    return {scale * u, scale * v};
}

/// Inverse of undistort_pixel by Newton iteration on the radius. Returns
/// nullopt when the distortion polynomial is not invertible at this radius.
inline std::optional<Eigen::Vector2d> distort_pixel(double u, double v, double k1, double k2) noexcept
{
    const double ru = std::hypot(u, v);
    if (ru == 0.0 || (k1 == 0.0 && k2 == 0.0))
        return Eigen::Vector2d(u, v);
    double r = ru;
    for (int iter = 0; iter < 50; ++iter) {
        const double r2 = r * r;
        const double g = r + k1 * r * r2 + k2 * r * r2 * r2 - ru;
        const double dg = 1.0 + 3.0 * k1 * r2 + 5.0 * k2 * r2 * r2;
        if (!(dg > 0.0))
            return std::nullopt;
        const double step = g / dg;
        r -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, ru))
            break;
    }
    if (!(r > 0.0) || !std::isfinite(r))
        return std::nullopt;
    const double scale = r / ru;
    return Eigen::Vector2d(scale * u, scale * v);
}

/// Metric sensor coordinates of a continuous pixel position, relative to
/// the principal point.
inline Eigen::Vector2d sensor_coordinates(double x, double y, const TofIntrinsics& intr) noexcept
{
    return {(x - intr.cx) * intr.pixel_pitch, (y - intr.cy) * intr.pixel_pitch};
}

/// Unnormalized viewing ray (u_u, v_u, f) of a continuous pixel position,
/// with radial distortion removed.
inline Eigen::Vector3d pixel_ray(double x, double y, const TofIntrinsics& intr) noexcept
{
    const Eigen::Vector2d uv = sensor_coordinates(x, y, intr);
    const double f = intr.focal_length;
    const Eigen::Vector2d n = undistort_pixel(uv.x() / f, uv.y() / f, intr.k1, intr.k2);
    return {n.x() * f, n.y() * f, f};
}

/// Point at distance D along the ray of pixel (x, y): (D / d) (u, v, f) with
/// d = |(u, v, f)|, so the result has norm D.
inline Eigen::Vector3d backproject_pixel(double x, double y, double distance, const TofIntrinsics& intr) noexcept
{
    const Eigen::Vector3d ray = pixel_ray(x, y, intr);
    return (distance / ray.norm()) * ray;
}

/// Continuous pixel position where a camera-frame point images on the TOF
/// sensor, including distortion. nullopt for points at or behind Z = 0.
inline std::optional<Eigen::Vector2d> project_to_tof(const Eigen::Vector3d& point, const TofIntrinsics& intr) noexcept
{
    if (!(point.z() > 0.0))
        return std::nullopt;
    const auto n = distort_pixel(point.x() / point.z(), point.y() / point.z(), intr.k1, intr.k2);
    if (!n)
        return std::nullopt;
    const double scale = intr.focal_length / intr.pixel_pitch;
    return Eigen::Vector2d(n->x() * scale + intr.cx, n->y() * scale + intr.cy);
}

inline PointCloud backproject(const RangeFrame& range, const TofIntrinsics& intr,
                              InvalidPointPolicy policy = InvalidPointPolicy::placeholder)
{
    intr.validate();
    require_dimensions(range.width(), range.height(), intr.width, intr.height, "backproject");
    PointCloud cloud;
    cloud.width = range.width();
    cloud.height = range.height();
    cloud.points.reserve(range.size());
    for (int y = 0; y < range.height(); ++y) {
        for (int x = 0; x < range.width(); ++x) {
            const std::size_t idx = range.index(x, y);
            const RangePixel& p = range[idx];
            if (!p.valid) {
                if (policy == InvalidPointPolicy::placeholder)
                    cloud.points.push_back({Eigen::Vector3d::Zero(), idx, false});
                continue;
            }
            cloud.points.push_back({backproject_pixel(x + 0.5, y + 0.5, p.distance, intr), idx, true});
        }
    }
    return cloud;
}

} // namespace tofir
