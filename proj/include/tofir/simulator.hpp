#pragma once

// Synthetic scene renderer producing raw TOF samples, IR temperature images
// and calibration observations together with their ground truth.
//
// The TOF return of each pixel is carried as a phasor a * exp(i phi). An
// optional secondary path (multi-path interference) and an optional in-camera
// stray-light spread (scattering) are added in the phasor domain before the
// buckets are synthesized, so their effect on the demodulated range follows
// from the same four-bucket model used for measurement.
//
// All randomness comes from a counter-based generator keyed by
// (seed, frame, pixel, stream); renders are identical for any thread count.

#include <tofir/calibration.hpp>
#include <tofir/common.hpp>
#include <tofir/fusion.hpp>
#include <tofir/thermal_model.hpp>
#include <tofir/tof_model.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

namespace tofir {

// ---------------------------------------------------------------------------
// Scene

enum class Axis { x = 0, y = 1, z = 2 };

/// Infinite plane {p : p[axis] = offset}.
struct Plane {
    Axis axis = Axis::z;
    double offset = 0.0;
};

struct Sphere {
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    double radius = 1.0;
};

struct Primitive {
    std::variant<Plane, Sphere> shape;
    double reflectivity = 1.0; ///< (0, 1]
    double temperature = 293.15; ///< kelvin
    bool dynamic = false; ///< absent from background (object-free) frames
    std::string name;
};

struct Scene {
    std::vector<Primitive> primitives;
    double ambient_temperature = 293.15; ///< kelvin, seen where rays miss
    double far_distance = 20.0;          ///< meters, range assigned to missed rays
    double far_reflectivity = 0.5;

    void validate() const
    {
        if (primitives.empty())
            throw ConfigError("scene: at least one primitive is required");
        for (std::size_t i = 0; i < primitives.size(); ++i) {
            const auto& p = primitives[i];
            const std::string where = "scene.primitives[" + std::to_string(i) + "]";
            if (!(p.reflectivity > 0.0 && p.reflectivity <= 1.0))
                throw ConfigError(where + ".reflectivity must be in (0, 1]");
            if (!(p.temperature > 0.0))
                throw ConfigError(where + ".temperature must be positive kelvin");
            if (const auto* s = std::get_if<Sphere>(&p.shape); s && !(s->radius > 0.0))
                throw ConfigError(where + ".radius must be positive");
        }
        if (!(ambient_temperature > 0.0))
            throw ConfigError("scene.ambient_temperature must be positive kelvin");
        if (!(far_distance > 0.0))
            throw ConfigError("scene.far_distance must be positive");
        if (!(far_reflectivity > 0.0 && far_reflectivity <= 1.0))
            throw ConfigError("scene.far_reflectivity must be in (0, 1]");
    }

    /// Copy without the dynamic primitives.
    Scene static_part() const
    {
        Scene s = *this;
        std::erase_if(s.primitives, [](const Primitive& p) { return p.dynamic; });
        return s;
    }
};

/// Camera-to-world pose: world = rotation * camera + position.
struct Pose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
};

/// Pose of the IR camera given the TOF pose and p_ir = R p_tof + T.
inline Pose ir_pose(const Pose& tof, const Extrinsics& ext)
{
    Pose ir;
    ir.rotation = tof.rotation * ext.rotation().transpose();
    ir.position = tof.position - ir.rotation * ext.translation();
    return ir;
}

struct Hit {
    double distance = 0.0;
    int primitive = -1; ///< -1 when the ray missed everything
};

inline constexpr double kRayEpsilon = 1e-9;

/// Nearest intersection along a unit-length ray.
inline Hit cast_ray(const Scene& scene, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir)
{
    Hit best;
    best.distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < scene.primitives.size(); ++i) {
        double t = std::numeric_limits<double>::infinity();
        const auto& shape = scene.primitives[i].shape;
        if (const auto* pl = std::get_if<Plane>(&shape)) {
            const int a = static_cast<int>(pl->axis);
            if (dir(a) != 0.0) {
                const double c = (pl->offset - origin(a)) / dir(a);
                if (c > kRayEpsilon)
                    t = c;
            }
        } else {
            const auto& sp = std::get<Sphere>(shape);
            const Eigen::Vector3d oc = origin - sp.center;
            const double b = oc.dot(dir);
            const double c = oc.squaredNorm() - sp.radius * sp.radius;
            const double disc = b * b - c;
            if (disc >= 0.0) {
                const double root = std::sqrt(disc);
                // Stable form of the nearer root; the farther one covers rays from inside.
                const double q = b > 0.0 ? -(b + root) : -(b - root);
                double t0 = q;
                double t1 = q != 0.0 ? c / q : -b;
                if (t0 > t1)
                    std::swap(t0, t1);
                if (t0 > kRayEpsilon)
                    t = t0;
                else if (t1 > kRayEpsilon)
                    t = t1;
            }
        }
        if (t < best.distance) {
            best.distance = t;
            best.primitive = static_cast<int>(i);
        }
    }
    if (best.primitive < 0)
        best.distance = scene.far_distance;
    return best;
}

// ---------------------------------------------------------------------------
// Noise

/// splitmix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Stateless random source: every draw is a pure function of its key.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept
        : seed_(seed)
    {
    }

    std::uint64_t bits(std::uint64_t frame, std::uint64_t index, std::uint64_t stream) const noexcept
    {
        std::uint64_t h = mix64(seed_);
        h = mix64(h ^ frame);
        h = mix64(h ^ index);
        return mix64(h ^ stream);
    }

    /// Uniform in (0, 1).
    double uniform(std::uint64_t frame, std::uint64_t index, std::uint64_t stream) const noexcept
    {
        return (static_cast<double>(bits(frame, index, stream) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller. Draws from a key space disjoint from
    /// the raw uniform()/bits() streams.
    double normal(std::uint64_t frame, std::uint64_t index, std::uint64_t stream) const noexcept
    {
        constexpr std::uint64_t tag = 1ull << 40;
        const double u1 = uniform(frame, index, tag | (stream << 1));
        const double u2 = uniform(frame, index, tag | (stream << 1) | 1u);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t seed_;
};

namespace streams {
inline constexpr std::uint64_t phase = 1;
inline constexpr std::uint64_t bucket = 2; // uses bucket .. bucket + 3
inline constexpr std::uint64_t saturation = 8;
inline constexpr std::uint64_t ir_pixel = 9;
inline constexpr std::uint64_t tof_pixel = 10;
inline constexpr std::uint64_t target = 11;
} // namespace streams

struct MultipathConfig {
    bool enabled = false;
    double extra_distance = 1.0;     ///< meters of additional one-way path
    double relative_amplitude = 0.2; ///< [0, 1)
};

struct ScatteringConfig {
    bool enabled = false;
    int radius = 8;               ///< disc kernel radius, pixels
    double energy_fraction = 0.1; ///< [0, 1), share of each pixel's signal spread to its neighborhood
};

/// Phase-noise scale giving a range standard deviation of `relative_error`
/// times `distance` for a target of amplitude `amplitude`.
inline double phase_noise_scale_for(double relative_error, double distance, double amplitude,
                                    double modulation_frequency)
{
    const double sigma_phase = relative_error * distance * 4.0 * std::numbers::pi * modulation_frequency /
                               kSpeedOfLight;
    return sigma_phase * amplitude;
}

struct NoiseConfig {
    std::uint64_t seed = 42;
    double amplitude_reference = 900.0; ///< amplitude of a unit-reflectivity target at 1 m
    double offset_reference = 200.0;    ///< ambient offset added to every pixel
    /// Phase noise sigma = phase_noise_scale / amplitude (radians). The default
    /// gives 1% range noise on a unit-reflectivity target at 3 m and 21 MHz.
    double phase_noise_scale = phase_noise_scale_for(0.01, 3.0, 900.0 / 9.0, 21e6);
    double bucket_sigma = 0.0;
    double saturation_fraction = 0.0;   ///< [0, 1), pixels forced to saturation
    double saturation_level = 4000.0;   ///< bucket full-well value
    MultipathConfig multipath;
    ScatteringConfig scattering;

    /// All error sources off.
    static NoiseConfig none()
    {
        NoiseConfig n;
        n.phase_noise_scale = 0.0;
        n.bucket_sigma = 0.0;
        return n;
    }

    void validate() const
    {
        if (!(amplitude_reference > 0.0))
            throw ConfigError("noise.amplitude_reference must be positive");
        if (!(offset_reference >= 0.0))
            throw ConfigError("noise.offset_reference must be non-negative");
        if (!(phase_noise_scale >= 0.0) || !(bucket_sigma >= 0.0))
            throw ConfigError("noise scales must be non-negative");
        if (!(saturation_fraction >= 0.0 && saturation_fraction < 1.0))
            throw ConfigError("noise.saturation_fraction must be in [0, 1)");
        if (!(saturation_level > 0.0))
            throw ConfigError("noise.saturation_level must be positive");
        if (!(multipath.relative_amplitude >= 0.0 && multipath.relative_amplitude < 1.0))
            throw ConfigError("noise.multipath.relative_amplitude must be in [0, 1)");
        if (!(multipath.extra_distance >= 0.0))
            throw ConfigError("noise.multipath.extra_distance must be non-negative");
        if (!(scattering.energy_fraction >= 0.0 && scattering.energy_fraction < 1.0))
            throw ConfigError("noise.scattering.energy_fraction must be in [0, 1)");
        if (scattering.radius < 0)
            throw ConfigError("noise.scattering.radius must be non-negative");
    }
};

// ---------------------------------------------------------------------------
// TOF rendering

struct GroundTruth {
    Grid<double> range;         ///< true distance per pixel, meters
    Grid<double> temperature;   ///< true surface temperature per pixel (thermogram), kelvin
    Grid<std::uint8_t> outlier; ///< 1 where saturation was injected or buckets clipped
    Grid<int> primitive;        ///< hit primitive index, -1 for the far background
    Grid<double> range_sigma;   ///< injected range noise standard deviation, meters
    Extrinsics extrinsics;      ///< TOF-to-IR transform when rendered as a rig
};

struct TofRender {
    RawTofFrame raw;
    GroundTruth truth;
};

/// Spreads `fraction` of each pixel's value uniformly over the in-image
/// pixels of a disc around it; the rest stays in place. Per-source weights
/// are renormalized at the borders, so the image sum is preserved.
template <typename T>
Grid<T> scatter_disc(const Grid<T>& in, int radius, double fraction, int threads = 1)
{
    if (fraction == 0.0 || radius == 0)
        return in;
    const int w = in.width();
    const int h = in.height();
    const int r2 = radius * radius;
    Grid<double> weight(w, h, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int n = 0;
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx)
                    if (dx * dx + dy * dy <= r2 && in.contains(x + dx, y + dy))
                        ++n;
            weight(x, y) = fraction / n;
        }
    }
    Grid<T> out(w, h);
    parallel_rows(h, threads, [&](int y) {
        for (int x = 0; x < w; ++x) {
            T acc = (1.0 - fraction) * in(x, y);
            for (int dy = -radius; dy <= radius; ++dy) {
                for (int dx = -radius; dx <= radius; ++dx) {
                    if (dx * dx + dy * dy > r2 || !in.contains(x + dx, y + dy))
                        continue;
                    acc += weight(x + dx, y + dy) * in(x + dx, y + dy);
                }
            }
            out(x, y) = acc;
        }
    });
    return out;
}

/// Renders one raw TOF frame. Per pixel: cast the undistorted ray, take the
/// amplitude reflectivity * a_ref / D^2 and offset b_ref + a, add the
/// configured error sources and synthesize the four buckets.
inline TofRender render_tof(const Scene& scene, const TofIntrinsics& intr, const Pose& pose,
                            const NoiseConfig& noise, std::uint64_t frame_index = 0, int threads = 1)
{
    scene.validate();
    intr.validate();
    noise.validate();
    const int w = intr.width;
    const int h = intr.height;
    const double fmod = intr.modulation_frequency;

    TofRender out{RawTofFrame(w, h),
                  GroundTruth{Grid<double>(w, h), Grid<double>(w, h), Grid<std::uint8_t>(w, h, 0),
                              Grid<int>(w, h, -1), Grid<double>(w, h), Extrinsics::identity()}};
    GroundTruth& truth = out.truth;

    using Phasor = std::complex<double>;
    Grid<Phasor> phasor(w, h);
    Grid<double> signal(w, h); // reflected light contributing to the offset

    parallel_rows(h, threads, [&](int y) {
        for (int x = 0; x < w; ++x) {
            const Eigen::Vector3d dir = pose.rotation * pixel_ray(x + 0.5, y + 0.5, intr).normalized();
            const Hit hit = cast_ray(scene, pose.position, dir);
            const double refl =
                hit.primitive >= 0 ? scene.primitives[hit.primitive].reflectivity : scene.far_reflectivity;
            const double d = hit.distance;
            truth.range(x, y) = d;
            truth.primitive(x, y) = hit.primitive;
            truth.temperature(x, y) =
                hit.primitive >= 0 ? scene.primitives[hit.primitive].temperature : scene.ambient_temperature;

            const double a = refl * noise.amplitude_reference / (d * d);
            Phasor p = std::polar(a, distance_to_phase(d, fmod));
            double s = a;
            if (noise.multipath.enabled && noise.multipath.relative_amplitude > 0.0) {
                const double a2 = noise.multipath.relative_amplitude * a;
                p += std::polar(a2, distance_to_phase(d + noise.multipath.extra_distance, fmod));
                s += a2;
            }
            phasor(x, y) = p;
            signal(x, y) = s;
        }
    });

    if (noise.scattering.enabled) {
        phasor = scatter_disc(phasor, noise.scattering.radius, noise.scattering.energy_fraction, threads);
        signal = scatter_disc(signal, noise.scattering.radius, noise.scattering.energy_fraction, threads);
    }

    // Injected saturation: exactly round(fraction * N) pixels, chosen by key order.
    std::vector<std::uint8_t> saturated(static_cast<std::size_t>(w) * h, 0);
    const CounterRng rng(noise.seed);
    const auto n_sat = static_cast<std::size_t>(std::llround(noise.saturation_fraction * w * h));
    if (n_sat > 0) {
        std::vector<std::pair<std::uint64_t, std::size_t>> keys(saturated.size());
        for (std::size_t i = 0; i < keys.size(); ++i)
            keys[i] = {rng.bits(frame_index, i, streams::saturation), i};
        std::nth_element(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n_sat - 1), keys.end());
        for (std::size_t k = 0; k < n_sat; ++k)
            saturated[keys[k].second] = 1;
    }

    const double range_per_radian = kSpeedOfLight / (4.0 * std::numbers::pi * fmod);
    parallel_rows(h, threads, [&](int y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = out.raw.index(x, y);
            const Phasor p = phasor(x, y);
            const double a = std::abs(p);
            const double b = noise.offset_reference + signal(x, y);
            double phase = std::arg(p);
            if (phase < 0.0)
                phase += 2.0 * std::numbers::pi;

            double sigma_phase2 = 0.0;
            if (a > 0.0) {
                const double sp = noise.phase_noise_scale / a;
                sigma_phase2 = sp * sp + noise.bucket_sigma * noise.bucket_sigma / (2.0 * a * a);
                if (sp > 0.0)
                    phase += sp * rng.normal(frame_index, idx, streams::phase);
            }
            truth.range_sigma(x, y) = std::sqrt(sigma_phase2) * range_per_radian;

            Buckets s = synthesize_buckets(phase, a, b);
            if (noise.bucket_sigma > 0.0) {
                s.a1 += noise.bucket_sigma * rng.normal(frame_index, idx, streams::bucket + 0);
                s.a2 += noise.bucket_sigma * rng.normal(frame_index, idx, streams::bucket + 1);
                s.a3 += noise.bucket_sigma * rng.normal(frame_index, idx, streams::bucket + 2);
                s.a4 += noise.bucket_sigma * rng.normal(frame_index, idx, streams::bucket + 3);
            }
            const double level = noise.saturation_level;
            if (saturated[idx]) {
                s = {level, level, level, level};
                truth.outlier(x, y) = 1;
            } else {
                bool clipped = false;
                for (double* v : {&s.a1, &s.a2, &s.a3, &s.a4}) {
                    if (*v > level || *v < 0.0) {
                        *v = std::clamp(*v, 0.0, level);
                        clipped = true;
                    }
                }
                truth.outlier(x, y) = clipped ? 1 : 0;
            }
            out.raw(x, y) = s;
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// IR rendering

/// Separable Gaussian blur with edge replication; sigma = 0 returns the input.
inline ThermalFrame gaussian_blur(const ThermalFrame& in, double sigma)
{
    if (sigma < 0.0)
        throw ArgumentError("blur sigma must be non-negative");
    if (sigma == 0.0)
        return in;
    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel)
        k /= sum;

    const int w = in.width();
    const int h = in.height();
    ThermalFrame tmp(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * in(std::clamp(x + i, 0, w - 1), y);
            tmp(x, y) = acc;
        }
    ThermalFrame out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * tmp(x, std::clamp(y + i, 0, h - 1));
            out(x, y) = acc;
        }
    return out;
}

/// Temperature image: each pixel records the surface temperature of the
/// first primitive along its ray, or the ambient temperature.
inline ThermalFrame render_ir(const Scene& scene, const IrIntrinsics& intr, const Pose& pose,
                              double blur_sigma = 0.0, int threads = 1)
{
    scene.validate();
    intr.validate();
    ThermalFrame out(intr.width, intr.height);
    parallel_rows(intr.height, threads, [&](int y) {
        for (int x = 0; x < intr.width; ++x) {
            const Eigen::Vector3d ray((x + 0.5 - intr.cx) * intr.pixel_pitch, (y + 0.5 - intr.cy) * intr.pixel_pitch,
                                      intr.focal_length);
            const Hit hit = cast_ray(scene, pose.position, pose.rotation * ray.normalized());
            out(x, y) = hit.primitive >= 0 ? scene.primitives[hit.primitive].temperature : scene.ambient_temperature;
        }
    });
    return gaussian_blur(out, blur_sigma);
}

/// Image of a point-sampled isotropic Gaussian spot on a constant background.
inline Grid<double> render_gaussian_spot(int width, int height, const Eigen::Vector2d& center, double sigma,
                                         double peak, double background = 0.0)
{
    Grid<double> img(width, height, background);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double dx = x + 0.5 - center.x();
            const double dy = y + 0.5 - center.y();
            img(x, y) += peak * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        }
    return img;
}

// ---------------------------------------------------------------------------
// Rig and calibration data

struct RigRender {
    TofRender tof;
    ThermalFrame thermal;
};

/// Renders both cameras of a rig whose TOF camera sits at `tof_pose`.
inline RigRender render_rig(const Scene& scene, const TofIntrinsics& tof_intr, const IrIntrinsics& ir_intr,
                            const Pose& tof_pose, const Extrinsics& ext, const NoiseConfig& noise,
                            std::uint64_t frame_index = 0, double ir_blur_sigma = 0.0, int threads = 1)
{
    RigRender r{render_tof(scene, tof_intr, tof_pose, noise, frame_index, threads),
                render_ir(scene, ir_intr, ir_pose(tof_pose, ext), ir_blur_sigma, threads)};
    r.tof.truth.extrinsics = ext;
    return r;
}

struct CalibrationTarget {
    Eigen::Vector3d position = Eigen::Vector3d::Zero(); ///< TOF camera frame, meters
    double temperature = 330.0;
};

struct CalibrationSet {
    std::vector<TargetObservation> observations;
    std::size_t excluded = 0; ///< targets behind or outside either camera
};

/// Projects targets into both sensors and adds Gaussian pixel noise; the
/// true target distance becomes the known distance.
inline CalibrationSet make_calibration_set(std::span<const CalibrationTarget> targets, const Extrinsics& ext,
                                           const TofIntrinsics& tof_intr, const IrIntrinsics& ir_intr,
                                           double ir_pixel_sigma, std::uint64_t seed, double tof_pixel_sigma = 0.0)
{
    tof_intr.validate();
    ir_intr.validate();
    if (!(ir_pixel_sigma >= 0.0) || !(tof_pixel_sigma >= 0.0))
        throw ArgumentError("pixel noise must be non-negative");
    const CounterRng rng(seed);
    CalibrationSet set;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const Eigen::Vector3d& p = targets[i].position;
        const auto tof_px = project_to_tof(p, tof_intr);
        const auto ir_px = project_to_ir(ext.apply(p), ir_intr);
        if (!tof_px || !ir_px) {
            ++set.excluded;
            continue;
        }
        TargetObservation o;
        o.distance = p.norm();
        o.tof_pixel = *tof_px + tof_pixel_sigma * Eigen::Vector2d(rng.normal(0, i, 2 * streams::tof_pixel),
                                                                  rng.normal(0, i, 2 * streams::tof_pixel + 1));
        o.ir_pixel = *ir_px + ir_pixel_sigma * Eigen::Vector2d(rng.normal(0, i, 2 * streams::ir_pixel),
                                                               rng.normal(0, i, 2 * streams::ir_pixel + 1));
        const bool inside = o.tof_pixel.x() >= 0.0 && o.tof_pixel.y() >= 0.0 && o.tof_pixel.x() <= tof_intr.width &&
                            o.tof_pixel.y() <= tof_intr.height && o.ir_pixel.x() >= 0.0 && o.ir_pixel.y() >= 0.0 &&
                            o.ir_pixel.x() <= ir_intr.width && o.ir_pixel.y() <= ir_intr.height;
        if (!inside) {
            ++set.excluded;
            continue;
        }
        set.observations.push_back(o);
    }
    return set;
}

/// Random targets visible to both cameras, at distances in [min_distance,
/// max_distance] and at least `margin` pixels inside both sensors.
inline std::vector<CalibrationTarget> sample_calibration_targets(std::size_t count, const TofIntrinsics& tof_intr,
                                                                 const IrIntrinsics& ir_intr, const Extrinsics& ext,
                                                                 double min_distance, double max_distance,
                                                                 std::uint64_t seed, double margin = 2.0)
{
    if (!(min_distance > 0.0 && max_distance >= min_distance))
        throw ArgumentError("target distance range must be positive and ordered");
    const CounterRng rng(seed);
    std::vector<CalibrationTarget> out;
    const std::size_t max_attempts = 1000 * (count + 1);
    for (std::size_t attempt = 0; attempt < max_attempts && out.size() < count; ++attempt) {
        const double x = margin + rng.uniform(0, attempt, 3 * streams::target) * (tof_intr.width - 2 * margin);
        const double y = margin + rng.uniform(0, attempt, 3 * streams::target + 1) * (tof_intr.height - 2 * margin);
        const double d =
            min_distance + rng.uniform(0, attempt, 3 * streams::target + 2) * (max_distance - min_distance);
        const Eigen::Vector3d p = backproject_pixel(x, y, d, tof_intr);
        const auto ir_px = project_to_ir(ext.apply(p), ir_intr);
        if (!ir_px || ir_px->x() < margin || ir_px->y() < margin || ir_px->x() > ir_intr.width - margin ||
            ir_px->y() > ir_intr.height - margin)
            continue;
        out.push_back({p, 330.0});
    }
    if (out.size() < count)
        throw ArgumentError("could not place " + std::to_string(count) +
                            " calibration targets inside both fields of view");
    return out;
}

// ---------------------------------------------------------------------------
// Defaults matching the reference hardware resolutions

inline TofIntrinsics default_tof_intrinsics()
{
    // 64x50 sensor, 100 um pixels, about 40 x 32 degrees field of view, 21 MHz.
    return TofIntrinsics::centered(64, 50, 8.8e-3, 100e-6, 21e6);
}

inline IrIntrinsics default_ir_intrinsics()
{
    // 160x120 microbolometer, 17 um pixels, about 25 x 19 degrees field of view.
    return IrIntrinsics::centered(160, 120, 6.1e-3, 17e-6);
}

/// Back wall at 3 m, a side wall, and a person-sized warm sphere whose front
/// surface is 1 m from the camera.
inline Scene default_scene()
{
    Scene s;
    s.ambient_temperature = 290.0;
    s.primitives.push_back({Plane{Axis::z, 3.0}, 1.0, 295.0, false, "back-wall"});
    s.primitives.push_back({Plane{Axis::x, 1.0}, 0.7, 293.0, false, "side-wall"});
    s.primitives.push_back({Sphere{Eigen::Vector3d(-0.1, 0.05, 1.15), 0.15}, 0.9, 307.0, true, "person"});
    return s;
}

} // namespace tofir
