#pragma once

// Extrinsic rotation calibration between the TOF and IR cameras when the
// translation is known. Targets at known distance are seen by both sensors;
// the rotation minimizing the IR reprojection error is found by damped
// Gauss-Newton on an axis-angle increment composed onto the current estimate.

#include <tofir/common.hpp>
#include <tofir/fusion.hpp>
#include <tofir/thermal_model.hpp>
#include <tofir/tof_model.hpp>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace tofir {

/// Residual assigned to an observation whose target lands behind the IR camera.
inline constexpr double kBehindCameraPenalty = 1e6;

struct TargetObservation {
    Eigen::Vector2d tof_pixel = Eigen::Vector2d::Zero(); ///< continuous TOF pixel coordinates
    double distance = 0.0;                               ///< known target distance, meters
    Eigen::Vector2d ir_pixel = Eigen::Vector2d::Zero();  ///< measured IR pixel coordinates
};

// ---------------------------------------------------------------------------
// Rotation helpers

inline Eigen::Matrix3d skew(const Eigen::Vector3d& w)
{
    Eigen::Matrix3d m;
    m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
    return m;
}

/// Rodrigues' formula, with series expansions near zero angle.
inline Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& w)
{
    const double theta2 = w.squaredNorm();
    const double theta = std::sqrt(theta2);
    double a, b;
    if (theta < 1e-6) {
        a = 1.0 - theta2 / 6.0;
        b = 0.5 - theta2 / 24.0;
    } else {
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / theta2;
    }
    const Eigen::Matrix3d k = skew(w);
    return Eigen::Matrix3d::Identity() + a * k + b * k * k;
}

/// Nearest rotation matrix in the Frobenius sense.
inline Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& m)
{
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d u = svd.matrixU();
    const Eigen::Matrix3d& v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0)
        u.col(2) *= -1.0;
    return u * v.transpose();
}

/// Angle of the relative rotation R1^T R2, in radians.
inline double geodesic_distance(const Eigen::Matrix3d& r1, const Eigen::Matrix3d& r2)
{
    return Eigen::AngleAxisd(Eigen::Matrix3d(r1.transpose() * r2)).angle();
}

// ---------------------------------------------------------------------------
// Sub-pixel peak localization

struct PeakLocation {
    Eigen::Vector2d position = Eigen::Vector2d::Zero(); ///< continuous pixel coordinates
    bool refined = false; ///< false when the fit was rejected and the seed center returned
};

/// Brightest pixel of an image; ties resolve to the first in row-major order.
inline std::pair<int, int> find_peak_seed(const Grid<double>& image)
{
    if (image.empty())
        throw ArgumentError("find_peak_seed: empty image");
    std::size_t best = 0;
    for (std::size_t i = 1; i < image.size(); ++i)
        if (image[i] > image[best])
            best = i;
    return {static_cast<int>(best % image.width()), static_cast<int>(best / image.width())};
}

/// Refines an integer maximum with a separable quadratic least-squares fit
/// over its 3x3 neighborhood. Along each axis the fit reduces to the 3-point
/// parabola through the neighborhood's column (or row) means, with vertex
/// offset (l - r) / (2 (l - 2c + r)). Falls back to the seed center if either
/// axis is not concave or the vertex lies more than one pixel away.
inline PeakLocation locate_peak(const Grid<double>& image, int seed_x, int seed_y)
{
    if (!image.contains(seed_x, seed_y))
        throw ArgumentError("locate_peak: seed outside the image");
    if (seed_x < 1 || seed_y < 1 || seed_x > image.width() - 2 || seed_y > image.height() - 2)
        throw ArgumentError("locate_peak: seed on the image border");
    const double center = image(seed_x, seed_y);
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
            if ((dx != 0 || dy != 0) && !(image(seed_x + dx, seed_y + dy) < center))
                throw ArgumentError("locate_peak: seed is not a strict local maximum");

    double col[3] = {0.0, 0.0, 0.0};
    double row[3] = {0.0, 0.0, 0.0};
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            const double v = image(seed_x + dx, seed_y + dy) / 3.0;
            col[dx + 1] += v;
            row[dy + 1] += v;
        }
    }

    const auto vertex = [](const double (&s)[3], double& offset) {
        const double curvature = s[0] - 2.0 * s[1] + s[2];
        if (!(curvature < 0.0))
            return false;
        offset = (s[0] - s[2]) / (2.0 * curvature);
        return std::abs(offset) <= 1.0;
    };

    PeakLocation out;
    out.position = {seed_x + 0.5, seed_y + 0.5};
    double ox = 0.0, oy = 0.0;
    if (vertex(col, ox) && vertex(row, oy)) {
        out.position += Eigen::Vector2d(ox, oy);
        out.refined = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Projection error

/// IR-pixel residual (projected - measured) of one observation under [R | T].
inline Eigen::Vector2d projection_residual(const TargetObservation& obs, const Eigen::Matrix3d& rotation,
                                           const Eigen::Vector3d& translation, const TofIntrinsics& tof_intr,
                                           const IrIntrinsics& ir_intr)
{
    const Eigen::Vector3d p_tof = backproject_pixel(obs.tof_pixel.x(), obs.tof_pixel.y(), obs.distance, tof_intr);
    const auto projected = project_to_ir(rotation * p_tof + translation, ir_intr);
    if (!projected)
        return {kBehindCameraPenalty, 0.0};
    return *projected - obs.ir_pixel;
}

/// Euclidean distance in IR pixels between the measured target and the
/// reprojection of its known-distance TOF observation.
inline double projection_error(const TargetObservation& obs, const Eigen::Matrix3d& rotation,
                               const Eigen::Vector3d& translation, const TofIntrinsics& tof_intr,
                               const IrIntrinsics& ir_intr)
{
    return projection_residual(obs, rotation, translation, tof_intr, ir_intr).norm();
}

// ---------------------------------------------------------------------------
// Rotation estimation

enum class CostMode {
    squared, ///< minimize sum of E_i^2
    robust,  ///< minimize sum of E_i by iteratively reweighted least squares
};

enum class ConvergenceReason {
    zero_residual,
    step_small,
    cost_stalled,
    max_iterations,
};

inline const char* to_string(ConvergenceReason r) noexcept
{
    switch (r) {
    case ConvergenceReason::zero_residual: return "zero-residual";
    case ConvergenceReason::step_small: return "step-below-tolerance";
    case ConvergenceReason::cost_stalled: return "relative-cost-decrease-below-tolerance";
    case ConvergenceReason::max_iterations: return "max-iterations";
    }
    return "unknown";
}

struct CalibrationOptions {
    Eigen::Matrix3d initial_rotation = Eigen::Matrix3d::Identity();
    CostMode mode = CostMode::squared;
    int max_iterations = 200;
    double step_tolerance = 1e-10;     ///< radians
    double cost_tolerance = 1e-12;     ///< relative cost decrease
    double zero_cost = 1e-24;          ///< squared pixels; below this the data is fit exactly
    double jacobian_step = 1e-6;       ///< radians, central differences
    int robust_reweightings = 30;
};

struct CalibrationResult {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    std::vector<double> residuals; ///< E_i, IR pixels
    double total_error = 0.0;      ///< sum of residuals
    int iterations = 0;
    bool converged = false;
    ConvergenceReason reason = ConvergenceReason::max_iterations;

    double rms() const
    {
        double s = 0.0;
        for (double r : residuals)
            s += r * r;
        return residuals.empty() ? 0.0 : std::sqrt(s / residuals.size());
    }
};

namespace detail {

inline void validate_observations(std::span<const TargetObservation> obs, const TofIntrinsics& tof,
                                  const IrIntrinsics& ir)
{
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto& o = obs[i];
        const auto where = " (observation " + std::to_string(i) + ")";
        if (!(o.distance > 0.0) || !std::isfinite(o.distance))
            throw ArgumentError("observation distance must be positive" + where);
        if (!o.tof_pixel.allFinite() || !o.ir_pixel.allFinite())
            throw ArgumentError("observation coordinates must be finite" + where);
        if (o.tof_pixel.x() < 0.0 || o.tof_pixel.y() < 0.0 || o.tof_pixel.x() > tof.width ||
            o.tof_pixel.y() > tof.height)
            throw ArgumentError("observation TOF pixel outside the sensor" + where);
        if (o.ir_pixel.x() < 0.0 || o.ir_pixel.y() < 0.0 || o.ir_pixel.x() > ir.width || o.ir_pixel.y() > ir.height)
            throw ArgumentError("observation IR pixel outside the sensor" + where);
    }
}

/// Throws when the TOF image positions are (nearly) collinear.
inline void check_spread(std::span<const TargetObservation> obs)
{
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& o : obs)
        mean += o.tof_pixel;
    mean /= static_cast<double>(obs.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& o : obs) {
        const Eigen::Vector2d d = o.tof_pixel - mean;
        cov += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(1);
    if (!(hi > 0.0) || lo <= 1e-10 * hi) {
        std::ostringstream msg;
        msg << "degenerate calibration geometry: observations are collinear in the TOF image "
            << "(scatter eigenvalues " << lo << ", " << hi << ")";
        throw RankDeficiencyError(msg.str());
    }
}

struct Problem {
    std::span<const TargetObservation> observations;
    const Eigen::Vector3d& translation;
    const TofIntrinsics& tof;
    const IrIntrinsics& ir;
    std::vector<double> weights; // per observation, applied to squared errors

    Eigen::VectorXd residuals(const Eigen::Matrix3d& r) const
    {
        Eigen::VectorXd out(2 * observations.size());
        for (std::size_t i = 0; i < observations.size(); ++i) {
            const double w = std::sqrt(weights[i]);
            out.segment<2>(2 * i) = w * projection_residual(observations[i], r, translation, tof, ir);
        }
        return out;
    }
};

struct SolveStats {
    int iterations = 0;
    ConvergenceReason reason = ConvergenceReason::max_iterations;
};

inline SolveStats levenberg_marquardt(const Problem& problem, Eigen::Matrix3d& rotation,
                                      const CalibrationOptions& opt, int iteration_budget)
{
    SolveStats stats;
    Eigen::VectorXd r = problem.residuals(rotation);
    double cost = r.squaredNorm();
    if (cost <= opt.zero_cost) {
        stats.reason = ConvergenceReason::zero_residual;
        return stats;
    }

    const auto n = r.size();
    double lambda = 1e-3;
    const double h = opt.jacobian_step;
    Eigen::MatrixXd jac(n, 3);

    while (stats.iterations < iteration_budget) {
        ++stats.iterations;
        for (int k = 0; k < 3; ++k) {
            Eigen::Vector3d e = Eigen::Vector3d::Zero();
            e(k) = h;
            const Eigen::VectorXd plus = problem.residuals(rotation_from_axis_angle(e) * rotation);
            const Eigen::VectorXd minus = problem.residuals(rotation_from_axis_angle(-e) * rotation);
            jac.col(k) = (plus - minus) / (2.0 * h);
        }
        const Eigen::Matrix3d jtj = jac.transpose() * jac;
        const Eigen::Vector3d grad = jac.transpose() * r;

        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(jtj);
        const double ev_lo = es.eigenvalues()(0);
        const double ev_hi = es.eigenvalues()(2);
        if (!(ev_hi > 0.0) || ev_lo <= 1e-14 * ev_hi) {
            std::ostringstream msg;
            msg << "rank-deficient calibration problem: normal-matrix eigenvalues " << ev_lo << " .. " << ev_hi;
            throw RankDeficiencyError(msg.str());
        }

        bool accepted = false;
        Eigen::Vector3d step = Eigen::Vector3d::Zero();
        double new_cost = cost;
        Eigen::Matrix3d candidate;
        Eigen::VectorXd candidate_r;
        while (lambda < 1e16) {
            Eigen::Matrix3d damped = jtj;
            damped.diagonal() += lambda * jtj.diagonal();
            step = damped.ldlt().solve(-grad);
            candidate = orthonormalize(rotation_from_axis_angle(step) * rotation);
            candidate_r = problem.residuals(candidate);
            new_cost = candidate_r.squaredNorm();
            if (new_cost < cost) {
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            stats.reason = ConvergenceReason::cost_stalled;
            return stats;
        }

        const double relative_decrease = (cost - new_cost) / cost;
        rotation = candidate;
        r = std::move(candidate_r);
        cost = new_cost;
        lambda = std::max(lambda / 10.0, 1e-12);

        if (cost <= opt.zero_cost) {
            stats.reason = ConvergenceReason::zero_residual;
            return stats;
        }
        if (step.norm() < opt.step_tolerance) {
            stats.reason = ConvergenceReason::step_small;
            return stats;
        }
        if (relative_decrease < opt.cost_tolerance) {
            stats.reason = ConvergenceReason::cost_stalled;
            return stats;
        }
    }
    stats.reason = ConvergenceReason::max_iterations;
    return stats;
}

} // namespace detail

/// Rotation R minimizing the reprojection error of the observations under
/// p_ir = R p_tof + translation. Needs at least three observations that are
/// not collinear in the TOF image.
inline CalibrationResult estimate_rotation(std::span<const TargetObservation> observations,
                                           const Eigen::Vector3d& translation, const TofIntrinsics& tof_intr,
                                           const IrIntrinsics& ir_intr, const CalibrationOptions& options = {})
{
    tof_intr.validate();
    ir_intr.validate();
    if (observations.size() < 3)
        throw InsufficientDataError("calibration needs at least 3 observations, got " +
                                    std::to_string(observations.size()));
    detail::validate_observations(observations, tof_intr, ir_intr);
    detail::check_spread(observations);
    Extrinsics::check_rotation(orthonormalize(options.initial_rotation));

    detail::Problem problem{observations, translation, tof_intr, ir_intr,
                            std::vector<double>(observations.size(), 1.0)};
    CalibrationResult result;
    result.rotation = orthonormalize(options.initial_rotation);

    if (options.mode == CostMode::squared) {
        const auto stats = detail::levenberg_marquardt(problem, result.rotation, options, options.max_iterations);
        result.iterations = stats.iterations;
        result.reason = stats.reason;
    } else {
        // IRLS: sum |e_i| = sum w_i |e_i|^2 with w_i = 1 / |e_i| at the fixed point.
        int budget = options.max_iterations;
        result.reason = ConvergenceReason::max_iterations;
        for (int round = 0; round < options.robust_reweightings && budget > 0; ++round) {
            for (std::size_t i = 0; i < observations.size(); ++i) {
                const double e =
                    projection_error(observations[i], result.rotation, translation, tof_intr, ir_intr);
                problem.weights[i] = 1.0 / std::max(e, 1e-6);
            }
            const Eigen::Matrix3d before = result.rotation;
            const auto stats = detail::levenberg_marquardt(problem, result.rotation, options, budget);
            budget -= stats.iterations;
            result.iterations += stats.iterations;
            result.reason = stats.reason;
            if (stats.reason == ConvergenceReason::max_iterations)
                break;
            if (geodesic_distance(before, result.rotation) < options.step_tolerance) {
                if (stats.reason != ConvergenceReason::zero_residual)
                    result.reason = ConvergenceReason::step_small;
                break;
            }
        }
    }

    result.rotation = orthonormalize(result.rotation);
    result.converged = result.reason != ConvergenceReason::max_iterations;
    result.residuals.reserve(observations.size());
    for (const auto& o : observations) {
        const double e = projection_error(o, result.rotation, translation, tof_intr, ir_intr);
        result.residuals.push_back(e);
        result.total_error += e;
    }
    return result;
}

} // namespace tofir
