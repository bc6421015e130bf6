#pragma once

// Per-pixel background statistics over range frames and moving-object
// segmentation against them.

#include <tofir/common.hpp>
#include <tofir/tof_model.hpp>

#include <cmath>
#include <span>
#include <vector>

namespace tofir {

inline constexpr double kDefaultSigmaFloor = 1e-3; // meters

struct BackgroundModel {
    int width = 0;
    int height = 0;
    std::vector<double> mean;   ///< meters
    std::vector<double> stddev; ///< sample (n - 1) standard deviation, meters
    std::vector<double> median; ///< approximate median, meters
    std::vector<std::uint32_t> count; ///< valid samples per pixel
    std::vector<std::uint8_t> valid;  ///< at least two valid samples
    std::uint32_t frames = 0;

    std::size_t size() const noexcept { return mean.size(); }
};

/// Streaming Welford accumulation of per-pixel mean and variance over valid
/// samples, plus the approximate-median track.
class BackgroundAccumulator {
public:
    explicit BackgroundAccumulator(double median_step = 1e-3)
        : median_step_(median_step)
    {
        if (!(median_step > 0.0))
            throw ArgumentError("median step must be positive");
    }

    void add(const RangeFrame& frame)
    {
        if (frames_ == 0) {
            width_ = frame.width();
            height_ = frame.height();
            const std::size_t n = frame.size();
            mean_.assign(n, 0.0);
            m2_.assign(n, 0.0);
            median_.assign(n, 0.0);
            count_.assign(n, 0);
        } else {
            require_dimensions(frame.width(), frame.height(), width_, height_, "background frame");
        }
        for (std::size_t i = 0; i < frame.size(); ++i) {
            const RangePixel& p = frame[i];
            if (!p.valid)
                continue;
            const double d = p.distance;
            const std::uint32_t n = ++count_[i];
            const double delta = d - mean_[i];
            mean_[i] += delta / n;
            m2_[i] += delta * (d - mean_[i]);
            if (n == 1)
                median_[i] = d;
            else
                median_[i] = step_toward(median_[i], d, median_step_);
        }
        ++frames_;
    }

    std::uint32_t frames() const noexcept { return frames_; }

    BackgroundModel finish() const
    {
        if (frames_ < 2)
            throw ArgumentError("background model needs at least 2 frames, got " + std::to_string(frames_));
        BackgroundModel m;
        m.width = width_;
        m.height = height_;
        m.frames = frames_;
        m.mean = mean_;
        m.median = median_;
        m.count = count_;
        m.stddev.assign(mean_.size(), 0.0);
        m.valid.assign(mean_.size(), 0);
        for (std::size_t i = 0; i < mean_.size(); ++i) {
            if (count_[i] >= 2) {
                m.stddev[i] = std::sqrt(std::max(m2_[i], 0.0) / (count_[i] - 1));
                m.valid[i] = 1;
            }
        }
        return m;
    }

    static double step_toward(double current, double sample, double step) noexcept
    {
        if (sample > current)
            return current + step;
        if (sample < current)
            return current - step;
        return current;
    }

private:
    double median_step_;
    int width_ = 0;
    int height_ = 0;
    std::uint32_t frames_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;
    std::vector<double> median_;
    std::vector<std::uint32_t> count_;
};

/// Background from a sequence of object-free frames. Invalid samples are
/// excluded; pixels with fewer than two valid samples are marked invalid.
inline BackgroundModel build_background(std::span<const RangeFrame> frames, double median_step = 1e-3)
{
    if (frames.empty())
        throw ArgumentError("build_background: no frames given");
    BackgroundAccumulator acc(median_step);
    for (const auto& f : frames)
        acc.add(f);
    return acc.finish();
}

/// Approximate-median update: each valid pixel moves one step toward the sample.
inline BackgroundModel update_median(BackgroundModel model, const RangeFrame& frame, double step)
{
    if (!(step > 0.0))
        throw ArgumentError("update_median: step must be positive");
    require_dimensions(frame.width(), frame.height(), model.width, model.height, "update_median");
    for (std::size_t i = 0; i < frame.size(); ++i)
        if (frame[i].valid)
            model.median[i] = BackgroundAccumulator::step_toward(model.median[i], frame[i].distance, step);
    return model;
}

struct ForegroundMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> foreground;
    std::vector<double> score;       ///< |D - mu| / max(sigma, floor); 0 where invalid
    std::vector<std::uint8_t> valid; ///< pixel valid in both frame and model

    std::size_t count() const noexcept
    {
        std::size_t n = 0;
        for (auto f : foreground)
            n += f;
        return n;
    }
};

inline ForegroundMask foreground_mask(const RangeFrame& frame, const BackgroundModel& model, double k,
                                      double sigma_floor = kDefaultSigmaFloor)
{
    if (!(k > 0.0))
        throw ArgumentError("foreground_mask: k must be positive");
    if (!(sigma_floor > 0.0))
        throw ArgumentError("foreground_mask: sigma floor must be positive");
    require_dimensions(frame.width(), frame.height(), model.width, model.height, "foreground_mask");
    ForegroundMask m;
    m.width = frame.width();
    m.height = frame.height();
    m.foreground.assign(frame.size(), 0);
    m.score.assign(frame.size(), 0.0);
    m.valid.assign(frame.size(), 0);
    for (std::size_t i = 0; i < frame.size(); ++i) {
        if (!frame[i].valid || !model.valid[i])
            continue;
        m.valid[i] = 1;
        m.score[i] = std::abs(frame[i].distance - model.mean[i]) / std::max(model.stddev[i], sigma_floor);
        m.foreground[i] = m.score[i] > k ? 1 : 0;
    }
    return m;
}

/// Marks under- and over-exposed pixels invalid.
inline RangeFrame flag_invalid(const RangeFrame& frame, const ExposureLimits& limits)
{
    return apply_exposure_limits(frame, limits);
}

} // namespace tofir
