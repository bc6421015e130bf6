#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace tofir {

/// Speed of light used for all phase/distance conversions, in m/s.
inline constexpr double kSpeedOfLight = 299'792'458.0;

// Error taxonomy. The CLI maps InputError subclasses to exit code 2 and
// NumericalError subclasses to exit code 3.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

/// Frames or intrinsics whose dimensions do not agree.
class StructuralError : public InputError {
public:
    using InputError::InputError;
};

/// A scalar argument outside its documented domain.
class ArgumentError : public InputError {
public:
    using InputError::InputError;
};

/// Model parameters that violate their invariants (intrinsics, extrinsics, scene).
class ConfigError : public InputError {
public:
    using InputError::InputError;
};

/// Malformed file contents (container, JSON document, observation table).
class FormatError : public InputError {
public:
    using InputError::InputError;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class RankDeficiencyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Row-major 2D image with value semantics. Index (x, y) is (column, row).
template <typename T>
class Grid {
public:
    Grid() = default;

    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height)
    {
        if (width <= 0 || height <= 0)
            throw StructuralError("grid dimensions must be positive, got " + std::to_string(width) + "x" +
                                  std::to_string(height));
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    std::size_t index(int x, int y) const noexcept
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::vector<T>& data() noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    template <typename U>
    bool same_shape(const Grid<U>& other) const noexcept
    {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

inline void require_dimensions(int width, int height, int expected_width, int expected_height, const char* what)
{
    if (width != expected_width || height != expected_height)
        throw StructuralError(std::string(what) + ": dimensions " + std::to_string(width) + "x" +
                              std::to_string(height) + " do not match expected " + std::to_string(expected_width) +
                              "x" + std::to_string(expected_height));
}

/// Runs body(row) for every row in [0, rows), split over up to `threads` workers.
/// Rows are independent, so the result does not depend on the thread count.
template <typename Body>
void parallel_rows(int rows, int threads, Body&& body)
{
    const int workers = std::clamp(threads, 1, std::max(rows, 1));
    if (workers == 1) {
        for (int y = 0; y < rows; ++y)
            body(y);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int y = w; y < rows; y += workers)
                body(y);
        });
    }
    for (auto& t : pool)
        t.join();
}

} // namespace tofir
