#pragma once

// "TIRF" multi-channel frame container.
//
// Layout (all integers little-endian):
//   magic        4 bytes  "TIRF"
//   version      u16
//   width        u32
//   height       u32
//   channels     u32
//   frame_count  u32
//   names        channels x (u16 byte length, UTF-8 bytes)
//   payload      f32 little-endian, frame-major, then row-major pixels, with
//                the channels of a pixel stored contiguously
//
// Byte order is fixed regardless of host; values are assembled byte by byte.

#include <tofir/common.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace tofir {

inline constexpr char kContainerMagic[4] = {'T', 'I', 'R', 'F'};
inline constexpr std::uint16_t kContainerVersion = 1;

class FrameContainer {
public:
    FrameContainer() = default;

    FrameContainer(std::uint32_t width, std::uint32_t height, std::vector<std::string> channel_names,
                   std::uint32_t frame_count = 1)
        : width_(width), height_(height), frame_count_(frame_count), names_(std::move(channel_names))
    {
        if (width == 0 || height == 0)
            throw StructuralError("container dimensions must be positive");
        if (names_.empty())
            throw StructuralError("container needs at least one channel");
        std::set<std::string> unique(names_.begin(), names_.end());
        if (unique.size() != names_.size())
            throw StructuralError("container channel names must be unique");
        for (const auto& n : names_)
            if (n.size() > 0xFFFF)
                throw StructuralError("container channel name too long");
        data_.assign(value_count(), 0.0f);
    }

    std::uint32_t width() const noexcept { return width_; }
    std::uint32_t height() const noexcept { return height_; }
    std::uint32_t channels() const noexcept { return static_cast<std::uint32_t>(names_.size()); }
    std::uint32_t frame_count() const noexcept { return frame_count_; }
    const std::vector<std::string>& channel_names() const noexcept { return names_; }
    const std::vector<float>& data() const noexcept { return data_; }
    std::vector<float>& data() noexcept { return data_; }

    std::size_t channel_index(const std::string& name) const
    {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name)
                return i;
        throw FormatError("container has no channel named '" + name + "'");
    }

    bool has_channel(const std::string& name) const noexcept
    {
        for (const auto& n : names_)
            if (n == name)
                return true;
        return false;
    }

    float& at(std::uint32_t frame, std::uint32_t x, std::uint32_t y, std::size_t channel)
    {
        return data_[offset(frame, x, y, channel)];
    }
    float at(std::uint32_t frame, std::uint32_t x, std::uint32_t y, std::size_t channel) const
    {
        return data_[offset(frame, x, y, channel)];
    }

    /// Copies one channel of one frame into a grid.
    Grid<double> channel(std::uint32_t frame, const std::string& name) const
    {
        const std::size_t c = channel_index(name);
        if (frame >= frame_count_)
            throw FormatError("container frame " + std::to_string(frame) + " out of range (" +
                              std::to_string(frame_count_) + " frames)");
        Grid<double> g(static_cast<int>(width_), static_cast<int>(height_));
        for (std::uint32_t y = 0; y < height_; ++y)
            for (std::uint32_t x = 0; x < width_; ++x)
                g(static_cast<int>(x), static_cast<int>(y)) = at(frame, x, y, c);
        return g;
    }

    template <typename T>
    void set_channel(std::uint32_t frame, const std::string& name, const Grid<T>& values)
    {
        const std::size_t c = channel_index(name);
        require_dimensions(values.width(), values.height(), static_cast<int>(width_), static_cast<int>(height_),
                           "container channel");
        for (std::uint32_t y = 0; y < height_; ++y)
            for (std::uint32_t x = 0; x < width_; ++x)
                at(frame, x, y, c) = static_cast<float>(values(static_cast<int>(x), static_cast<int>(y)));
    }

    void write(std::ostream& os) const
    {
        os.write(kContainerMagic, 4);
        put_u16(os, kContainerVersion);
        put_u32(os, width_);
        put_u32(os, height_);
        put_u32(os, channels());
        put_u32(os, frame_count_);
        for (const auto& n : names_) {
            put_u16(os, static_cast<std::uint16_t>(n.size()));
            os.write(n.data(), static_cast<std::streamsize>(n.size()));
        }
        std::vector<char> payload(data_.size() * 4);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            const auto bits = std::bit_cast<std::uint32_t>(data_[i]);
            for (int b = 0; b < 4; ++b)
                payload[4 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
        }
        os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        if (!os)
            throw FormatError("failed to write frame container");
    }

    static FrameContainer read(std::istream& is)
    {
        char magic[4];
        if (!is.read(magic, 4) || std::memcmp(magic, kContainerMagic, 4) != 0)
            throw FormatError("not a TIRF container (bad magic)");
        const std::uint16_t version = get_u16(is);
        if (version != kContainerVersion)
            throw FormatError("unsupported TIRF version " + std::to_string(version));
        FrameContainer c;
        c.width_ = get_u32(is);
        c.height_ = get_u32(is);
        const std::uint32_t channels = get_u32(is);
        c.frame_count_ = get_u32(is);
        if (c.width_ == 0 || c.height_ == 0 || channels == 0)
            throw FormatError("TIRF container has zero dimensions or channels");
        std::set<std::string> seen;
        for (std::uint32_t i = 0; i < channels; ++i) {
            const std::uint16_t len = get_u16(is);
            std::string name(len, '\0');
            if (len > 0 && !is.read(name.data(), len))
                throw FormatError("truncated TIRF channel table");
            if (!seen.insert(name).second)
                throw FormatError("duplicate TIRF channel name '" + name + "'");
            c.names_.push_back(std::move(name));
        }
        const std::size_t count = c.value_count();
        std::vector<char> payload(count * 4);
        if (count > 0 && !is.read(payload.data(), static_cast<std::streamsize>(payload.size())))
            throw FormatError("truncated TIRF payload: expected " + std::to_string(payload.size()) + " bytes");
        if (is.peek() != std::char_traits<char>::eof())
            throw FormatError("trailing bytes after TIRF payload");
        c.data_.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            std::uint32_t bits = 0;
            for (int b = 0; b < 4; ++b)
                bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(payload[4 * i + b])) << (8 * b);
            c.data_[i] = std::bit_cast<float>(bits);
        }
        return c;
    }

    void write_file(const std::filesystem::path& path) const
    {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os)
            throw FormatError("cannot open '" + path.string() + "' for writing");
        write(os);
    }

    static FrameContainer read_file(const std::filesystem::path& path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw FormatError("cannot open '" + path.string() + "'");
        try {
            return read(is);
        } catch (const FormatError& e) {
            throw FormatError(path.string() + ": " + e.what());
        }
    }

    friend bool operator==(const FrameContainer&, const FrameContainer&) = default;

private:
    std::size_t value_count() const noexcept
    {
        return static_cast<std::size_t>(width_) * height_ * names_.size() * frame_count_;
    }

    std::size_t offset(std::uint32_t frame, std::uint32_t x, std::uint32_t y, std::size_t channel) const noexcept
    {
        return ((static_cast<std::size_t>(frame) * height_ + y) * width_ + x) * names_.size() + channel;
    }

    static void put_u16(std::ostream& os, std::uint16_t v)
    {
        const char b[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
        os.write(b, 2);
    }

    static void put_u32(std::ostream& os, std::uint32_t v)
    {
        const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                           static_cast<char>((v >> 16) & 0xFF), static_cast<char>(v >> 24)};
        os.write(b, 4);
    }

    static std::uint16_t get_u16(std::istream& is)
    {
        unsigned char b[2];
        if (!is.read(reinterpret_cast<char*>(b), 2))
            throw FormatError("truncated TIRF header");
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }

    static std::uint32_t get_u32(std::istream& is)
    {
        unsigned char b[4];
        if (!is.read(reinterpret_cast<char*>(b), 4))
            throw FormatError("truncated TIRF header");
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    std::uint32_t width_ = 0;
    std::uint32_t height_ = 0;
    std::uint32_t frame_count_ = 0;
    std::vector<std::string> names_;
    std::vector<float> data_;
};

} // namespace tofir
