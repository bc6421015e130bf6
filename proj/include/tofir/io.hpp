#pragma once

// JSON documents (intrinsics, extrinsics, scene, noise), the observation
// table, and conversions between in-memory frames and TIRF containers.

#include <tofir/calibration.hpp>
#include <tofir/container.hpp>
#include <tofir/fusion.hpp>
#include <tofir/segmentation.hpp>
#include <tofir/simulator.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace tofir {

using json = nlohmann::json;

namespace detail {

template <typename T>
T json_field(const json& j, const std::string& key, const std::string& context)
{
    if (!j.is_object())
        throw FormatError(context + ": expected a JSON object");
    const auto it = j.find(key);
    if (it == j.end())
        throw FormatError(context + "." + key + ": missing field");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw FormatError(context + "." + key + ": wrong type (got " + std::string(it->type_name()) + ")");
    }
}

template <typename T>
T json_field_or(const json& j, const std::string& key, const std::string& context, T fallback)
{
    if (!j.is_object())
        throw FormatError(context + ": expected a JSON object");
    if (!j.contains(key))
        return fallback;
    return json_field<T>(j, key, context);
}

inline Eigen::Vector3d json_vec3(const json& j, const std::string& key, const std::string& context)
{
    const auto v = json_field<std::vector<double>>(j, key, context);
    if (v.size() != 3)
        throw FormatError(context + "." + key + ": expected 3 numbers, got " + std::to_string(v.size()));
    return {v[0], v[1], v[2]};
}

/// Rethrows model validation failures with the document context attached.
template <typename Fn>
void validate_in(const std::string& context, Fn&& fn)
{
    try {
        fn();
    } catch (const ConfigError& e) {
        throw FormatError(context + ": " + e.what());
    }
}

} // namespace detail

/// Parses a JSON file; syntax errors report the path plus line and column.
inline json read_json_file(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw FormatError("cannot open '" + path.string() + "'");
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw FormatError("cannot open '" + path.string() + "' for writing");
    os << text;
    if (!os)
        throw FormatError("failed to write '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Intrinsics and extrinsics

inline json to_json(const TofIntrinsics& i)
{
    return json{{"f", i.focal_length}, {"width", i.width}, {"height", i.height}, {"pixel_pitch", i.pixel_pitch},
                {"cx", i.cx},          {"cy", i.cy},       {"k1", i.k1},         {"k2", i.k2},
                {"f_mod", i.modulation_frequency}};
}

inline TofIntrinsics tof_intrinsics_from_json(const json& j, const std::string& ctx = "tof_intrinsics")
{
    TofIntrinsics i;
    i.focal_length = detail::json_field<double>(j, "f", ctx);
    i.width = detail::json_field<int>(j, "width", ctx);
    i.height = detail::json_field<int>(j, "height", ctx);
    i.pixel_pitch = detail::json_field<double>(j, "pixel_pitch", ctx);
    i.cx = detail::json_field_or<double>(j, "cx", ctx, i.width / 2.0);
    i.cy = detail::json_field_or<double>(j, "cy", ctx, i.height / 2.0);
    i.k1 = detail::json_field_or<double>(j, "k1", ctx, 0.0);
    i.k2 = detail::json_field_or<double>(j, "k2", ctx, 0.0);
    i.modulation_frequency = detail::json_field<double>(j, "f_mod", ctx);
    detail::validate_in(ctx, [&] { i.validate(); });
    return i;
}

inline json to_json(const IrIntrinsics& i)
{
    return json{{"f", i.focal_length}, {"width", i.width}, {"height", i.height}, {"pixel_pitch", i.pixel_pitch},
                {"cx", i.cx},          {"cy", i.cy}};
}

inline IrIntrinsics ir_intrinsics_from_json(const json& j, const std::string& ctx = "ir_intrinsics")
{
    IrIntrinsics i;
    i.focal_length = detail::json_field<double>(j, "f", ctx);
    i.width = detail::json_field<int>(j, "width", ctx);
    i.height = detail::json_field<int>(j, "height", ctx);
    i.pixel_pitch = detail::json_field<double>(j, "pixel_pitch", ctx);
    i.cx = detail::json_field_or<double>(j, "cx", ctx, i.width / 2.0);
    i.cy = detail::json_field_or<double>(j, "cy", ctx, i.height / 2.0);
    i.k1 = detail::json_field_or<double>(j, "k1", ctx, 0.0);
    i.k2 = detail::json_field_or<double>(j, "k2", ctx, 0.0);
    detail::validate_in(ctx, [&] { i.validate(); });
    return i;
}

/// Rotation as a row-major 9-element array, translation as a 3-element array.
inline json to_json(const Extrinsics& e)
{
    json rot = json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            rot.push_back(e.rotation()(r, c));
    return json{{"rotation", rot},
                {"translation", {e.translation().x(), e.translation().y(), e.translation().z()}}};
}

inline Extrinsics extrinsics_from_json(const json& j, const std::string& ctx = "extrinsics")
{
    const auto rot = detail::json_field<std::vector<double>>(j, "rotation", ctx);
    if (rot.size() != 9)
        throw FormatError(ctx + ".rotation: expected 9 numbers, got " + std::to_string(rot.size()));
    Eigen::Matrix3d r;
    for (int i = 0; i < 9; ++i)
        r(i / 3, i % 3) = rot[static_cast<std::size_t>(i)];
    const Eigen::Vector3d t = detail::json_vec3(j, "translation", ctx);
    Extrinsics e;
    detail::validate_in(ctx, [&] { e = Extrinsics(r, t); });
    return e;
}

// ---------------------------------------------------------------------------
// Scene and noise

inline json to_json(const Scene& s)
{
    json prims = json::array();
    for (const auto& p : s.primitives) {
        json jp;
        if (const auto* pl = std::get_if<Plane>(&p.shape)) {
            jp["type"] = "plane";
            jp["axis"] = std::string(1, "xyz"[static_cast<int>(pl->axis)]);
            jp["offset"] = pl->offset;
        } else {
            const auto& sp = std::get<Sphere>(p.shape);
            jp["type"] = "sphere";
            jp["center"] = {sp.center.x(), sp.center.y(), sp.center.z()};
            jp["radius"] = sp.radius;
        }
        jp["reflectivity"] = p.reflectivity;
        jp["temperature"] = p.temperature;
        jp["dynamic"] = p.dynamic;
        if (!p.name.empty())
            jp["name"] = p.name;
        prims.push_back(std::move(jp));
    }
    return json{{"ambient_temperature", s.ambient_temperature},
                {"far_distance", s.far_distance},
                {"far_reflectivity", s.far_reflectivity},
                {"primitives", prims}};
}

inline Scene scene_from_json(const json& j, const std::string& ctx = "scene")
{
    Scene s;
    s.ambient_temperature = detail::json_field_or<double>(j, "ambient_temperature", ctx, s.ambient_temperature);
    s.far_distance = detail::json_field_or<double>(j, "far_distance", ctx, s.far_distance);
    s.far_reflectivity = detail::json_field_or<double>(j, "far_reflectivity", ctx, s.far_reflectivity);
    const auto prims = detail::json_field<json>(j, "primitives", ctx);
    if (!prims.is_array())
        throw FormatError(ctx + ".primitives: expected an array");
    for (std::size_t i = 0; i < prims.size(); ++i) {
        const json& jp = prims[i];
        const std::string pctx = ctx + ".primitives[" + std::to_string(i) + "]";
        Primitive p;
        const auto type = detail::json_field<std::string>(jp, "type", pctx);
        if (type == "plane") {
            const auto axis = detail::json_field<std::string>(jp, "axis", pctx);
            if (axis != "x" && axis != "y" && axis != "z")
                throw FormatError(pctx + ".axis: expected one of x, y, z");
            p.shape = Plane{static_cast<Axis>(axis[0] - 'x'), detail::json_field<double>(jp, "offset", pctx)};
        } else if (type == "sphere") {
            p.shape = Sphere{detail::json_vec3(jp, "center", pctx), detail::json_field<double>(jp, "radius", pctx)};
        } else {
            throw FormatError(pctx + ".type: unknown primitive type '" + type + "'");
        }
        p.reflectivity = detail::json_field_or<double>(jp, "reflectivity", pctx, p.reflectivity);
        p.temperature = detail::json_field_or<double>(jp, "temperature", pctx, p.temperature);
        p.dynamic = detail::json_field_or<bool>(jp, "dynamic", pctx, false);
        p.name = detail::json_field_or<std::string>(jp, "name", pctx, "");
        s.primitives.push_back(std::move(p));
    }
    detail::validate_in(ctx, [&] { s.validate(); });
    return s;
}

inline json to_json(const NoiseConfig& n)
{
    return json{{"seed", n.seed},
                {"amplitude_reference", n.amplitude_reference},
                {"offset_reference", n.offset_reference},
                {"phase_noise_scale", n.phase_noise_scale},
                {"bucket_sigma", n.bucket_sigma},
                {"saturation_fraction", n.saturation_fraction},
                {"saturation_level", n.saturation_level},
                {"multipath",
                 {{"enabled", n.multipath.enabled},
                  {"extra_distance", n.multipath.extra_distance},
                  {"relative_amplitude", n.multipath.relative_amplitude}}},
                {"scattering",
                 {{"enabled", n.scattering.enabled},
                  {"radius", n.scattering.radius},
                  {"energy_fraction", n.scattering.energy_fraction}}}};
}

/// Every field is optional and falls back to the NoiseConfig default.
inline NoiseConfig noise_from_json(const json& j, const std::string& ctx = "noise")
{
    NoiseConfig n;
    n.seed = detail::json_field_or<std::uint64_t>(j, "seed", ctx, n.seed);
    n.amplitude_reference = detail::json_field_or<double>(j, "amplitude_reference", ctx, n.amplitude_reference);
    n.offset_reference = detail::json_field_or<double>(j, "offset_reference", ctx, n.offset_reference);
    n.phase_noise_scale = detail::json_field_or<double>(j, "phase_noise_scale", ctx, n.phase_noise_scale);
    n.bucket_sigma = detail::json_field_or<double>(j, "bucket_sigma", ctx, n.bucket_sigma);
    n.saturation_fraction = detail::json_field_or<double>(j, "saturation_fraction", ctx, n.saturation_fraction);
    n.saturation_level = detail::json_field_or<double>(j, "saturation_level", ctx, n.saturation_level);
    if (j.contains("multipath")) {
        const json& m = j["multipath"];
        const std::string mctx = ctx + ".multipath";
        n.multipath.enabled = detail::json_field_or<bool>(m, "enabled", mctx, n.multipath.enabled);
        n.multipath.extra_distance =
            detail::json_field_or<double>(m, "extra_distance", mctx, n.multipath.extra_distance);
        n.multipath.relative_amplitude =
            detail::json_field_or<double>(m, "relative_amplitude", mctx, n.multipath.relative_amplitude);
    }
    if (j.contains("scattering")) {
        const json& s = j["scattering"];
        const std::string sctx = ctx + ".scattering";
        n.scattering.enabled = detail::json_field_or<bool>(s, "enabled", sctx, n.scattering.enabled);
        n.scattering.radius = detail::json_field_or<int>(s, "radius", sctx, n.scattering.radius);
        n.scattering.energy_fraction =
            detail::json_field_or<double>(s, "energy_fraction", sctx, n.scattering.energy_fraction);
    }
    detail::validate_in(ctx, [&] { n.validate(); });
    return n;
}

// ---------------------------------------------------------------------------
// Observation table: one "u, v, D, r_m, s_m" row per line, comma or
// whitespace separated, '#' starts a comment.

inline std::vector<TargetObservation> parse_observations(std::istream& is, const std::string& source = "observations")
{
    std::vector<TargetObservation> out;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::vector<double> values;
        std::string token;
        while (ls >> token) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(token, &used));
                if (used != token.size())
                    throw std::invalid_argument(token);
            } catch (const std::exception&) {
                throw FormatError(source + ":" + std::to_string(line_no) + ": not a number: '" + token + "'");
            }
        }
        if (values.empty())
            continue;
        if (values.size() != 5)
            throw FormatError(source + ":" + std::to_string(line_no) + ": expected 5 values (u v D r_m s_m), got " +
                              std::to_string(values.size()));
        out.push_back({{values[0], values[1]}, values[2], {values[3], values[4]}});
    }
    return out;
}

inline std::vector<TargetObservation> read_observations(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw FormatError("cannot open '" + path.string() + "'");
    return parse_observations(is, path.string());
}

inline std::string format_observations(std::span<const TargetObservation> obs)
{
    std::ostringstream os;
    os << "# u,v,D,r_m,s_m\n" << std::setprecision(17);
    for (const auto& o : obs)
        os << o.tof_pixel.x() << ',' << o.tof_pixel.y() << ',' << o.distance << ',' << o.ir_pixel.x() << ','
           << o.ir_pixel.y() << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Frames <-> containers

inline const std::vector<std::string> kRawChannels = {"A1", "A2", "A3", "A4"};

inline void store_raw(FrameContainer& c, std::uint32_t frame, const RawTofFrame& raw)
{
    require_dimensions(raw.width(), raw.height(), static_cast<int>(c.width()), static_cast<int>(c.height()),
                       "raw frame");
    const std::size_t ch[4] = {c.channel_index("A1"), c.channel_index("A2"), c.channel_index("A3"),
                               c.channel_index("A4")};
    for (int y = 0; y < raw.height(); ++y)
        for (int x = 0; x < raw.width(); ++x) {
            const Buckets& b = raw(x, y);
            c.at(frame, x, y, ch[0]) = static_cast<float>(b.a1);
            c.at(frame, x, y, ch[1]) = static_cast<float>(b.a2);
            c.at(frame, x, y, ch[2]) = static_cast<float>(b.a3);
            c.at(frame, x, y, ch[3]) = static_cast<float>(b.a4);
        }
}

inline RawTofFrame load_raw(const FrameContainer& c, std::uint32_t frame)
{
    if (frame >= c.frame_count())
        throw FormatError("raw container has " + std::to_string(c.frame_count()) + " frames, requested frame " +
                          std::to_string(frame));
    const std::size_t ch[4] = {c.channel_index("A1"), c.channel_index("A2"), c.channel_index("A3"),
                               c.channel_index("A4")};
    RawTofFrame raw(static_cast<int>(c.width()), static_cast<int>(c.height()));
    for (int y = 0; y < raw.height(); ++y)
        for (int x = 0; x < raw.width(); ++x)
            raw(x, y) = {c.at(frame, x, y, ch[0]), c.at(frame, x, y, ch[1]), c.at(frame, x, y, ch[2]),
                         c.at(frame, x, y, ch[3])};
    return raw;
}

inline const std::vector<std::string> kTruthChannels = {"range", "temperature", "outlier", "primitive", "range_sigma"};

inline void store_truth(FrameContainer& c, std::uint32_t frame, const GroundTruth& t)
{
    c.set_channel(frame, "range", t.range);
    c.set_channel(frame, "temperature", t.temperature);
    c.set_channel(frame, "outlier", t.outlier);
    c.set_channel(frame, "primitive", t.primitive);
    c.set_channel(frame, "range_sigma", t.range_sigma);
}

inline const std::vector<std::string> kThermogramChannels = {"X", "Y", "Z", "T", "validity"};

/// Validity channel holds the FusionStatus code (0 = valid).
inline FrameContainer thermogram_container(const Thermogram& t)
{
    FrameContainer c(t.width(), t.height(), kThermogramChannels);
    for (int y = 0; y < t.height(); ++y)
        for (int x = 0; x < t.width(); ++x) {
            const auto& e = t(x, y);
            c.at(0, x, y, 0) = static_cast<float>(e.position.x());
            c.at(0, x, y, 1) = static_cast<float>(e.position.y());
            c.at(0, x, y, 2) = static_cast<float>(e.position.z());
            c.at(0, x, y, 3) = static_cast<float>(e.valid() ? e.temperature : 0.0);
            c.at(0, x, y, 4) = static_cast<float>(static_cast<int>(e.status));
        }
    return c;
}

/// Delimited text for plotting: one row per TOF pixel.
inline std::string thermogram_text(const Thermogram& t)
{
    std::ostringstream os;
    os << "col,row,X,Y,Z,T,status\n" << std::setprecision(9);
    for (int y = 0; y < t.height(); ++y)
        for (int x = 0; x < t.width(); ++x) {
            const auto& e = t(x, y);
            os << x << ',' << y << ',' << e.position.x() << ',' << e.position.y() << ',' << e.position.z() << ','
               << (e.valid() ? e.temperature : 0.0) << ',' << to_string(e.status) << '\n';
        }
    return os.str();
}

inline const std::vector<std::string> kBackgroundChannels = {"mean", "sigma", "median", "count"};

inline FrameContainer background_container(const BackgroundModel& m)
{
    FrameContainer c(m.width, m.height, kBackgroundChannels);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * m.width + x;
            c.at(0, x, y, 0) = static_cast<float>(m.mean[i]);
            c.at(0, x, y, 1) = static_cast<float>(m.stddev[i]);
            c.at(0, x, y, 2) = static_cast<float>(m.median[i]);
            c.at(0, x, y, 3) = static_cast<float>(m.count[i]);
        }
    return c;
}

inline const std::vector<std::string> kMaskChannels = {"foreground", "score", "valid"};

inline void store_mask(FrameContainer& c, std::uint32_t frame, const ForegroundMask& m)
{
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * m.width + x;
            c.at(frame, x, y, 0) = m.foreground[i];
            c.at(frame, x, y, 1) = static_cast<float>(m.score[i]);
            c.at(frame, x, y, 2) = m.valid[i];
        }
}

/// Plain (P1) portable bitmap of a foreground mask, 1 = foreground.
inline std::string mask_pbm(const ForegroundMask& m)
{
    std::ostringstream os;
    os << "P1\n" << m.width << ' ' << m.height << '\n';
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x)
            os << (x ? " " : "") << static_cast<int>(m.foreground[static_cast<std::size_t>(y) * m.width + x]);
        os << '\n';
    }
    return os.str();
}

} // namespace tofir
