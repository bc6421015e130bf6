#pragma once

// Command-line front end: simulate | calibrate | fuse | segment.
//
// Exit codes: 0 success, 2 input or configuration error, 3 numerical or
// geometric failure. Settings come from (highest precedence first) command
// line flags, the --config JSON document, then built-in defaults.

#include <tofir/calibration.hpp>
#include <tofir/container.hpp>
#include <tofir/fusion.hpp>
#include <tofir/io.hpp>
#include <tofir/segmentation.hpp>
#include <tofir/simulator.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace tofir::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
    kSuccess = 0,
    kUnexpected = 1,
    kInputError = 2,
    kNumericalError = 3,
};

struct TargetSettings {
    std::size_t count = 20;
    double pixel_noise = 0.1; ///< IR pixels
    double min_distance = 1.5;
    double max_distance = 4.0;
};

struct Thresholds {
    double k = 3.0;
    double sigma_floor = kDefaultSigmaFloor;
    ExposureLimits exposure;
};

/// Every setting a command may need. Documents (scene, intrinsics, ...) are
/// held as JSON references: null, an inline object, or a path string.
struct RunConfig {
    fs::path base_dir = ".";
    fs::path output = ".";
    std::optional<std::uint64_t> seed;
    int threads = 1;
    bool quiet = false;

    json scene;
    json tof_intrinsics;
    json ir_intrinsics;
    json extrinsics;
    json noise;

    std::uint32_t frames = 1;
    std::uint32_t empty_frames = 0;
    double ir_blur_sigma = 0.0;
    TargetSettings targets;

    fs::path observations;
    fs::path raw;
    fs::path thermal;
    fs::path sequence;
    std::uint32_t frame = 0;
    std::uint32_t background_frames = 0; ///< 0 selects half of the sequence
    Thresholds thresholds;
    double median_step = 1e-3;
    bool robust = false;
    bool initial_from_extrinsics = false;
};

namespace detail {

inline fs::path resolve(const fs::path& base, const fs::path& p)
{
    if (p.empty() || p.is_absolute())
        return p;
    return base / p;
}

/// Loads a document reference: inline object, or path relative to base_dir.
inline std::optional<json> load_document(const json& ref, const fs::path& base, const std::string& what)
{
    if (ref.is_null())
        return std::nullopt;
    if (ref.is_string())
        return read_json_file(resolve(base, ref.get<std::string>()));
    if (ref.is_object())
        return ref;
    throw FormatError(what + ": expected an object or a file path");
}

inline void apply_config_file(RunConfig& cfg, const fs::path& path)
{
    const json j = read_json_file(path);
    if (!j.is_object())
        throw FormatError(path.string() + ": top level must be a JSON object");
    const std::string ctx = "config";
    cfg.base_dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();

    using tofir::detail::json_field_or;
    if (j.contains("output"))
        cfg.output = resolve(cfg.base_dir, json_field_or<std::string>(j, "output", ctx, ""));
    if (j.contains("seed"))
        cfg.seed = json_field_or<std::uint64_t>(j, "seed", ctx, 0);
    cfg.threads = json_field_or<int>(j, "threads", ctx, cfg.threads);
    cfg.quiet = json_field_or<bool>(j, "quiet", ctx, cfg.quiet);

    for (const char* key : {"scene", "tof_intrinsics", "ir_intrinsics", "extrinsics", "noise"}) {
        if (!j.contains(key))
            continue;
        json ref = j.at(key);
        if (ref.is_string())
            ref = resolve(cfg.base_dir, ref.get<std::string>()).string();
        if (std::string(key) == "scene")
            cfg.scene = ref;
        else if (std::string(key) == "tof_intrinsics")
            cfg.tof_intrinsics = ref;
        else if (std::string(key) == "ir_intrinsics")
            cfg.ir_intrinsics = ref;
        else if (std::string(key) == "extrinsics")
            cfg.extrinsics = ref;
        else
            cfg.noise = ref;
    }

    cfg.frames = json_field_or<std::uint32_t>(j, "frames", ctx, cfg.frames);
    cfg.empty_frames = json_field_or<std::uint32_t>(j, "empty_frames", ctx, cfg.empty_frames);
    cfg.ir_blur_sigma = json_field_or<double>(j, "ir_blur_sigma", ctx, cfg.ir_blur_sigma);
    if (j.contains("calibration_targets")) {
        const json& t = j["calibration_targets"];
        const std::string tctx = ctx + ".calibration_targets";
        cfg.targets.count = json_field_or<std::size_t>(t, "count", tctx, cfg.targets.count);
        cfg.targets.pixel_noise = json_field_or<double>(t, "pixel_noise", tctx, cfg.targets.pixel_noise);
        cfg.targets.min_distance = json_field_or<double>(t, "min_distance", tctx, cfg.targets.min_distance);
        cfg.targets.max_distance = json_field_or<double>(t, "max_distance", tctx, cfg.targets.max_distance);
    }

    for (auto [key, dest] : {std::pair{"observations", &cfg.observations}, std::pair{"raw", &cfg.raw},
                             std::pair{"thermal", &cfg.thermal}, std::pair{"sequence", &cfg.sequence}})
        if (j.contains(key))
            *dest = resolve(cfg.base_dir, json_field_or<std::string>(j, key, ctx, ""));

    cfg.frame = json_field_or<std::uint32_t>(j, "frame", ctx, cfg.frame);
    cfg.background_frames = json_field_or<std::uint32_t>(j, "background_frames", ctx, cfg.background_frames);
    cfg.median_step = json_field_or<double>(j, "median_step", ctx, cfg.median_step);
    cfg.robust = json_field_or<bool>(j, "robust", ctx, cfg.robust);
    cfg.initial_from_extrinsics = json_field_or<bool>(j, "initial_from_extrinsics", ctx, cfg.initial_from_extrinsics);
    if (j.contains("thresholds")) {
        const json& t = j["thresholds"];
        const std::string tctx = ctx + ".thresholds";
        auto& th = cfg.thresholds;
        th.k = json_field_or<double>(t, "k", tctx, th.k);
        th.sigma_floor = json_field_or<double>(t, "sigma_floor", tctx, th.sigma_floor);
        th.exposure.amplitude_min = json_field_or<double>(t, "a_min", tctx, th.exposure.amplitude_min);
        th.exposure.amplitude_max = json_field_or<double>(t, "a_max", tctx, th.exposure.amplitude_max);
        th.exposure.offset_max = json_field_or<double>(t, "b_max", tctx, th.exposure.offset_max);
    }
}

inline TofIntrinsics tof_intrinsics(const RunConfig& cfg)
{
    const auto doc = load_document(cfg.tof_intrinsics, cfg.base_dir, "tof_intrinsics");
    return doc ? tof_intrinsics_from_json(*doc) : default_tof_intrinsics();
}

inline IrIntrinsics ir_intrinsics(const RunConfig& cfg)
{
    const auto doc = load_document(cfg.ir_intrinsics, cfg.base_dir, "ir_intrinsics");
    return doc ? ir_intrinsics_from_json(*doc) : default_ir_intrinsics();
}

/// Rig used by `simulate` when no extrinsics are configured: 5 cm baseline
/// and a small rotation about a tilted axis.
inline Extrinsics default_extrinsics()
{
    const Eigen::Vector3d axis = Eigen::Vector3d(0.2, 1.0, 0.1).normalized();
    return Extrinsics(rotation_from_axis_angle(axis * (3.0 * std::numbers::pi / 180.0)),
                      Eigen::Vector3d(0.05, 0.0, 0.0));
}

inline Extrinsics extrinsics(const RunConfig& cfg, bool required)
{
    const auto doc = load_document(cfg.extrinsics, cfg.base_dir, "extrinsics");
    if (doc)
        return extrinsics_from_json(*doc);
    if (required)
        throw FormatError("extrinsics document required (use --extrinsics PATH)");
    return default_extrinsics();
}

inline NoiseConfig noise(const RunConfig& cfg)
{
    const auto doc = load_document(cfg.noise, cfg.base_dir, "noise");
    NoiseConfig n = doc ? noise_from_json(*doc) : NoiseConfig{};
    if (cfg.seed)
        n.seed = *cfg.seed;
    return n;
}

inline fs::path require_path(const fs::path& p, const char* what, const char* flag)
{
    if (p.empty())
        throw FormatError(std::string(what) + " not given (use " + flag + " PATH)");
    return p;
}

inline void ensure_output_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw FormatError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

inline std::string fixed(double v, int digits)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

} // namespace detail

// ---------------------------------------------------------------------------
// Commands

/// Renders a raw TOF sequence, matching IR frames, ground truth and (when
/// requested) a calibration observation table into the output directory.
inline int cmd_simulate(const RunConfig& cfg, std::ostream& out)
{
    const auto scene_doc = detail::load_document(cfg.scene, cfg.base_dir, "scene");
    const Scene scene = scene_doc ? scene_from_json(*scene_doc) : default_scene();
    const Scene background = scene.static_part();
    const TofIntrinsics tof = detail::tof_intrinsics(cfg);
    const IrIntrinsics ir = detail::ir_intrinsics(cfg);
    const Extrinsics ext = detail::extrinsics(cfg, false);
    const NoiseConfig noise = detail::noise(cfg);
    if (cfg.frames == 0)
        throw ArgumentError("frames must be at least 1");
    if (cfg.empty_frames > cfg.frames)
        throw ArgumentError("empty_frames cannot exceed frames");
    if (cfg.empty_frames > 0 && background.primitives.empty())
        throw ConfigError("scene has no static primitives to render in empty frames");

    detail::ensure_output_dir(cfg.output);
    FrameContainer raw_c(tof.width, tof.height, kRawChannels, cfg.frames);
    FrameContainer truth_c(tof.width, tof.height, kTruthChannels, cfg.frames);
    FrameContainer ir_c(ir.width, ir.height, {"T"}, cfg.frames);

    const Pose tof_pose;
    double first_mean = 0.0;
    for (std::uint32_t f = 0; f < cfg.frames; ++f) {
        const Scene& s = f < cfg.empty_frames ? background : scene;
        const RigRender r = render_rig(s, tof, ir, tof_pose, ext, noise, f, cfg.ir_blur_sigma, cfg.threads);
        store_raw(raw_c, f, r.tof.raw);
        store_truth(truth_c, f, r.tof.truth);
        ir_c.set_channel(f, "T", r.thermal);
        if (f == 0) {
            const RangeFrame range = demodulate(r.tof.raw, tof);
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& p : range)
                if (p.valid) {
                    sum += p.distance;
                    ++n;
                }
            first_mean = n ? sum / n : 0.0;
        }
    }

    raw_c.write_file(cfg.output / "tof_raw.tirf");
    truth_c.write_file(cfg.output / "tof_raw.tirf.truth");
    ir_c.write_file(cfg.output / "ir.tirf");
    write_text_file(cfg.output / "scene.json", to_json(scene).dump(2) + "\n");
    write_text_file(cfg.output / "noise.json", to_json(noise).dump(2) + "\n");
    write_text_file(cfg.output / "tof_intrinsics.json", to_json(tof).dump(2) + "\n");
    write_text_file(cfg.output / "ir_intrinsics.json", to_json(ir).dump(2) + "\n");
    write_text_file(cfg.output / "extrinsics.json", to_json(ext).dump(2) + "\n");

    std::size_t n_obs = 0;
    if (cfg.targets.count > 0) {
        const auto targets = sample_calibration_targets(cfg.targets.count, tof, ir, ext, cfg.targets.min_distance,
                                                        cfg.targets.max_distance, noise.seed);
        const auto set = make_calibration_set(targets, ext, tof, ir, cfg.targets.pixel_noise, noise.seed);
        n_obs = set.observations.size();
        write_text_file(cfg.output / "observations.txt", format_observations(set.observations));
    }

    if (!cfg.quiet) {
        out << "simulated " << cfg.frames << " frame(s) (" << cfg.empty_frames << " object-free), "
            << tof.width << "x" << tof.height << " TOF, " << ir.width << "x" << ir.height << " IR, seed "
            << noise.seed << "\n";
        out << "mean demodulated range (frame 0): " << detail::fixed(first_mean, 4) << " m\n";
        if (n_obs)
            out << "calibration observations: " << n_obs << "\n";
        out << "outputs written to " << cfg.output.string() << "\n";
    }
    return kSuccess;
}

inline std::string calibration_report(const CalibrationResult& r, std::span<const TargetObservation> obs,
                                      const Eigen::Matrix3d& initial)
{
    std::ostringstream os;
    os << std::setprecision(10);
    os << "observations: " << obs.size() << "\n";
    os << "iterations: " << r.iterations << "\n";
    os << "converged: " << (r.converged ? "yes" : "no") << "\n";
    os << "termination: " << to_string(r.reason) << "\n";
    os << "total error (px): " << r.total_error << "\n";
    os << "rms error (px): " << r.rms() << "\n";
    os << "rotation change from initial (deg): " << geodesic_distance(initial, r.rotation) * 180.0 / std::numbers::pi
       << "\n";
    os << "rotation (row-major):\n";
    for (int i = 0; i < 3; ++i)
        os << "  " << r.rotation(i, 0) << " " << r.rotation(i, 1) << " " << r.rotation(i, 2) << "\n";
    os << "residuals (px):\n";
    for (std::size_t i = 0; i < r.residuals.size(); ++i)
        os << "  " << i << " " << r.residuals[i] << "\n";
    return os.str();
}

/// Estimates the TOF-to-IR rotation from an observation table. The
/// translation comes from the extrinsics document; its rotation seeds the
/// solver only when initial_from_extrinsics is set.
inline int cmd_calibrate(const RunConfig& cfg, std::ostream& out)
{
    const auto path = detail::require_path(cfg.observations, "observation file", "--observations");
    const auto observations = read_observations(path);
    const TofIntrinsics tof = detail::tof_intrinsics(cfg);
    const IrIntrinsics ir = detail::ir_intrinsics(cfg);
    const Extrinsics prior = detail::extrinsics(cfg, true);

    CalibrationOptions opt;
    opt.mode = cfg.robust ? CostMode::robust : CostMode::squared;
    if (cfg.initial_from_extrinsics)
        opt.initial_rotation = prior.rotation();
    const CalibrationResult result = estimate_rotation(observations, prior.translation(), tof, ir, opt);

    detail::ensure_output_dir(cfg.output);
    const Extrinsics calibrated(result.rotation, prior.translation());
    write_text_file(cfg.output / "extrinsics_calibrated.json", to_json(calibrated).dump(2) + "\n");
    const std::string report = calibration_report(result, observations, opt.initial_rotation);
    write_text_file(cfg.output / "calibration_report.txt", report);
    if (!cfg.quiet)
        out << report;
    return result.converged ? kSuccess : kNumericalError;
}

/// Demodulates one raw frame, fuses it with the matching IR frame and
/// writes the thermogram as a container and as delimited text.
inline int cmd_fuse(const RunConfig& cfg, std::ostream& out)
{
    const auto raw_path = detail::require_path(cfg.raw, "raw TOF container", "--raw");
    const auto ir_path = detail::require_path(cfg.thermal, "thermal container", "--thermal");
    const TofIntrinsics tof = detail::tof_intrinsics(cfg);
    const IrIntrinsics ir = detail::ir_intrinsics(cfg);
    const Extrinsics ext = detail::extrinsics(cfg, true);

    const FrameContainer raw_c = FrameContainer::read_file(raw_path);
    const FrameContainer ir_c = FrameContainer::read_file(ir_path);
    const std::uint32_t ir_frame = ir_c.frame_count() == 1 ? 0 : cfg.frame;
    const RawTofFrame raw = load_raw(raw_c, cfg.frame);
    const ThermalFrame thermal = ir_c.channel(ir_frame, ir_c.has_channel("T") ? "T" : ir_c.channel_names().front());

    const RangeFrame range = demodulate(raw, tof, cfg.thresholds.exposure);
    const Thermogram thermogram = fuse(range, thermal, tof, ir, ext);

    detail::ensure_output_dir(cfg.output);
    thermogram_container(thermogram).write_file(cfg.output / "thermogram.tirf");
    write_text_file(cfg.output / "thermogram.csv", thermogram_text(thermogram));

    if (!cfg.quiet) {
        std::size_t counts[4] = {0, 0, 0, 0};
        for (const auto& e : thermogram)
            ++counts[static_cast<int>(e.status)];
        out << "entries: " << thermogram.size() << "\n";
        for (int s = 0; s < 4; ++s)
            out << to_string(static_cast<FusionStatus>(s)) << ": " << counts[s] << " ("
                << detail::fixed(100.0 * counts[s] / thermogram.size(), 2) << "%)\n";
    }
    return kSuccess;
}

/// Builds a background model from the leading frames of a raw sequence and
/// writes it together with a foreground mask for every frame.
inline int cmd_segment(const RunConfig& cfg, std::ostream& out)
{
    const auto seq_path = detail::require_path(cfg.sequence, "sequence container", "--sequence");
    const TofIntrinsics tof = detail::tof_intrinsics(cfg);
    const FrameContainer seq = FrameContainer::read_file(seq_path);
    const std::uint32_t n = seq.frame_count();
    if (n == 0)
        throw ArgumentError("sequence '" + seq_path.string() + "' contains no frames");
    const std::uint32_t n_bg = cfg.background_frames ? cfg.background_frames : std::max<std::uint32_t>(n / 2, 1);
    if (n_bg < 2 || n_bg > n)
        throw ArgumentError("background needs between 2 and " + std::to_string(n) + " frames, got " +
                            std::to_string(n_bg));

    const auto frame_at = [&](std::uint32_t f) {
        return flag_invalid(demodulate(load_raw(seq, f), tof), cfg.thresholds.exposure);
    };

    BackgroundAccumulator acc(cfg.median_step);
    for (std::uint32_t f = 0; f < n_bg; ++f)
        acc.add(frame_at(f));
    BackgroundModel model = acc.finish();

    detail::ensure_output_dir(cfg.output);
    FrameContainer masks(seq.width(), seq.height(), kMaskChannels, n);
    std::ostringstream summary;
    summary << "background frames: " << n_bg << "\n";
    for (std::uint32_t f = 0; f < n; ++f) {
        const RangeFrame frame = frame_at(f);
        const ForegroundMask mask = foreground_mask(frame, model, cfg.thresholds.k, cfg.thresholds.sigma_floor);
        store_mask(masks, f, mask);
        if (f >= n_bg) {
            char name[32];
            std::snprintf(name, sizeof name, "mask_%04u.pbm", f);
            write_text_file(cfg.output / name, mask_pbm(mask));
            model = update_median(std::move(model), frame, cfg.median_step);
        }
        summary << "frame " << f << ": " << mask.count() << " foreground pixels\n";
    }
    background_container(model).write_file(cfg.output / "background.tirf");
    masks.write_file(cfg.output / "masks.tirf");
    if (!cfg.quiet)
        out << summary.str();
    return kSuccess;
}

// ---------------------------------------------------------------------------
// Entry point

/// Parses arguments and runs one subcommand; never throws.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"TOF + thermal IR fusion toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string output;
    bool quiet = false;
    std::optional<int> threads;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--seed", seed, "random seed (overrides the noise document)");
        sub->add_option("--output", output, "output directory");
        sub->add_flag("--quiet", quiet, "suppress the summary");
        sub->add_option("--threads", threads, "worker threads for per-pixel loops")->check(CLI::PositiveNumber);
    };

    // Flag values; applied on top of the config file.
    std::string scene, tof_intr, ir_intr, ext, noise_path, observations, raw, thermal, sequence;
    std::optional<std::uint32_t> frames, empty_frames, frame, background_frames;
    std::optional<double> k, sigma_floor, median_step;
    bool robust = false;
    bool initial_from_extrinsics = false;

    auto* sim = app.add_subcommand("simulate", "render synthetic TOF/IR data with ground truth");
    add_common(sim);
    sim->add_option("--scene", scene, "scene JSON");
    sim->add_option("--noise", noise_path, "noise JSON");
    sim->add_option("--frames", frames, "number of frames");
    sim->add_option("--empty-frames", empty_frames, "leading frames rendered without dynamic primitives");

    auto* cal = app.add_subcommand("calibrate", "estimate the TOF-to-IR rotation");
    add_common(cal);
    cal->add_option("--observations", observations, "observation table (u v D r_m s_m)");
    cal->add_flag("--robust", robust, "minimize the unsquared error sum");
    cal->add_flag("--initial-from-extrinsics", initial_from_extrinsics,
                  "start from the rotation in the extrinsics document instead of identity");

    auto* fus = app.add_subcommand("fuse", "build a 3D thermogram");
    add_common(fus);
    fus->add_option("--raw", raw, "raw TOF container");
    fus->add_option("--thermal", thermal, "IR temperature container");
    fus->add_option("--frame", frame, "frame index");

    auto* seg = app.add_subcommand("segment", "background model and foreground masks");
    add_common(seg);
    seg->add_option("--sequence", sequence, "raw TOF sequence container");
    seg->add_option("--background-frames", background_frames, "leading frames used for the background");
    seg->add_option("--k", k, "sigma multiplier");
    seg->add_option("--sigma-floor", sigma_floor, "lower bound on sigma (m)");
    seg->add_option("--median-step", median_step, "approximate-median step (m)");

    for (auto* sub : {cal, fus, seg}) {
        sub->add_option("--tof-intrinsics", tof_intr, "TOF intrinsics JSON");
        if (sub != seg) {
            sub->add_option("--ir-intrinsics", ir_intr, "IR intrinsics JSON");
            sub->add_option("--extrinsics", ext, "extrinsics JSON");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kSuccess;
        }
        err << "error: " << e.what() << "\n";
        return kInputError;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty())
            detail::apply_config_file(cfg, config_path);
        if (seed)
            cfg.seed = seed;
        if (!output.empty())
            cfg.output = output;
        if (quiet)
            cfg.quiet = true;
        if (threads)
            cfg.threads = *threads;
        if (!scene.empty())
            cfg.scene = scene;
        if (!noise_path.empty())
            cfg.noise = noise_path;
        if (!tof_intr.empty())
            cfg.tof_intrinsics = tof_intr;
        if (!ir_intr.empty())
            cfg.ir_intrinsics = ir_intr;
        if (!ext.empty())
            cfg.extrinsics = ext;
        if (!observations.empty())
            cfg.observations = observations;
        if (!raw.empty())
            cfg.raw = raw;
        if (!thermal.empty())
            cfg.thermal = thermal;
        if (!sequence.empty())
            cfg.sequence = sequence;
        if (frames)
            cfg.frames = *frames;
        if (empty_frames)
            cfg.empty_frames = *empty_frames;
        if (frame)
            cfg.frame = *frame;
        if (background_frames)
            cfg.background_frames = *background_frames;
        if (k)
            cfg.thresholds.k = *k;
        if (sigma_floor)
            cfg.thresholds.sigma_floor = *sigma_floor;
        if (median_step)
            cfg.median_step = *median_step;
        if (robust)
            cfg.robust = true;
        if (initial_from_extrinsics)
            cfg.initial_from_extrinsics = true;

        // Flag paths are relative to the working directory, not the config file.
        const auto absolute = [](json& ref) {
            if (ref.is_string())
                ref = fs::absolute(ref.get<std::string>()).string();
        };
        for (json* ref : {&cfg.scene, &cfg.noise, &cfg.tof_intrinsics, &cfg.ir_intrinsics, &cfg.extrinsics})
            absolute(*ref);

        if (sim->parsed())
            return cmd_simulate(cfg, out);
        if (cal->parsed())
            return cmd_calibrate(cfg, out);
        if (fus->parsed())
            return cmd_fuse(cfg, out);
        return cmd_segment(cfg, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::exception& e) {
        err << "unexpected error: " << e.what() << "\n";
        return kUnexpected;
    }
}

} // namespace tofir::cli
