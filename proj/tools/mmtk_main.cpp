// Copyright (c) 2026 the mmtk authors
// SPDX-License-Identifier: Apache-2.0
//
// Subcommand front-end wiring the library into file-in/file-out pipelines.
// Inputs and outputs use the formats documented in docs/formats.md.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmtk/diffusion_schedule.hpp"
#include "mmtk/formats_io.hpp"
#include "mmtk/man_norm.hpp"
#include "mmtk/metrics.hpp"
#include "mmtk/parallel.hpp"
#include "mmtk/pose_guidance.hpp"
#include "mmtk/scene_motion.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
    std::string out = ".";
    int threads = 1;
    std::uint64_t seed = 0;
    double depth_scale = 1.0;
    std::string canvas;
    double conf_threshold = 0.3;
};

std::pair<int, int> parse_canvas(const std::string& canvas) {
    int w = 0, h = 0;
    if (std::sscanf(canvas.c_str(), "%dx%d", &w, &h) != 2 || w < 1 || h < 1) {
        throw CLI::ValidationError("--canvas", "expected WxH with positive integers, got '" +
                                                   canvas + "'");
    }
    return {w, h};
}

fs::path ensure_out_dir(const GlobalOptions& global) {
    fs::path dir(global.out);
    fs::create_directories(dir);
    return dir;
}

std::string frame_name(const char* prefix, int index, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%05d.%s", prefix, index, ext);
    return buf;
}

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& extension) {
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("not a directory: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() &&
            (extension.empty() || entry.path().extension() == extension)) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open file for writing: " + path.string());
    }
    out << text;
    if (!out) {
        throw std::runtime_error("short write: " + path.string());
    }
}

// --- track-scene ---

struct TrackSceneOptions {
    std::string trajectory;
    std::string intrinsics;
    std::string depth;
    bool color = false;
    bool arrows = false;
    int arrow_stride = 16;
    double max_magnitude = 0.0;
};

int run_track_scene(const GlobalOptions& global, const TrackSceneOptions& opts) {
    const mmtk::CameraTrajectory traj = mmtk::read_trajectory(opts.trajectory, opts.intrinsics);
    const mmtk::DepthMap depth = mmtk::read_depth(opts.depth, global.depth_scale);
    if (traj.size() < 2) {
        throw std::runtime_error("track-scene: trajectory must have at least 2 frames");
    }
    const fs::path out_dir = ensure_out_dir(global);

    const std::size_t pair_count = traj.size() - 1;
    std::vector<mmtk::MotionField> fields(pair_count);
    mmtk::parallel_for(pair_count, global.threads, [&](std::size_t l) {
        fields[l] = mmtk::track_pair(depth, traj.frames[l].intrinsics,
                                     traj.frames[l + 1].intrinsics, traj.frames[l].pose,
                                     traj.frames[l + 1].pose);
        fields[l].frame_index = static_cast<int>(l);
    });

    std::string stats_csv = "frame,mean_px,max_px,valid_fraction\n";
    char row[128];
    for (std::size_t l = 0; l < pair_count; ++l) {
        mmtk::write_flo(fields[l], out_dir / frame_name("flow", static_cast<int>(l), "flo"));
        const mmtk::MotionStats stats = mmtk::motion_stats(fields[l]);
        std::snprintf(row, sizeof(row), "%zu,%.9g,%.9g,%.9g\n", l, stats.mean_magnitude,
                      stats.max_magnitude, stats.valid_fraction);
        stats_csv += row;
        if (opts.color) {
            mmtk::write_ppm(mmtk::flow_to_color(fields[l], opts.max_magnitude),
                            out_dir / frame_name("color", static_cast<int>(l), "ppm"));
        }
        if (opts.arrows) {
            mmtk::write_ppm(mmtk::flow_to_arrows(fields[l], opts.arrow_stride),
                            out_dir / frame_name("arrows", static_cast<int>(l), "ppm"));
        }
    }
    write_text(out_dir / "stats.csv", stats_csv);

    std::cout << "ok track-scene pairs=" << pair_count << " out=" << out_dir.string() << "\n";
    return 0;
}

// --- rasterize-pose ---

struct RasterizePoseOptions {
    std::string keypoints;
    bool no_face = false;
    bool no_hands = false;
};

int run_rasterize_pose(const GlobalOptions& global, const RasterizePoseOptions& opts) {
    if (global.canvas.empty()) {
        throw std::runtime_error("rasterize-pose: --canvas WxH is required");
    }
    const auto [width, height] = parse_canvas(global.canvas);

    std::ifstream in(opts.keypoints);
    if (!in) {
        throw std::runtime_error("cannot open file: " + opts.keypoints);
    }
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::vector<mmtk::KeypointSet> sets = mmtk::parse_keypoints(text);

    mmtk::RasterizeOptions rast;
    rast.draw_face = !opts.no_face;
    rast.draw_hands = !opts.no_hands;
    rast.conf_threshold = global.conf_threshold;

    const fs::path out_dir = ensure_out_dir(global);
    std::vector<mmtk::PoseImage> images(sets.size());
    mmtk::parallel_for(sets.size(), global.threads, [&](std::size_t i) {
        images[i] = mmtk::rasterize_pose(sets[i], height, width, rast);
    });
    for (std::size_t i = 0; i < images.size(); ++i) {
        mmtk::write_ppm(images[i].image, out_dir / frame_name("frame", static_cast<int>(i), "ppm"));
    }

    std::cout << "ok rasterize-pose frames=" << sets.size() << " out=" << out_dir.string() << "\n";
    return 0;
}

// --- pack-guidance ---

struct PackGuidanceOptions {
    std::string reference;
    std::string reference_pose;
    std::vector<std::string> driving;
    std::string driving_dir;
};

int run_pack_guidance(const GlobalOptions& global, const PackGuidanceOptions& opts) {
    const mmtk::Image8 ref = mmtk::read_ppm(opts.reference);
    mmtk::PoseImage ref_pose;
    ref_pose.image = mmtk::read_ppm(opts.reference_pose);

    std::vector<fs::path> driving_paths;
    for (const std::string& p : opts.driving) {
        driving_paths.emplace_back(p);
    }
    if (!opts.driving_dir.empty()) {
        for (fs::path& p : sorted_files(opts.driving_dir, ".ppm")) {
            driving_paths.push_back(std::move(p));
        }
    }
    std::vector<mmtk::PoseImage> driving(driving_paths.size());
    for (std::size_t i = 0; i < driving_paths.size(); ++i) {
        driving[i].image = mmtk::read_ppm(driving_paths[i]);
    }

    const mmtk::GuidancePack pack = mmtk::pack_guidance(ref, ref_pose, driving);
    const fs::path out_dir = ensure_out_dir(global);
    mmtk::write_tensor(mmtk::guidance_to_container(pack), out_dir / "guidance.mmtk");

    std::cout << "ok pack-guidance channels=" << pack.channels()
              << " driving=" << pack.driving_count << " out=" << out_dir.string() << "\n";
    return 0;
}

// --- plucker ---

struct PluckerOptions {
    std::string trajectory;
    std::string intrinsics;
};

int run_plucker(const GlobalOptions& global, const PluckerOptions& opts) {
    const mmtk::CameraTrajectory traj = mmtk::read_trajectory(opts.trajectory, opts.intrinsics);
    const fs::path out_dir = ensure_out_dir(global);

    std::vector<mmtk::PluckerField> fields(traj.size());
    mmtk::parallel_for(traj.size(), global.threads, [&](std::size_t i) {
        fields[i] = mmtk::plucker_embedding(traj.frames[i].pose, traj.frames[i].intrinsics);
    });

    mmtk::TensorContainer container;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        container.add_f64(frame_name("frame", static_cast<int>(i), "plucker"),
                          {static_cast<std::uint64_t>(fields[i].height),
                           static_cast<std::uint64_t>(fields[i].width), 6},
                          fields[i].data);
    }
    mmtk::write_tensor(container, out_dir / "plucker.mmtk");

    std::cout << "ok plucker frames=" << traj.size() << " out=" << out_dir.string() << "\n";
    return 0;
}

// --- man-apply ---

struct ManApplyOptions {
    std::string features;
    std::string motion;
    std::string weights;
    int hidden = 64;
    bool zero_heads = false;
    bool save_weights = false;
    double eps = 1e-5;
};

int run_man_apply(const GlobalOptions& global, const ManApplyOptions& opts) {
    const mmtk::TensorContainer feature_container = mmtk::read_tensor(opts.features);
    const mmtk::TensorEntry& entry = feature_container.at("features");
    if (entry.dims.size() != 3) {
        throw std::runtime_error("man-apply: entry 'features' must have dims C x H x W");
    }
    mmtk::FeatureTensor features(static_cast<int>(entry.dims[0]), static_cast<int>(entry.dims[1]),
                                 static_cast<int>(entry.dims[2]));
    features.data = entry.as_f32();

    const mmtk::MotionField motion = mmtk::read_flo(opts.motion);

    mmtk::ManSpecs specs;
    if (!opts.weights.empty()) {
        specs = mmtk::man_specs_from_container(mmtk::read_tensor(opts.weights));
    } else {
        specs = mmtk::make_man_specs(global.seed, opts.hidden, features.channels, opts.zero_heads);
    }

    const mmtk::ModulationParams params = mmtk::modulation_params(
        motion, specs, features.channels, features.height, features.width);
    const mmtk::FeatureTensor output =
        mmtk::man_apply(features, motion, specs, static_cast<float>(opts.eps));

    const std::vector<std::uint64_t> dims = {static_cast<std::uint64_t>(features.channels),
                                             static_cast<std::uint64_t>(features.height),
                                             static_cast<std::uint64_t>(features.width)};
    mmtk::TensorContainer out_container;
    out_container.add_f32("output", dims, output.data);
    out_container.add_f32("gamma", dims, params.gamma.data);
    out_container.add_f32("beta", dims, params.beta.data);

    const fs::path out_dir = ensure_out_dir(global);
    mmtk::write_tensor(out_container, out_dir / "man_out.mmtk");
    if (opts.save_weights) {
        mmtk::write_tensor(mmtk::man_specs_to_container(specs), out_dir / "weights.mmtk");
    }

    std::cout << "ok man-apply channels=" << features.channels << " height=" << features.height
              << " width=" << features.width << " out=" << out_dir.string() << "\n";
    return 0;
}

// --- metrics ---

struct MetricsOptions {
    std::string a;
    std::string b;
};

int run_metrics(const GlobalOptions& global, const MetricsOptions& opts) {
    std::vector<std::pair<std::string, std::pair<fs::path, fs::path>>> pairs;
    if (fs::is_directory(opts.a) || fs::is_directory(opts.b)) {
        const auto files_a = sorted_files(opts.a, "");
        const auto files_b = sorted_files(opts.b, "");
        if (files_a.size() != files_b.size()) {
            throw std::runtime_error("metrics: directories hold " + std::to_string(files_a.size()) +
                                     " vs " + std::to_string(files_b.size()) + " files");
        }
        for (std::size_t i = 0; i < files_a.size(); ++i) {
            pairs.push_back({files_a[i].filename().string(), {files_a[i], files_b[i]}});
        }
    } else {
        pairs.push_back({fs::path(opts.a).filename().string(), {opts.a, opts.b}});
    }

    struct Row {
        std::string name;
        double l1 = 0, psnr = 0, ssim = 0;
    };
    std::vector<Row> rows(pairs.size());
    mmtk::parallel_for(pairs.size(), global.threads, [&](std::size_t i) {
        const mmtk::ImagePair pair = mmtk::ImagePair::make(mmtk::read_ppm(pairs[i].second.first),
                                                           mmtk::read_ppm(pairs[i].second.second));
        rows[i] = Row{pairs[i].first, mmtk::l1(pair), mmtk::psnr(pair), mmtk::ssim(pair)};
    });

    std::string csv = "name,l1,psnr_db,ssim\n";
    char buf[256];
    for (const Row& row : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g\n", row.name.c_str(), row.l1, row.psnr,
                      row.ssim);
        csv += buf;
        std::cout << buf;
    }
    const fs::path out_dir = ensure_out_dir(global);
    write_text(out_dir / "metrics.csv", csv);

    std::cout << "ok metrics pairs=" << pairs.size() << " out=" << out_dir.string() << "\n";
    return 0;
}

// --- visualize ---

struct VisualizeOptions {
    std::string flow;
    std::string mode = "color";
    std::string underlay;
    int stride = 16;
    double max_magnitude = 0.0;
};

int run_visualize(const GlobalOptions& global, const VisualizeOptions& opts) {
    const mmtk::MotionField field = mmtk::read_flo(opts.flow);
    const fs::path out_dir = ensure_out_dir(global);

    fs::path out_path;
    if (opts.mode == "color") {
        out_path = out_dir / "flow_color.ppm";
        mmtk::write_ppm(mmtk::flow_to_color(field, opts.max_magnitude), out_path);
    } else if (opts.mode == "arrows") {
        mmtk::Image8 underlay;
        const bool have_underlay = !opts.underlay.empty();
        if (have_underlay) {
            underlay = mmtk::read_ppm(opts.underlay);
        }
        out_path = out_dir / "flow_arrows.ppm";
        mmtk::write_ppm(
            mmtk::flow_to_arrows(field, opts.stride, have_underlay ? &underlay : nullptr),
            out_path);
    } else {
        throw std::runtime_error("visualize: mode must be 'color' or 'arrows'");
    }

    std::cout << "ok visualize mode=" << opts.mode << " out=" << out_path.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mmtk: character-scene mixed motion guidance toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Config file; command-line flags take precedence");

    GlobalOptions global;
    app.add_option("--out", global.out, "Output directory")->capture_default_str();
    app.add_option("--threads", global.threads, "Worker pool size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", global.seed, "Seed for generated weights")->capture_default_str();
    app.add_option("--depth-scale", global.depth_scale, "Depth units per raw depth value")
        ->capture_default_str();
    app.add_option("--canvas", global.canvas, "Canvas size WxH, e.g. 768x768");
    app.add_option("--conf-threshold", global.conf_threshold,
                   "Keypoint confidence threshold")
        ->capture_default_str();

    TrackSceneOptions track_opts;
    CLI::App* track = app.add_subcommand(
        "track-scene", "Scene motion fields from a camera trajectory and a depth map");
    track->fallthrough();
    track->add_option("--trajectory", track_opts.trajectory, "TUM trajectory file")->required();
    track->add_option("--intrinsics", track_opts.intrinsics, "Intrinsics sidecar file")->required();
    track->add_option("--depth", track_opts.depth, "Depth map (16-bit PGM or PFM)")->required();
    track->add_flag("--color", track_opts.color, "Also write dense color renderings");
    track->add_flag("--arrows", track_opts.arrows, "Also write arrow renderings");
    track->add_option("--arrow-stride", track_opts.arrow_stride, "Arrow cell size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    track->add_option("--max-mag", track_opts.max_magnitude,
                      "Fixed magnitude normalization for color renders (0 = per-field max)")
        ->capture_default_str();

    RasterizePoseOptions rast_opts;
    CLI::App* rast =
        app.add_subcommand("rasterize-pose", "Pose guidance images from a keypoint document");
    rast->fallthrough();
    rast->add_option("--keypoints", rast_opts.keypoints, "Keypoint document (JSON)")->required();
    rast->add_flag("--no-face", rast_opts.no_face, "Skip face polylines");
    rast->add_flag("--no-hands", rast_opts.no_hands, "Skip hand polylines");

    PackGuidanceOptions pack_opts;
    CLI::App* pack =
        app.add_subcommand("pack-guidance", "Channel-stack reference and driving guidance");
    pack->fallthrough();
    pack->add_option("--reference", pack_opts.reference, "Reference image (PPM)")->required();
    pack->add_option("--reference-pose", pack_opts.reference_pose, "Reference pose image (PPM)")
        ->required();
    pack->add_option("--driving", pack_opts.driving, "Driving pose images (PPM)");
    pack->add_option("--driving-dir", pack_opts.driving_dir,
                     "Directory of driving pose PPMs (sorted by name)");

    PluckerOptions plucker_opts;
    CLI::App* plucker =
        app.add_subcommand("plucker", "Pluecker ray embeddings for every trajectory frame");
    plucker->fallthrough();
    plucker->add_option("--trajectory", plucker_opts.trajectory, "TUM trajectory file")->required();
    plucker->add_option("--intrinsics", plucker_opts.intrinsics, "Intrinsics sidecar file")
        ->required();

    ManApplyOptions man_opts;
    CLI::App* man = app.add_subcommand(
        "man-apply", "Motion-adaptive normalization forward pass over a feature tensor");
    man->fallthrough();
    man->add_option("--features", man_opts.features, "Feature container (entry 'features')")
        ->required();
    man->add_option("--motion", man_opts.motion, "Motion field (.flo)")->required();
    man->add_option("--weights", man_opts.weights,
                    "Weight container; omitted = seeded random weights");
    man->add_option("--hidden", man_opts.hidden, "Hidden width for generated weights")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    man->add_flag("--zero-heads", man_opts.zero_heads, "Zero-initialize the gamma/beta heads");
    man->add_flag("--save-weights", man_opts.save_weights, "Also write the weights used");
    man->add_option("--eps", man_opts.eps, "Instance-norm epsilon")->capture_default_str();

    MetricsOptions metrics_opts;
    CLI::App* metrics =
        app.add_subcommand("metrics", "L1 / PSNR / SSIM over image pairs (files or directories)");
    metrics->fallthrough();
    metrics->add_option("--a", metrics_opts.a, "First image or directory")->required();
    metrics->add_option("--b", metrics_opts.b, "Second image or directory")->required();

    VisualizeOptions vis_opts;
    CLI::App* vis = app.add_subcommand("visualize", "Render a .flo motion field");
    vis->fallthrough();
    vis->add_option("--flow", vis_opts.flow, ".flo file")->required();
    vis->add_option("--mode", vis_opts.mode, "color | arrows")->capture_default_str();
    vis->add_option("--underlay", vis_opts.underlay, "Underlay image for arrows (PPM)");
    vis->add_option("--stride", vis_opts.stride, "Arrow cell size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    vis->add_option("--max-mag", vis_opts.max_magnitude,
                    "Fixed magnitude normalization (0 = field max)")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (track->parsed()) {
            return run_track_scene(global, track_opts);
        }
        if (rast->parsed()) {
            return run_rasterize_pose(global, rast_opts);
        }
        if (pack->parsed()) {
            return run_pack_guidance(global, pack_opts);
        }
        if (plucker->parsed()) {
            return run_plucker(global, plucker_opts);
        }
        if (man->parsed()) {
            return run_man_apply(global, man_opts);
        }
        if (metrics->parsed()) {
            return run_metrics(global, metrics_opts);
        }
        if (vis->parsed()) {
            return run_visualize(global, vis_opts);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
