// Command-line front end: filter single frames or directories, evaluate
// against ground-truth labels, generate synthetic scenes, and export colored
// point clouds. Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dmnr/dmnr.hpp"

namespace fs = std::filesystem;

namespace {

struct ParamFlags {
    std::string config_path;
    std::optional<int> k_neighbors;
    std::optional<double> k1, k2, k3;
    std::optional<int> rescue_clusters;
    std::optional<std::string> height_mode;
    std::optional<double> h1, h2;
    std::optional<int> min_cluster_size, min_samples;
    std::optional<std::string> noise_ids;
    double intensity_scale = 1.0;
    // baseline knobs
    double sor_alpha = 1.0;
    double ror_radius = 0.5;
    int ror_min_neighbors = 5;
};

void add_param_flags(CLI::App* cmd, ParamFlags& f) {
    cmd->add_option("--config", f.config_path,
                    "key=value config file (flags override it)");
    cmd->add_option("-K,--neighbors", f.k_neighbors,
                    "neighbor count for local average distance");
    cmd->add_option("--k1", f.k1, "aggressiveness");
    cmd->add_option("--k2", f.k2, "range aggressiveness (1/m)");
    cmd->add_option("--k3", f.k3, "intensity weight");
    cmd->add_option("--rescue-h", f.rescue_clusters,
                    "clusters eligible for the dmnr-h rescue");
    cmd->add_option("--height-mode", f.height_mode,
                    "height threshold constants: adaptive or fixed")
        ->check(CLI::IsMember({"adaptive", "fixed"}));
    cmd->add_option("--h1", f.h1, "fixed height numerator constant");
    cmd->add_option("--h2", f.h2, "fixed height offset constant");
    cmd->add_option("--min-cluster-size", f.min_cluster_size,
                    "hdbscan minimum cluster size");
    cmd->add_option("--min-samples", f.min_samples,
                    "hdbscan core-distance neighbor order");
    cmd->add_option("--noise-ids", f.noise_ids,
                    "comma-separated ground-truth noise class ids");
    cmd->add_option("--intensity-scale", f.intensity_scale,
                    "rescale intensities at load time");
    cmd->add_option("--sor-alpha", f.sor_alpha,
                    "sor: std-deviation multiplier");
    cmd->add_option("--ror-radius", f.ror_radius, "ror: search radius (m)");
    cmd->add_option("--ror-min-neighbors", f.ror_min_neighbors,
                    "ror: neighbors required within the radius");
}

dmnr::Config resolve_config(const ParamFlags& f) {
    dmnr::Config cfg;
    if (!f.config_path.empty()) {
        cfg = dmnr::load_config(f.config_path);
    }
    if (f.k_neighbors) cfg.dmnr.k_neighbors = *f.k_neighbors;
    if (f.k1) cfg.dmnr.k1 = *f.k1;
    if (f.k2) cfg.dmnr.k2 = *f.k2;
    if (f.k3) cfg.dmnr.k3 = *f.k3;
    if (f.rescue_clusters) cfg.dmnr.rescue_clusters = *f.rescue_clusters;
    if (f.height_mode) {
        cfg.dmnr.height_mode = *f.height_mode == "fixed"
                                   ? dmnr::HeightMode::Fixed
                                   : dmnr::HeightMode::Adaptive;
    }
    if (f.h1) cfg.dmnr.fixed_h1 = *f.h1;
    if (f.h2) cfg.dmnr.fixed_h2 = *f.h2;
    if (f.min_cluster_size) cfg.hdbscan.min_cluster_size = *f.min_cluster_size;
    if (f.min_samples) cfg.hdbscan.min_samples = *f.min_samples;
    if (f.noise_ids) {
        dmnr::apply_config_entry(cfg, "noise_ids", *f.noise_ids);
    }
    return cfg;
}

dmnr::FilterFn make_filter(const std::string& algo, const dmnr::Config& cfg,
                           const ParamFlags& f) {
    if (algo == "dmnr") {
        return [cfg](const dmnr::PointCloud& cloud) {
            return dmnr::dmnr(cloud, cfg.dmnr);
        };
    }
    if (algo == "dmnr-h") {
        return [cfg](const dmnr::PointCloud& cloud) {
            return dmnr::dmnr_h(cloud, cfg.dmnr, cfg.hdbscan);
        };
    }
    if (algo == "sor") {
        const int k = cfg.dmnr.k_neighbors;
        const double alpha = f.sor_alpha;
        return [k, alpha](const dmnr::PointCloud& cloud) {
            return dmnr::sor_baseline(cloud, k, alpha);
        };
    }
    const double radius = f.ror_radius;
    const auto min_neighbors = static_cast<std::size_t>(f.ror_min_neighbors);
    return [radius, min_neighbors](const dmnr::PointCloud& cloud) {
        return dmnr::ror_baseline(cloud, radius, min_neighbors);
    };
}

dmnr::PlyFormat parse_ply_format(const std::string& name) {
    return name == "ascii" ? dmnr::PlyFormat::Ascii
                           : dmnr::PlyFormat::BinaryLittleEndian;
}

struct FilterArgs {
    std::string input;
    std::string algo = "dmnr";
    std::string out_mask;
    std::string out_ply;
    std::string out_points;
    std::string ply_format = "binary";
    bool color_by_stage = false;
};

void filter_one(const std::string& stem, const dmnr::PointCloud& cloud,
                const dmnr::FilterFn& filter, const FilterArgs& args,
                bool directory_mode) {
    const dmnr::Partition part = filter(cloud);
    const auto out_path = [&](const std::string& base,
                              const char* ext) -> std::string {
        if (!directory_mode) return base;
        fs::create_directories(base);
        return (fs::path(base) / (stem + ext)).string();
    };
    if (!args.out_mask.empty()) {
        dmnr::write_mask(part, out_path(args.out_mask, ".mask"));
    }
    if (!args.out_ply.empty()) {
        dmnr::write_colored(cloud, part, out_path(args.out_ply, ".ply"),
                            parse_ply_format(args.ply_format),
                            args.color_by_stage);
    }
    if (!args.out_points.empty()) {
        dmnr::PointCloud kept;
        for (std::size_t n = 0; n < cloud.size(); ++n) {
            if (part.kept(n)) kept.points.push_back(cloud.points[n]);
        }
        dmnr::write_points(kept, out_path(args.out_points, ".bin"));
    }
    std::printf("%s: kept %zu / %zu (removed %zu)\n", stem.c_str(),
                part.kept_count(), cloud.size(), part.outlier_count());
}

int run_filter(const FilterArgs& args, const ParamFlags& flags) {
    const dmnr::Config cfg = resolve_config(flags);
    const dmnr::FilterFn filter = make_filter(args.algo, cfg, flags);

    if (fs::is_directory(args.input)) {
        std::vector<std::string> stems;
        for (const auto& entry : fs::directory_iterator(args.input)) {
            if (entry.is_regular_file() && entry.path().extension() == ".bin") {
                stems.push_back(entry.path().stem().string());
            }
        }
        std::sort(stems.begin(), stems.end());
        if (stems.empty()) {
            throw dmnr::IoError("no .bin files in '" + args.input + "'");
        }
        for (const auto& stem : stems) {
            const auto path = (fs::path(args.input) / (stem + ".bin")).string();
            const auto cloud = dmnr::load_points(path, flags.intensity_scale);
            filter_one(stem, cloud, filter, args, true);
        }
    } else {
        const auto cloud = dmnr::load_points(args.input, flags.intensity_scale);
        filter_one(fs::path(args.input).stem().string(), cloud, filter, args,
                   false);
    }
    return 0;
}

struct EvaluateArgs {
    std::string points_dir;
    std::string labels_dir;
    std::string algo = "dmnr";
    std::string report_path;
    std::string csv_path;
};

int run_evaluate(const EvaluateArgs& args, const ParamFlags& flags) {
    const dmnr::Config cfg = resolve_config(flags);
    if (cfg.noise_ids.empty()) {
        throw dmnr::ConfigError(
            "evaluate needs noise class ids (--noise-ids or config)");
    }
    const dmnr::FilterFn filter = make_filter(args.algo, cfg, flags);
    const auto frames = dmnr::load_dataset_frames(
        args.points_dir, args.labels_dir, flags.intensity_scale);
    const dmnr::EvalReport report =
        dmnr::evaluate_dataset(frames, filter, cfg.noise_ids);

    dmnr::RunInfo run;
    run.algorithm = args.algo;
    run.params = cfg.dmnr;
    run.hdbscan = cfg.hdbscan;
    run.intensity_scale = flags.intensity_scale;
    if (!args.report_path.empty()) {
        dmnr::write_report_json(report, run, args.report_path);
    }
    if (!args.csv_path.empty()) {
        dmnr::write_report_csv(report, args.csv_path);
    }
    const auto& m = report.aggregate_metrics;
    std::printf("%s on %zu frames: precision %.2f%% recall %.2f%% F1 %.2f%%\n",
                args.algo.c_str(), report.per_frame.size(), 100.0 * m.precision,
                100.0 * m.recall, 100.0 * m.f1);
    return 0;
}

struct SynthArgs {
    std::string out_points;
    std::string out_labels;
    std::uint64_t seed = 1;
    double clutter_fraction = 0.05;
    double clutter_max_range = 8.0;
    double ground_half_extent = 34.0;
    double ground_spacing = 0.5;
    bool high_intensity_clutter = false;
    std::uint32_t noise_id = 110;
    std::uint32_t clean_id = 0;
};

int run_synth(const SynthArgs& args) {
    dmnr::SynthSpec spec = dmnr::default_synth_spec();
    spec.seed = args.seed;
    spec.clutter_fraction = args.clutter_fraction;
    spec.clutter_max_range = args.clutter_max_range;
    spec.ground_half_extent = args.ground_half_extent;
    spec.ground_spacing = args.ground_spacing;
    spec.high_intensity_clutter = args.high_intensity_clutter;

    const auto [cloud, noise_mask] = dmnr::generate_synthetic(spec);
    dmnr::write_points(cloud, args.out_points);
    if (!args.out_labels.empty()) {
        std::vector<std::uint32_t> labels(cloud.size());
        for (std::size_t n = 0; n < cloud.size(); ++n) {
            labels[n] = noise_mask[n] ? args.noise_id : args.clean_id;
        }
        dmnr::write_labels(labels, args.out_labels);
    }
    std::size_t noise = 0;
    for (const bool b : noise_mask) noise += b ? 1 : 0;
    std::printf("synth: %zu points (%zu noise) -> %s\n", cloud.size(), noise,
                args.out_points.c_str());
    return 0;
}

struct ExportArgs {
    std::string points_path;
    std::string mask_path;
    std::string out_path;
    std::string format = "binary";
    double intensity_scale = 1.0;
};

int run_export(const ExportArgs& args) {
    const auto cloud = dmnr::load_points(args.points_path, args.intensity_scale);
    const auto kept = dmnr::load_mask(args.mask_path, cloud.size());
    dmnr::Partition part;
    part.verdicts.resize(cloud.size());
    part.tags.resize(cloud.size());
    for (std::size_t n = 0; n < cloud.size(); ++n) {
        part.verdicts[n] = kept[n] ? dmnr::Verdict::Kept : dmnr::Verdict::Outlier;
        part.tags[n] = kept[n] ? dmnr::StageTag::DensityRetained
                               : dmnr::StageTag::DensityRejected;
    }
    dmnr::write_colored(cloud, part, args.out_path,
                        parse_ply_format(args.format));
    std::printf("export: %zu vertices -> %s\n", cloud.size(),
                args.out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LiDAR airborne-particle denoising (dmnr / dmnr-h / sor / ror)"};
    app.require_subcommand(1);

    const std::vector<std::string> algos{"dmnr", "dmnr-h", "sor", "ror"};

    FilterArgs filter_args;
    ParamFlags filter_flags;
    CLI::App* filter_cmd =
        app.add_subcommand("filter", "filter a frame or a directory of frames");
    filter_cmd->add_option("-i,--input", filter_args.input,
                           ".bin point file or directory of them")
        ->required();
    filter_cmd->add_option("-a,--algo", filter_args.algo, "filter algorithm")
        ->check(CLI::IsMember(algos));
    filter_cmd->add_option("--out-mask", filter_args.out_mask,
                           "write per-point kept mask (uint8) here");
    filter_cmd->add_option("--out-ply", filter_args.out_ply,
                           "write colored point cloud here");
    filter_cmd->add_option("--out-points", filter_args.out_points,
                           "write kept points (.bin) here");
    filter_cmd->add_option("--ply-format", filter_args.ply_format, "ply flavor")
        ->check(CLI::IsMember({"ascii", "binary"}));
    filter_cmd->add_flag("--color-by-stage", filter_args.color_by_stage,
                         "color the export by decision stage instead of verdict");
    add_param_flags(filter_cmd, filter_flags);

    EvaluateArgs eval_args;
    ParamFlags eval_flags;
    CLI::App* eval_cmd = app.add_subcommand(
        "evaluate", "run a filter over a labeled dataset and report metrics");
    eval_cmd->add_option("-p,--points", eval_args.points_dir,
                         "directory of .bin point files")
        ->required();
    eval_cmd->add_option("-l,--labels", eval_args.labels_dir,
                         "directory of .label files")
        ->required();
    eval_cmd->add_option("-a,--algo", eval_args.algo, "filter algorithm")
        ->check(CLI::IsMember(algos));
    eval_cmd->add_option("-r,--report", eval_args.report_path,
                         "write the JSON report here");
    eval_cmd->add_option("--csv", eval_args.csv_path,
                         "also write a CSV mirror here");
    add_param_flags(eval_cmd, eval_flags);

    SynthArgs synth_args;
    CLI::App* synth_cmd = app.add_subcommand(
        "synth", "generate a synthetic scene with exact noise ground truth");
    synth_cmd->add_option("--out-points", synth_args.out_points, "output .bin")
        ->required();
    synth_cmd->add_option("--out-labels", synth_args.out_labels,
                          "output .label with noise/clean ids");
    synth_cmd->add_option("--seed", synth_args.seed, "rng seed");
    synth_cmd->add_option("--clutter-fraction", synth_args.clutter_fraction,
                          "noise fraction of the final point count");
    synth_cmd->add_option("--clutter-max-range", synth_args.clutter_max_range,
                          "clutter horizontal range (m)");
    synth_cmd->add_option("--ground-extent", synth_args.ground_half_extent,
                          "ground half extent (m)");
    synth_cmd->add_option("--ground-spacing", synth_args.ground_spacing,
                          "ground grid spacing (m)");
    synth_cmd->add_flag("--high-intensity-clutter",
                        synth_args.high_intensity_clutter,
                        "adversarial: clutter with environment-level intensity");
    synth_cmd->add_option("--noise-id", synth_args.noise_id,
                          "label id for clutter points");
    synth_cmd->add_option("--clean-id", synth_args.clean_id,
                          "label id for clean points");

    ExportArgs export_args;
    CLI::App* export_cmd = app.add_subcommand(
        "export", "combine points and a mask into a colored point cloud");
    export_cmd->add_option("-i,--points", export_args.points_path, "input .bin")
        ->required();
    export_cmd->add_option("-m,--mask", export_args.mask_path, "input .mask")
        ->required();
    export_cmd->add_option("-o,--out", export_args.out_path, "output .ply")
        ->required();
    export_cmd->add_option("--format", export_args.format, "ply flavor")
        ->check(CLI::IsMember({"ascii", "binary"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*filter_cmd) return run_filter(filter_args, filter_flags);
        if (*eval_cmd) return run_evaluate(eval_args, eval_flags);
        if (*synth_cmd) return run_synth(synth_args);
        if (*export_cmd) return run_export(export_args);
    } catch (const dmnr::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
