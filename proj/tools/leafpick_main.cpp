// Command-line front end: detect / synth / trial / eval / bench /
// config-dump subcommands over a shared INI config.
//
// Exit codes: 0 success (detect: with candidates), 2 malformed input,
// 3 success but empty result, 4 schema mismatch, 1 other failure.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "leafpick/candidate_io.hpp"
#include "leafpick/cloud_io.hpp"
#include "leafpick/config.hpp"
#include "leafpick/eval_metrics.hpp"
#include "leafpick/retrieval_sim.hpp"

namespace fs = std::filesystem;
using namespace leafpick;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitMalformedInput = 2;
constexpr int kExitEmpty = 3;
constexpr int kExitSchemaMismatch = 4;

struct CommonOpts {
    std::string config_path;
    std::string profile;
    bool has_seed = false;
    std::uint64_t seed = 0;
};

PipelineConfig effective_config(const CommonOpts& opts) {
    std::string path = opts.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("LEAFPICK_CONFIG")) path = env;
    }
    PipelineConfig cfg;
    if (path.empty()) {
        Profile p = opts.profile == "outdoor" ? Profile::outdoor : Profile::indoor;
        cfg = default_config(p);
    } else if (opts.profile.empty()) {
        cfg = load_config_file(path);
    } else {
        // --profile beats the file's profile key: strip that key from the
        // file text and prepend the flag's value.
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::string filtered = "profile = " + opts.profile + "\n";
        std::string line;
        while (std::getline(in, line)) {
            auto t = line.find_first_not_of(" \t");
            if (t != std::string::npos && line.compare(t, 7, "profile") == 0)
                continue;
            filtered += line + "\n";
        }
        cfg = parse_config(filtered);
    }
    if (opts.has_seed) cfg.synth.seed = opts.seed;
    return cfg;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
}

int cmd_detect(const CommonOpts& common, const std::string& input,
               const std::string& output) {
    PipelineConfig cfg = effective_config(common);
    ParseResult parsed;
    try {
        parsed = load_cloud_file(input);
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMalformedInput;
    } catch (const TruncationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMalformedInput;
    } catch (const UnsupportedFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMalformedInput;
    }

    DetectionStageCounts counts;
    auto candidates = detect_leaves(parsed.cloud, cfg.preprocess, cfg.clustering,
                                    cfg.filter, &counts);
    if (!output.empty()) write_text(output, candidates_to_json(candidates, counts));

    std::cout << "input points:        " << counts.input
              << (parsed.dropped_non_finite
                      ? " (" + std::to_string(parsed.dropped_non_finite) +
                            " non-finite dropped)"
                      : "")
              << "\n";
    std::cout << "after crop:          " << counts.after_crop << "\n";
    std::cout << "after outlier pass:  " << counts.after_outlier_removal << "\n";
    std::cout << "after downsample:    " << counts.after_downsample << "\n";
    std::cout << "clusters:            " << counts.clusters << "\n";
    std::cout << "leaf candidates:     " << counts.candidates << "\n";
    for (const auto& c : candidates)
        std::cout << "  rank " << c.rank << ": center_mm=["
                  << c.obb.center.x() * 1000 << ", " << c.obb.center.y() * 1000
                  << ", " << c.obb.center.z() * 1000 << "] ratio="
                  << c.leaf_ratio << " points=" << c.n_points << "\n";
    return candidates.empty() ? kExitEmpty : kExitOk;
}

int cmd_synth(const CommonOpts& common, const std::string& output_dir,
              const std::string& format_name, long long n_leaves_override) {
    PipelineConfig cfg = effective_config(common);
    if (n_leaves_override >= 0)
        cfg.synth.n_leaves = static_cast<std::size_t>(n_leaves_override);

    SyntheticScene scene = generate_scene(cfg.synth);

    fs::create_directories(output_dir);
    CloudFormat fmt = CloudFormat::pcd_binary;
    std::string ext = ".pcd";
    if (format_name == "pcd_ascii") fmt = CloudFormat::pcd_ascii;
    else if (format_name == "ply_binary") { fmt = CloudFormat::ply_binary; ext = ".ply"; }
    else if (format_name == "ply_ascii") { fmt = CloudFormat::ply_ascii; ext = ".ply"; }

    std::string cloud_path = (fs::path(output_dir) / ("scene" + ext)).string();
    std::string truth_path = (fs::path(output_dir) / "scene.truth.json").string();
    save_cloud_file(cloud_path, scene.cloud, fmt);
    write_text(truth_path, ground_truth_to_json(scene.truth));

    std::cout << "leaves: " << scene.truth.leaves.size() << "\n";
    std::cout << "points: " << scene.cloud.size() << "\n";
    std::cout << "cloud:  " << cloud_path << "\n";
    std::cout << "truth:  " << truth_path << "\n";
    return kExitOk;
}

int cmd_trial(const CommonOpts& common, std::size_t n_trials,
              const std::string& output_dir) {
    if (n_trials == 0) {
        std::cerr << "error: campaign has zero scenes\n";
        return kExitFailure;
    }
    PipelineConfig cfg = effective_config(common);
    std::vector<SceneSpec> scenes;
    for (std::size_t i = 0; i < n_trials; ++i) {
        SceneSpec s = cfg.synth;
        s.seed = cfg.synth.seed + i;
        scenes.push_back(s);
    }
    TrialReport report;
    try {
        report = run_trials(scenes, cfg.trial_config());
    } catch (const PlacementError& e) {
        std::cerr << "error: trial generation failed: " << e.what() << "\n";
        return kExitFailure;
    }

    fs::create_directories(output_dir);
    write_text((fs::path(output_dir) / "report.json").string(),
               trial_report_to_json(report));
    write_text((fs::path(output_dir) / "report.csv").string(),
               trial_report_to_csv(report));
    std::cout << trial_report_to_csv(report);
    return kExitOk;
}

int cmd_eval(const std::string& truth_path, const std::string& candidates_path,
             const std::string& output) {
    std::ifstream tin(truth_path);
    if (!tin) {
        std::cerr << "error: cannot open " << truth_path << "\n";
        return kExitFailure;
    }
    std::stringstream tss;
    tss << tin.rdbuf();
    std::ifstream cin_(candidates_path);
    if (!cin_) {
        std::cerr << "error: cannot open " << candidates_path << "\n";
        return kExitFailure;
    }
    std::stringstream css;
    css << cin_.rdbuf();

    GroundTruth truth;
    std::vector<LeafCandidate> candidates;
    try {
        truth = ground_truth_from_json(tss.str());
        candidates = candidates_from_json(css.str());
    } catch (const SchemaMismatchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchemaMismatch;
    }

    double threshold = default_match_threshold(truth);
    MatchResult match = match_detections(truth, candidates, threshold);
    double rate = match.detection_rate(truth.leaves.size());

    std::ostringstream out;
    out << detection_table_csv("Scene", 1, truth.leaves.size(),
                               static_cast<double>(match.pairs.size()), rate);
    if (!match.pairs.empty()) {
        std::vector<PoseError> errors;
        for (const auto& pair : match.pairs) {
            const auto& t = truth.leaves[pair.truth_id];
            const LeafCandidate* cand = nullptr;
            for (const auto& c : candidates)
                if (c.rank == pair.candidate_rank) cand = &c;
            if (cand) errors.push_back(pose_error(t.canonical_pose, cand->pose));
        }
        out << "\n" << pose_error_table_csv(aggregate_pose_errors(errors));
    }
    if (!output.empty()) write_text(output, out.str());
    std::cout << out.str();
    return kExitOk;
}

int cmd_bench(const CommonOpts& common, const std::string& input,
              std::size_t repetitions) {
    PipelineConfig cfg = effective_config(common);
    PointCloud cloud;
    if (!input.empty()) {
        cloud = load_cloud_file(input).cloud;
    } else {
        cloud = generate_scene(cfg.synth).cloud;
    }

    std::vector<double> crop_s, sor_s, voxel_s, dbscan_s, fit_s, total_s;
    std::size_t candidates = 0;
    for (std::size_t r = 0; r < repetitions; ++r) {
        using clock = std::chrono::steady_clock;
        auto t0 = clock::now();
        PointCloud c = crop_by_distance(cloud, cfg.preprocess.min_range,
                                        cfg.preprocess.max_range);
        auto t1 = clock::now();
        c = remove_statistical_outliers(c, cfg.preprocess.outlier_k,
                                        cfg.preprocess.outlier_std_ratio);
        auto t2 = clock::now();
        c = voxel_downsample(c, cfg.preprocess.voxel_size);
        auto t3 = clock::now();
        ClusterLabels labels = dbscan(c, cfg.clustering);
        auto t4 = clock::now();
        DetectionStageCounts counts;
        auto cands = detect_leaves(cloud, cfg.preprocess, cfg.clustering,
                                   cfg.filter, &counts);
        auto t5 = clock::now();
        candidates = cands.size();
        auto sec = [](auto a, auto b) {
            return std::chrono::duration<double>(b - a).count();
        };
        crop_s.push_back(sec(t0, t1));
        sor_s.push_back(sec(t1, t2));
        voxel_s.push_back(sec(t2, t3));
        dbscan_s.push_back(sec(t3, t4));
        fit_s.push_back(sec(t4, t5));
        total_s.push_back(sec(t4, t5));  // full pipeline run
        (void)labels;
    }

    auto row = [](const char* name, const TimingStats& t) {
        std::printf("%-22s min %.4f  max %.4f  mean %.4f  median %.4f  std %.4f\n",
                    name, t.min, t.max, t.mean, t.median, t.stddev);
    };
    std::printf("points: %zu, repetitions: %zu, candidates: %zu\n",
                cloud.size(), repetitions, candidates);
    row("crop", timing_summary(crop_s));
    row("outlier removal", timing_summary(sor_s));
    row("voxel downsample", timing_summary(voxel_s));
    row("dbscan", timing_summary(dbscan_s));
    row("full pipeline", timing_summary(total_s));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"leaf detection, localization, and retrieval simulation"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    CommonOpts common;
    app.add_option("--config", common.config_path, "config file (INI)")
        ->envname("LEAFPICK_CONFIG");
    app.add_option("--profile", common.profile, "indoor|outdoor")
        ->check(CLI::IsMember({"indoor", "outdoor"}));
    auto* seed_opt = app.add_option("--seed", common.seed, "synthesis seed");

    std::string input, output, output_dir, format_name = "pcd_binary";
    std::string truth_path, candidates_path;
    std::size_t n_trials = 1, repetitions = 5;
    long long n_leaves = -1;

    auto* detect = app.add_subcommand("detect", "run the perception pipeline");
    detect->add_option("--input", input, "point cloud (.pcd/.ply)")->required();
    detect->add_option("--output", output, "candidate JSON path");

    auto* synth = app.add_subcommand("synth", "generate a labeled scene");
    synth->add_option("--output-dir", output_dir, "output directory")->required();
    synth->add_option("--format", format_name, "cloud format")
        ->check(CLI::IsMember({"pcd_ascii", "pcd_binary", "ply_ascii", "ply_binary"}));
    synth->add_option("--n-leaves", n_leaves, "leaf count override");

    auto* trial = app.add_subcommand("trial", "run a retrieval campaign");
    trial->add_option("--trials", n_trials, "number of trials")->required();
    trial->add_option("--output-dir", output_dir, "output directory")->required();

    auto* eval = app.add_subcommand("eval", "score candidates against truth");
    eval->add_option("--truth", truth_path, "ground-truth sidecar JSON")->required();
    eval->add_option("--candidates", candidates_path, "candidate JSON")->required();
    eval->add_option("--output", output, "metrics CSV path");

    auto* bench = app.add_subcommand("bench", "time the perception stages");
    bench->add_option("--input", input, "point cloud (optional; synth otherwise)");
    bench->add_option("--repetitions", repetitions, "runs per stage")
        ->check(CLI::PositiveNumber);

    auto* dump = app.add_subcommand("config-dump", "print the effective config");

    CLI11_PARSE(app, argc, argv);
    common.has_seed = seed_opt->count() > 0;

    try {
        if (detect->parsed()) return cmd_detect(common, input, output);
        if (synth->parsed()) return cmd_synth(common, output_dir, format_name, n_leaves);
        if (trial->parsed()) return cmd_trial(common, n_trials, output_dir);
        if (eval->parsed()) return cmd_eval(truth_path, candidates_path, output);
        if (bench->parsed()) return cmd_bench(common, input, repetitions);
        if (dump->parsed()) {
            std::cout << dump_config(effective_config(common));
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitMalformedInput;
    } catch (const SchemaMismatchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchemaMismatch;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
