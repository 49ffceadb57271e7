#include "leafpick/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace leafpick {

PipelineConfig default_config(Profile profile) {
    PipelineConfig cfg;
    cfg.profile = profile;
    if (profile == Profile::indoor) {
        cfg.preprocess.min_range = 0.15;
        cfg.preprocess.max_range = 0.45;
        cfg.preprocess.voxel_size = 0.005;
        cfg.clustering.eps = 0.012;
        cfg.clustering.min_points = 8;
        cfg.filter.min_cluster_points = 30;
        cfg.synth.camera_range_min = 0.2;
        cfg.synth.camera_range_max = 0.3;
        cfg.synth.profile = Profile::indoor;
    } else {
        cfg.preprocess.min_range = 0.4;
        cfg.preprocess.max_range = 1.8;
        cfg.preprocess.voxel_size = 0.010;
        cfg.clustering.eps = 0.025;
        cfg.clustering.min_points = 5;
        cfg.filter.min_cluster_points = 15;
        cfg.synth.camera_range_min = 0.5;
        cfg.synth.camera_range_max = 1.6;
        cfg.synth.profile = Profile::outdoor;
    }
    return cfg;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("invalid numeric value for " + key + ": " + v);
    }
}

std::size_t to_count(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        long long n = std::stoll(v, &pos);
        if (pos != v.size() || n < 0) throw std::invalid_argument(v);
        return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        throw ConfigError("invalid count value for " + key + ": " + v);
    }
}

void apply_key(PipelineConfig& cfg, const std::string& section,
               const std::string& key, const std::string& value) {
    const std::string full = section.empty() ? key : section + "." + key;
    if (section.empty()) {
        if (key == "profile") return;  // handled in the pre-pass
        throw ConfigError("unknown config key: " + full);
    }
    if (section == "preprocess") {
        if (key == "min_range") cfg.preprocess.min_range = to_double(value, full);
        else if (key == "max_range") cfg.preprocess.max_range = to_double(value, full);
        else if (key == "outlier_k") cfg.preprocess.outlier_k = to_count(value, full);
        else if (key == "outlier_std_ratio") cfg.preprocess.outlier_std_ratio = to_double(value, full);
        else if (key == "voxel_size") cfg.preprocess.voxel_size = to_double(value, full);
        else throw ConfigError("unknown config key: " + full);
    } else if (section == "clustering") {
        if (key == "eps") cfg.clustering.eps = to_double(value, full);
        else if (key == "min_points") cfg.clustering.min_points = to_count(value, full);
        else throw ConfigError("unknown config key: " + full);
    } else if (section == "filter") {
        if (key == "min_cluster_points") cfg.filter.min_cluster_points = to_count(value, full);
        else if (key == "volume_min") cfg.filter.volume_min = to_double(value, full);
        else if (key == "volume_max") cfg.filter.volume_max = to_double(value, full);
        else if (key == "ratio_min") cfg.filter.ratio_min = to_double(value, full);
        else if (key == "ratio_max") cfg.filter.ratio_max = to_double(value, full);
        else throw ConfigError("unknown config key: " + full);
    } else if (section == "workspace") {
        if (key == "base_x") cfg.workspace.base.x() = to_double(value, full);
        else if (key == "base_y") cfg.workspace.base.y() = to_double(value, full);
        else if (key == "base_z") cfg.workspace.base.z() = to_double(value, full);
        else if (key == "reach_min") cfg.workspace.reach_min = to_double(value, full);
        else if (key == "reach_max") cfg.workspace.reach_max = to_double(value, full);
        else throw ConfigError("unknown config key: " + full);
    } else if (section == "chamber") {
        if (key == "opening_w") cfg.chamber.opening_w = to_double(value, full);
        else if (key == "opening_h") cfg.chamber.opening_h = to_double(value, full);
        else if (key == "depth") cfg.chamber.depth = to_double(value, full);
        else throw ConfigError("unknown config key: " + full);
    } else if (section == "synth") {
        if (key == "n_leaves") cfg.synth.n_leaves = to_count(value, full);
        else if (key == "camera_range_min") cfg.synth.camera_range_min = to_double(value, full);
        else if (key == "camera_range_max") cfg.synth.camera_range_max = to_double(value, full);
        else if (key == "noise_sigma_coeff") cfg.synth.noise_sigma_coeff = to_double(value, full);
        else if (key == "branch_count") cfg.synth.branch_count = to_count(value, full);
        else if (key == "occlusion_fraction") cfg.synth.occlusion_fraction = to_double(value, full);
        else if (key == "seed") cfg.synth.seed = to_count(value, full);
        else if (key == "density_ref") cfg.synth.density_ref = to_double(value, full);
        else if (key == "background_density_factor") cfg.synth.background_density_factor = to_double(value, full);
        else throw ConfigError("unknown config key: " + full);
    } else if (section == "sim") {
        if (key == "near_miss_band") cfg.sim.near_miss_band = to_double(value, full);
        else if (key == "path_step") cfg.sim.path_step = to_double(value, full);
        else if (key == "approach_speed") cfg.sim.approach_speed = to_double(value, full);
        else if (key == "actuation_overhead_s") cfg.sim.actuation_overhead_s = to_double(value, full);
        else if (key == "perception_rate_pts_per_s") cfg.sim.perception_rate_pts_per_s = to_double(value, full);
        else throw ConfigError("unknown config key: " + full);
    } else {
        throw ConfigError("unknown config section: [" + section + "]");
    }
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
    // Pre-pass: the profile selects the defaults everything else overrides.
    Profile profile = Profile::indoor;
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.rfind("profile", 0) == 0) {
                std::size_t eq = line.find('=');
                if (eq == std::string::npos) continue;
                std::string v = trim(line.substr(eq + 1));
                if (v == "indoor") profile = Profile::indoor;
                else if (v == "outdoor") profile = Profile::outdoor;
                else throw ConfigError("unknown profile: " + v);
            }
        }
    }

    PipelineConfig cfg = default_config(profile);
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed section header: " + line);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value, got: " + line);
        apply_key(cfg, section, trim(line.substr(0, eq)),
                  trim(line.substr(eq + 1)));
    }

    if (!cfg.preprocess.valid()) throw ConfigError("invalid [preprocess] values");
    if (!cfg.clustering.valid()) throw ConfigError("invalid [clustering] values");
    if (!cfg.filter.valid()) throw ConfigError("invalid [filter] values");
    if (cfg.workspace.reach_min < 0.0 ||
        cfg.workspace.reach_min >= cfg.workspace.reach_max)
        throw ConfigError("invalid [workspace] values");
    return cfg;
}

PipelineConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const PipelineConfig& cfg) {
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    std::ostringstream out;
    out << "profile = " << (cfg.profile == Profile::indoor ? "indoor" : "outdoor") << "\n\n";
    out << "[preprocess]\n";
    out << "min_range = " << num(cfg.preprocess.min_range) << "\n";
    out << "max_range = " << num(cfg.preprocess.max_range) << "\n";
    out << "outlier_k = " << cfg.preprocess.outlier_k << "\n";
    out << "outlier_std_ratio = " << num(cfg.preprocess.outlier_std_ratio) << "\n";
    out << "voxel_size = " << num(cfg.preprocess.voxel_size) << "\n\n";
    out << "[clustering]\n";
    out << "eps = " << num(cfg.clustering.eps) << "\n";
    out << "min_points = " << cfg.clustering.min_points << "\n\n";
    out << "[filter]\n";
    out << "min_cluster_points = " << cfg.filter.min_cluster_points << "\n";
    out << "volume_min = " << num(cfg.filter.volume_min) << "\n";
    out << "volume_max = " << num(cfg.filter.volume_max) << "\n";
    out << "ratio_min = " << num(cfg.filter.ratio_min) << "\n";
    out << "ratio_max = " << num(cfg.filter.ratio_max) << "\n\n";
    out << "[workspace]\n";
    out << "base_x = " << num(cfg.workspace.base.x()) << "\n";
    out << "base_y = " << num(cfg.workspace.base.y()) << "\n";
    out << "base_z = " << num(cfg.workspace.base.z()) << "\n";
    out << "reach_min = " << num(cfg.workspace.reach_min) << "\n";
    out << "reach_max = " << num(cfg.workspace.reach_max) << "\n\n";
    out << "[chamber]\n";
    out << "opening_w = " << num(cfg.chamber.opening_w) << "\n";
    out << "opening_h = " << num(cfg.chamber.opening_h) << "\n";
    out << "depth = " << num(cfg.chamber.depth) << "\n\n";
    out << "[synth]\n";
    out << "n_leaves = " << cfg.synth.n_leaves << "\n";
    out << "camera_range_min = " << num(cfg.synth.camera_range_min) << "\n";
    out << "camera_range_max = " << num(cfg.synth.camera_range_max) << "\n";
    out << "noise_sigma_coeff = " << num(cfg.synth.noise_sigma_coeff) << "\n";
    out << "branch_count = " << cfg.synth.branch_count << "\n";
    out << "occlusion_fraction = " << num(cfg.synth.occlusion_fraction) << "\n";
    out << "seed = " << cfg.synth.seed << "\n";
    out << "density_ref = " << num(cfg.synth.density_ref) << "\n";
    out << "background_density_factor = " << num(cfg.synth.background_density_factor) << "\n\n";
    out << "[sim]\n";
    out << "near_miss_band = " << num(cfg.sim.near_miss_band) << "\n";
    out << "path_step = " << num(cfg.sim.path_step) << "\n";
    out << "approach_speed = " << num(cfg.sim.approach_speed) << "\n";
    out << "actuation_overhead_s = " << num(cfg.sim.actuation_overhead_s) << "\n";
    out << "perception_rate_pts_per_s = " << num(cfg.sim.perception_rate_pts_per_s) << "\n";
    return out.str();
}

}  // namespace leafpick
