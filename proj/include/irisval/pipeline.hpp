#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "irisval/color.hpp"
#include "irisval/image.hpp"

namespace irisval {

struct PipelineConfig {
    int polar_width = 3216;   // angular samples of the upscaled strip
    int polar_height = 341;   // radial samples of the upscaled strip
    int wrapped_size = 1024;
    double wrapped_pupil_radius = 170.0;
    double wrapped_limbic_radius = 340.0;
    int final_size = 256;
    int rotations = 11;
    double rotation_step = 30.0;  // degrees, applied clockwise
    int hole_punch_count = 30;
    std::uint64_t seed = 0;
    int colored_pixel_threshold = kDefaultColoredThreshold;

    // Coverage gate: rays at multiples of 360/coverage_rays degrees.
    int coverage_rays = 12;
    int coverage_samples = 64;
    double coverage_min_fraction = 0.10;
    int coverage_max_empty = 3;  // reject at coverage_max_empty + 1 empty rays

    // Hole punching, disc radii in 1024-frame pixels.
    int hole_min_discs = 5;
    int hole_max_discs = 15;
    double hole_min_radius = 20.0;
    double hole_max_radius = 50.0;
    double hole_min_area = 0.05;  // fraction of annulus area
    double hole_max_area = 0.25;

    std::vector<std::string> exclude;  // source ids removed by manual review
    unsigned threads = 1;

    void validate() const;
    IrisBoundaries wrapped_boundaries() const;
    IrisBoundaries final_boundaries() const;
};

// Flat "key = value" file; '#' starts a comment. Keys are PipelineConfig
// member names; `exclude` takes a comma-separated list. Unknown keys throw.
void apply_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value);
PipelineConfig load_pipeline_config(const std::filesystem::path& path, PipelineConfig base = {});

// Centre = frame centre; pupil radius = nearest colored pixel, limbic radius =
// farthest colored pixel. Throws InvalidArgument if nothing is colored.
IrisBoundaries approximate_boundaries(const RasterImage& img, int colored_threshold = kDefaultColoredThreshold);

struct CoverageResult {
    bool pass = true;
    int empty_rays = 0;
    std::vector<bool> ray_hits;
};

CoverageResult coverage_gate(const RasterImage& img, const IrisBoundaries& b, const PipelineConfig& cfg = {});

// Boundary-inward mean fill. Each pass assigns every missing sample with at
// least one known 8-neighbour (angular axis wraps) the rounded mean of those
// neighbours, computed from the state before the pass.
PolarStrip inpaint(const PolarStrip& strip, const BinaryMask& missing);

// 0 = blue-grey/green, 1 = light/dark brown.
int label_color_class(const RasterImage& img, const Palette& palette = Palette::iris_default(),
                      int colored_threshold = kDefaultColoredThreshold);

// Deterministic per-(seed, image, variant) disc masks refilled through
// unwrap -> inpaint -> wrap.
std::vector<RasterImage> hole_punch_variants(const RasterImage& img, const IrisBoundaries& b,
                                             const PipelineConfig& cfg, std::uint64_t image_seed);

// output[0] = img; output[k] = img rotated k * step degrees clockwise.
std::vector<RasterImage> augment_rotations(const RasterImage& img, int rotations = 11, double step = 30.0);

std::uint64_t source_seed(const std::string& source_id);

struct ManifestRecord {
    std::string source_id;
    std::string source_path;
    bool survived = false;
    std::string rejection_reason;  // empty when survived
    std::string detail;
    int color_class = -1;
    std::vector<double> color_fractions;
    std::optional<IrisBoundaries> approx_boundaries;
    std::optional<IrisBoundaries> final_boundaries;
    int empty_rays = -1;
    std::vector<std::string> rotation_paths;   // rot_0 (original) .. rot_11
    std::vector<std::string> authentic_paths;  // rot_1..rot_11 then auth_0..auth_29
};

struct DatasetManifest {
    std::vector<ManifestRecord> records;

    std::size_t survivors() const;
};

// Processes every *.png in input_dir (sorted by name) into output_dir and
// writes output_dir/manifest.jsonl. Unreadable files are recorded, not fatal.
DatasetManifest run_pipeline(const std::filesystem::path& input_dir, const std::filesystem::path& output_dir,
                             const PipelineConfig& cfg);

// Steps up to the final frame for one image. Fills record fields; returns the
// final frame or nullopt when rejected.
std::optional<RasterImage> prepare_frame(const RasterImage& img, const PipelineConfig& cfg, ManifestRecord& record);

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& path);

} // namespace irisval
