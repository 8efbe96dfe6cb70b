#include "irisval/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "irisval/imaging.hpp"
#include "irisval/parallel.hpp"
#include "irisval/png_io.hpp"

namespace irisval {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

void PipelineConfig::validate() const
{
    auto positive = [](double v, const char* name) {
        if (!(v > 0)) throw InvalidArgument(std::string("pipeline config: ") + name + " must be positive");
    };
    positive(polar_width, "polar_width");
    positive(polar_height, "polar_height");
    positive(wrapped_size, "wrapped_size");
    positive(wrapped_pupil_radius, "wrapped_pupil_radius");
    positive(wrapped_limbic_radius, "wrapped_limbic_radius");
    positive(final_size, "final_size");
    positive(rotations, "rotations");
    positive(rotation_step, "rotation_step");
    positive(hole_punch_count, "hole_punch_count");
    positive(coverage_rays, "coverage_rays");
    positive(coverage_samples, "coverage_samples");
    positive(hole_min_discs, "hole_min_discs");
    positive(hole_min_radius, "hole_min_radius");
    if (std::abs(rotation_step * (rotations + 1) - 360.0) > 1e-9) {
        throw InvalidArgument("pipeline config: rotation_step * (rotations + 1) must equal 360");
    }
    if (wrapped_pupil_radius >= wrapped_limbic_radius || 2 * wrapped_limbic_radius > wrapped_size) {
        throw InvalidArgument("pipeline config: wrapped radii do not fit the wrapped frame");
    }
    if (hole_max_discs < hole_min_discs || hole_max_radius < hole_min_radius || hole_max_area < hole_min_area
        || hole_min_area < 0 || hole_max_area > 1) {
        throw InvalidArgument("pipeline config: inconsistent hole punch ranges");
    }
    if (coverage_min_fraction < 0 || coverage_min_fraction > 1 || coverage_max_empty < 0) {
        throw InvalidArgument("pipeline config: bad coverage settings");
    }
}

IrisBoundaries PipelineConfig::wrapped_boundaries() const
{
    return centered_boundaries(wrapped_size, wrapped_pupil_radius, wrapped_limbic_radius);
}

IrisBoundaries PipelineConfig::final_boundaries() const
{
    const double s = static_cast<double>(final_size) / wrapped_size;
    return centered_boundaries(final_size, wrapped_pupil_radius * s, wrapped_limbic_radius * s);
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value)
{
    std::istringstream in(value);
    T v{};
    in >> v;
    if (!in || !in.eof()) throw InvalidArgument("pipeline config: bad value for " + key + ": '" + value + "'");
    return v;
}

} // namespace

void apply_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value)
{
    const std::map<std::string, int*> ints = {
        {"polar_width", &cfg.polar_width},         {"polar_height", &cfg.polar_height},
        {"wrapped_size", &cfg.wrapped_size},       {"final_size", &cfg.final_size},
        {"rotations", &cfg.rotations},             {"hole_punch_count", &cfg.hole_punch_count},
        {"colored_pixel_threshold", &cfg.colored_pixel_threshold},
        {"coverage_rays", &cfg.coverage_rays},     {"coverage_samples", &cfg.coverage_samples},
        {"coverage_max_empty", &cfg.coverage_max_empty},
        {"hole_min_discs", &cfg.hole_min_discs},   {"hole_max_discs", &cfg.hole_max_discs},
    };
    const std::map<std::string, double*> doubles = {
        {"wrapped_pupil_radius", &cfg.wrapped_pupil_radius},
        {"wrapped_limbic_radius", &cfg.wrapped_limbic_radius},
        {"rotation_step", &cfg.rotation_step},
        {"coverage_min_fraction", &cfg.coverage_min_fraction},
        {"hole_min_radius", &cfg.hole_min_radius},
        {"hole_max_radius", &cfg.hole_max_radius},
        {"hole_min_area", &cfg.hole_min_area},
        {"hole_max_area", &cfg.hole_max_area},
    };
    if (auto it = ints.find(key); it != ints.end()) {
        *it->second = parse_number<int>(key, value);
    } else if (auto jt = doubles.find(key); jt != doubles.end()) {
        *jt->second = parse_number<double>(key, value);
    } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "threads") {
        cfg.threads = parse_number<unsigned>(key, value);
    } else if (key == "exclude") {
        cfg.exclude.clear();
        std::istringstream in(value);
        std::string id;
        while (std::getline(in, id, ',')) {
            id = trim(id);
            if (!id.empty()) cfg.exclude.push_back(id);
        }
    } else {
        throw InvalidArgument("pipeline config: unknown key '" + key + "'");
    }
}

PipelineConfig load_pipeline_config(const fs::path& path, PipelineConfig base)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        }
        apply_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

// ---------------------------------------------------------------------------
// Steps

IrisBoundaries approximate_boundaries(const RasterImage& img, int colored_threshold)
{
    IrisBoundaries b;
    b.center_x = (img.width() - 1) / 2.0;
    b.center_y = (img.height() - 1) / 2.0;
    double near = std::numeric_limits<double>::infinity();
    double far = -1.0;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (!is_colored(img.pixel(x, y), colored_threshold)) continue;
            const double d = std::hypot(x - b.center_x, y - b.center_y);
            near = std::min(near, d);
            far = std::max(far, d);
        }
    }
    if (far < 0) throw InvalidArgument("approximate_boundaries: no colored pixels");
    b.pupil_radius = near;
    b.limbic_radius = far;
    return b;
}

CoverageResult coverage_gate(const RasterImage& img, const IrisBoundaries& b, const PipelineConfig& cfg)
{
    CoverageResult res;
    const double step = 360.0 / cfg.coverage_rays;
    for (int k = 0; k < cfg.coverage_rays; ++k) {
        const double theta = k * step * std::numbers::pi / 180.0;
        int colored = 0;
        for (int j = 0; j < cfg.coverage_samples; ++j) {
            const double rho =
                b.pupil_radius + (j + 0.5) / cfg.coverage_samples * (b.limbic_radius - b.pupil_radius);
            const long x = std::lround(b.center_x + rho * std::cos(theta));
            const long y = std::lround(b.center_y - rho * std::sin(theta));
            if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) continue;
            if (is_colored(img.pixel(static_cast<int>(x), static_cast<int>(y)), cfg.colored_pixel_threshold)) {
                ++colored;
            }
        }
        const bool hit = colored >= cfg.coverage_min_fraction * cfg.coverage_samples;
        res.ray_hits.push_back(hit);
        if (!hit) ++res.empty_rays;
    }
    res.pass = res.empty_rays <= cfg.coverage_max_empty;
    return res;
}

PolarStrip inpaint(const PolarStrip& strip, const BinaryMask& missing)
{
    const int rows = strip.radial_size();
    const int cols = strip.angular_size();
    if (missing.width() != cols || missing.height() != rows) {
        throw InvalidArgument("inpaint: mask dimensions do not match strip");
    }
    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    if (missing.count() == n) throw InvalidArgument("inpaint: every sample is missing");

    PolarStrip out = strip;
    const int ch = strip.channels();
    std::vector<std::uint8_t> known(n);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) known[static_cast<std::size_t>(r) * cols + c] = !missing.get(c, r);
    }

    auto for_neighbours = [&](int r, int c, auto&& fn) {
        for (int dr = -1; dr <= 1; ++dr) {
            const int rr = r + dr;
            if (rr < 0 || rr >= rows) continue;
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                if (cols == 1 && dc != 0) continue;
                fn(rr, (c + dc + cols) % cols);
            }
        }
    };

    // Frontier: missing samples touching a known one, in row-major order.
    std::vector<std::uint8_t> queued(n, 0);
    std::vector<std::size_t> frontier;
    for (std::size_t i = 0; i < n; ++i) {
        if (known[i]) continue;
        const int r = static_cast<int>(i / cols), c = static_cast<int>(i % cols);
        bool touch = false;
        for_neighbours(r, c, [&](int rr, int cc) { touch = touch || known[static_cast<std::size_t>(rr) * cols + cc]; });
        if (touch) {
            frontier.push_back(i);
            queued[i] = 1;
        }
    }

    std::vector<std::uint8_t> values(static_cast<std::size_t>(ch));
    std::vector<std::uint8_t> pass_values;
    while (!frontier.empty()) {
        std::sort(frontier.begin(), frontier.end());
        pass_values.assign(frontier.size() * ch, 0);
        for (std::size_t f = 0; f < frontier.size(); ++f) {
            const int r = static_cast<int>(frontier[f] / cols), c = static_cast<int>(frontier[f] % cols);
            std::vector<long> sum(ch, 0);
            int count = 0;
            for_neighbours(r, c, [&](int rr, int cc) {
                if (!known[static_cast<std::size_t>(rr) * cols + cc]) return;
                ++count;
                for (int k = 0; k < ch; ++k) sum[k] += out.at(rr, cc, k);
            });
            for (int k = 0; k < ch; ++k) pass_values[f * ch + k] = clamp_round(static_cast<double>(sum[k]) / count);
        }
        std::vector<std::size_t> next;
        for (std::size_t f = 0; f < frontier.size(); ++f) {
            const std::size_t i = frontier[f];
            const int r = static_cast<int>(i / cols), c = static_cast<int>(i % cols);
            for (int k = 0; k < ch; ++k) out.at(r, c, k) = pass_values[f * ch + k];
            known[i] = 1;
        }
        for (std::size_t i : frontier) {
            const int r = static_cast<int>(i / cols), c = static_cast<int>(i % cols);
            for_neighbours(r, c, [&](int rr, int cc) {
                const std::size_t j = static_cast<std::size_t>(rr) * cols + cc;
                if (!known[j] && !queued[j]) {
                    queued[j] = 1;
                    next.push_back(j);
                }
            });
        }
        frontier = std::move(next);
    }
    return out;
}

int label_color_class(const RasterImage& img, const Palette& palette, int colored_threshold)
{
    const ColorComposition c = quantify_colors(img, palette, colored_threshold);
    using namespace palette_index;
    const double cool = c.fractions[blue_grey] + c.fractions[green];
    return cool > 0.5 ? 0 : 1;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c)
{
    std::uint64_t state = a;
    std::uint64_t h = splitmix64(state);
    state ^= b;
    h ^= splitmix64(state);
    state ^= c;
    h ^= splitmix64(state);
    return h;
}

double unit(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

RasterImage punch_one(const RasterImage& img, const IrisBoundaries& b, const PipelineConfig& cfg,
                      std::mt19937_64& rng)
{
    const int w = img.width();
    const int h = img.height();
    const double scale = w / 1024.0;
    const double p2 = b.pupil_radius * b.pupil_radius;
    const double l2 = b.limbic_radius * b.limbic_radius;

    auto in_annulus = [&](int x, int y) {
        const double d2 = (x - b.center_x) * (x - b.center_x) + (y - b.center_y) * (y - b.center_y);
        return d2 >= p2 && d2 <= l2;
    };
    // Pixels within a pixel of either boundary are partly pupil or background
    // after resampling; they are never used as fill sources.
    const double core_p2 = (b.pupil_radius + 1.0) * (b.pupil_radius + 1.0);
    const double core_l2 = (b.limbic_radius - 1.0) * (b.limbic_radius - 1.0);
    auto in_core = [&](int x, int y) {
        const double d2 = (x - b.center_x) * (x - b.center_x) + (y - b.center_y) * (y - b.center_y);
        return d2 >= core_p2 && d2 <= core_l2;
    };
    std::size_t annulus = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) annulus += in_annulus(x, y);
    }

    BinaryMask cleared(w, h);
    bool accepted = false;
    for (int attempt = 0; attempt < 1000 && !accepted; ++attempt) {
        cleared = BinaryMask(w, h);
        const int span = cfg.hole_max_discs - cfg.hole_min_discs + 1;
        const int discs = cfg.hole_min_discs + static_cast<int>(rng() % static_cast<std::uint64_t>(span));
        for (int d = 0; d < discs; ++d) {
            const double rho = std::sqrt(p2 + unit(rng) * (l2 - p2));
            const double theta = 2.0 * std::numbers::pi * unit(rng);
            const double radius =
                scale * (cfg.hole_min_radius + unit(rng) * (cfg.hole_max_radius - cfg.hole_min_radius));
            const double dx = b.center_x + rho * std::cos(theta);
            const double dy = b.center_y - rho * std::sin(theta);
            const int x0 = std::max(0, static_cast<int>(std::floor(dx - radius)));
            const int x1 = std::min(w - 1, static_cast<int>(std::ceil(dx + radius)));
            const int y0 = std::max(0, static_cast<int>(std::floor(dy - radius)));
            const int y1 = std::min(h - 1, static_cast<int>(std::ceil(dy + radius)));
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    if ((x - dx) * (x - dx) + (y - dy) * (y - dy) <= radius * radius && in_annulus(x, y)) {
                        cleared.set(x, y);
                    }
                }
            }
        }
        const double frac = static_cast<double>(cleared.count()) / static_cast<double>(annulus);
        accepted = frac >= cfg.hole_min_area && frac <= cfg.hole_max_area;
    }
    if (!accepted) throw Error("hole_punch_variants: could not draw a mask within the area band");

    RasterImage holed = img;
    RasterImage support(w, h, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (cleared.get(x, y)) {
                for (auto& v : holed.pixel(x, y)) v = 0;
            } else if (in_core(x, y)) {
                support.at(x, y) = 255;
            }
        }
    }

    const int radial = std::max(1, static_cast<int>(std::lround(b.limbic_radius - b.pupil_radius)));
    const int angular = std::max(8, static_cast<int>(std::lround(2.0 * std::numbers::pi * b.limbic_radius)));
    const PolarStrip strip = unwrap_polar(holed, b, radial, angular);
    // A polar sample is known only if every pixel it interpolates from is an
    // intact core pixel.
    const PolarStrip supported = unwrap_polar(support, b, radial, angular);
    BinaryMask missing(angular, radial);
    for (int r = 0; r < radial; ++r) {
        for (int t = 0; t < angular; ++t) {
            if (supported.at(r, t) < 255) missing.set(t, r);
        }
    }
    const RasterImage refill = wrap_cartesian(inpaint(strip, missing), b, w);

    RasterImage out = img;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!cleared.get(x, y)) continue;
            auto src = refill.pixel(x, y);
            std::copy(src.begin(), src.end(), out.pixel(x, y).begin());
        }
    }
    return out;
}

} // namespace

std::vector<RasterImage> hole_punch_variants(const RasterImage& img, const IrisBoundaries& b,
                                             const PipelineConfig& cfg, std::uint64_t image_seed)
{
    if (img.width() != img.height()) throw InvalidArgument("hole_punch_variants: frame must be square");
    validate_boundaries(b, img.width(), img.height());
    std::vector<RasterImage> out;
    out.reserve(cfg.hole_punch_count);
    for (int v = 0; v < cfg.hole_punch_count; ++v) {
        std::mt19937_64 rng(derive_seed(cfg.seed, image_seed, static_cast<std::uint64_t>(v)));
        out.push_back(punch_one(img, b, cfg, rng));
    }
    return out;
}

std::vector<RasterImage> augment_rotations(const RasterImage& img, int rotations, double step)
{
    if (img.width() != img.height()) throw InvalidArgument("augment_rotations: frame must be square");
    std::vector<RasterImage> out;
    out.reserve(rotations + 1);
    out.push_back(img);
    for (int k = 1; k <= rotations; ++k) out.push_back(rotate(img, -step * k));
    return out;
}

std::uint64_t source_seed(const std::string& source_id)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : source_id) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::size_t DatasetManifest::survivors() const
{
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const ManifestRecord& r) { return r.survived; }));
}

// ---------------------------------------------------------------------------
// Orchestration

std::optional<RasterImage> prepare_frame(const RasterImage& input, const PipelineConfig& cfg, ManifestRecord& rec)
{
    auto reject = [&](const std::string& reason, const std::string& detail = {}) -> std::optional<RasterImage> {
        rec.survived = false;
        rec.rejection_reason = reason;
        rec.detail = detail;
        return std::nullopt;
    };

    RasterImage img = input;
    if (img.is_gray()) {
        RasterImage rgb(img.width(), img.height(), 3);
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                for (auto& v : rgb.pixel(x, y)) v = img.at(x, y);
            }
        }
        img = std::move(rgb);
    }

    IrisBoundaries approx;
    try {
        approx = approximate_boundaries(img, cfg.colored_pixel_threshold);
    } catch (const InvalidArgument& e) {
        return reject("no_colored_pixels", e.what());
    }
    rec.approx_boundaries = approx;
    try {
        validate_boundaries(approx, img.width(), img.height());
    } catch (const InvalidArgument& e) {
        return reject("boundaries", e.what());
    }

    const CoverageResult coverage = coverage_gate(img, approx, cfg);
    rec.empty_rays = coverage.empty_rays;
    if (!coverage.pass) {
        return reject("coverage", std::to_string(coverage.empty_rays) + " of " + std::to_string(cfg.coverage_rays)
                                      + " rays miss the iris pattern");
    }

    // Native-density unwrap, then bicubic upscale to the configured strip.
    const int radial = std::max(1, static_cast<int>(std::lround(approx.limbic_radius - approx.pupil_radius)));
    const int angular = std::max(8, static_cast<int>(std::lround(2.0 * std::numbers::pi * approx.limbic_radius)));
    const PolarStrip native = unwrap_polar(img, approx, radial, angular);
    PolarStrip strip(resize(native.image(), cfg.polar_width, cfg.polar_height, Interpolation::bicubic));

    BinaryMask gaps(strip.angular_size(), strip.radial_size());
    for (int r = 0; r < strip.radial_size(); ++r) {
        for (int t = 0; t < strip.angular_size(); ++t) {
            if (!is_colored(strip.image().pixel(t, r), cfg.colored_pixel_threshold)) gaps.set(t, r);
        }
    }
    if (gaps.count() == static_cast<std::size_t>(strip.radial_size()) * strip.angular_size()) {
        return reject("inpaint", "strip holds no iris pattern");
    }
    strip = inpaint(strip, gaps);

    try {
        strip = PolarStrip(white_balance(strip.image()));
    } catch (const InvalidArgument& e) {
        return reject("white_balance", e.what());
    }

    const RasterImage wrapped = wrap_cartesian(strip, cfg.wrapped_boundaries(), cfg.wrapped_size);
    const ColorComposition colours = quantify_colors(wrapped, Palette::iris_default(), cfg.colored_pixel_threshold);
    rec.color_fractions = colours.fractions;
    rec.color_class = label_color_class(wrapped, Palette::iris_default(), cfg.colored_pixel_threshold);

    rec.final_boundaries = cfg.final_boundaries();
    rec.survived = true;
    return resize(wrapped, cfg.final_size, cfg.final_size, Interpolation::area);
}

namespace {

nlohmann::json boundaries_json(const std::optional<IrisBoundaries>& b)
{
    if (!b) return nullptr;
    return {{"center_x", b->center_x}, {"center_y", b->center_y}, {"pupil_radius", b->pupil_radius},
            {"limbic_radius", b->limbic_radius}};
}

std::optional<IrisBoundaries> boundaries_from_json(const nlohmann::json& j)
{
    if (j.is_null()) return std::nullopt;
    return IrisBoundaries{j.at("center_x").get<double>(), j.at("center_y").get<double>(),
                          j.at("pupil_radius").get<double>(), j.at("limbic_radius").get<double>()};
}

} // namespace

DatasetManifest run_pipeline(const fs::path& input_dir, const fs::path& output_dir, const PipelineConfig& cfg)
{
    cfg.validate();
    if (!fs::is_directory(input_dir)) throw Error("input directory not found: " + input_dir.string());

    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(input_dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png") inputs.push_back(entry.path());
    }
    std::sort(inputs.begin(), inputs.end());
    fs::create_directories(output_dir);

    DatasetManifest manifest;
    manifest.records.resize(inputs.size());
    parallel_for(inputs.size(), cfg.threads, [&](std::size_t i) {
        ManifestRecord& rec = manifest.records[i];
        rec.source_id = inputs[i].stem().string();
        rec.source_path = inputs[i].string();
        if (std::find(cfg.exclude.begin(), cfg.exclude.end(), rec.source_id) != cfg.exclude.end()) {
            rec.rejection_reason = "excluded";
            rec.detail = "removed by manual review list";
            return;
        }
        RasterImage img;
        try {
            img = read_png(inputs[i]);
        } catch (const IoError& e) {
            rec.rejection_reason = "unreadable";
            rec.detail = e.what();
            return;
        }
        const auto frame = prepare_frame(img, cfg, rec);
        if (!frame) return;

        const auto rotations = augment_rotations(*frame, cfg.rotations, cfg.rotation_step);
        const auto holes = hole_punch_variants(*frame, *rec.final_boundaries, cfg, source_seed(rec.source_id));

        const fs::path rel_dir = fs::path("class" + std::to_string(rec.color_class)) / rec.source_id;
        fs::create_directories(output_dir / rel_dir);
        for (std::size_t k = 0; k < rotations.size(); ++k) {
            const fs::path rel = rel_dir / ("rot_" + std::to_string(k) + ".png");
            write_png(output_dir / rel, rotations[k]);
            rec.rotation_paths.push_back(rel.generic_string());
        }
        rec.authentic_paths.assign(rec.rotation_paths.begin() + 1, rec.rotation_paths.end());
        for (std::size_t v = 0; v < holes.size(); ++v) {
            const fs::path rel = rel_dir / ("auth_" + std::to_string(v) + ".png");
            write_png(output_dir / rel, holes[v]);
            rec.authentic_paths.push_back(rel.generic_string());
        }
    });

    write_manifest(output_dir / "manifest.jsonl", manifest);
    return manifest;
}

void write_manifest(const fs::path& path, const DatasetManifest& manifest)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot create " + path.string());
    for (const auto& r : manifest.records) {
        const nlohmann::json j = {{"source_id", r.source_id},
                                  {"source_path", r.source_path},
                                  {"survived", r.survived},
                                  {"rejection_reason", r.rejection_reason},
                                  {"detail", r.detail},
                                  {"color_class", r.color_class},
                                  {"color_fractions", r.color_fractions},
                                  {"approx_boundaries", boundaries_json(r.approx_boundaries)},
                                  {"final_boundaries", boundaries_json(r.final_boundaries)},
                                  {"empty_rays", r.empty_rays},
                                  {"rotation_paths", r.rotation_paths},
                                  {"authentic_paths", r.authentic_paths}};
        out << j.dump() << '\n';
    }
}

DatasetManifest read_manifest(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest " + path.string());
    DatasetManifest m;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error("malformed manifest line in " + path.string() + ": " + e.what());
        }
        ManifestRecord r;
        r.source_id = j.at("source_id").get<std::string>();
        r.source_path = j.value("source_path", "");
        r.survived = j.at("survived").get<bool>();
        r.rejection_reason = j.value("rejection_reason", "");
        r.detail = j.value("detail", "");
        r.color_class = j.value("color_class", -1);
        r.color_fractions = j.value("color_fractions", std::vector<double>{});
        r.approx_boundaries = boundaries_from_json(j.value("approx_boundaries", nlohmann::json()));
        r.final_boundaries = boundaries_from_json(j.value("final_boundaries", nlohmann::json()));
        r.empty_rays = j.value("empty_rays", -1);
        r.rotation_paths = j.value("rotation_paths", std::vector<std::string>{});
        r.authentic_paths = j.value("authentic_paths", std::vector<std::string>{});
        m.records.push_back(std::move(r));
    }
    return m;
}

} // namespace irisval
