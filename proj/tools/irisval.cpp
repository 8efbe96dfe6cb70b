#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irisval/color.hpp"
#include "irisval/encoding.hpp"
#include "irisval/iris_code.hpp"
#include "irisval/matching.hpp"
#include "irisval/parallel.hpp"
#include "irisval/pipeline.hpp"
#include "irisval/png_io.hpp"
#include "irisval/segmentation.hpp"
#include "irisval/selftest.hpp"

namespace fs = std::filesystem;
using namespace irisval;

namespace {

enum ExitCode : int {
    kOk = 0,
    kSelftestFailed = 1,
    kUsage = 2,
    kEmptyResult = 3,
    kInsufficientData = 4,
};

struct Globals {
    std::uint64_t seed = 0;
    bool seed_given = false;
    unsigned threads = 1;
    bool threads_given = false;
    fs::path out = "out";
    bool verbose = false;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void info(const Globals& g, const std::string& msg)
{
    if (g.verbose) std::cerr << msg << '\n';
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

std::vector<fs::path> files_with_extension(const fs::path& dir, const std::string& ext, bool recursive)
{
    if (!fs::is_directory(dir)) throw UsageError("not a readable directory: " + dir.string());
    std::vector<fs::path> out;
    auto keep = [&](const fs::directory_entry& e) {
        if (!e.is_regular_file()) return;
        std::string x = e.path().extension().string();
        std::transform(x.begin(), x.end(), x.begin(), [](unsigned char c) { return std::tolower(c); });
        if (x == ext) out.push_back(e.path());
    };
    if (recursive) {
        for (const auto& e : fs::recursive_directory_iterator(dir)) keep(e);
    } else {
        for (const auto& e : fs::directory_iterator(dir)) keep(e);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<NamedCode> load_codes(const fs::path& dir)
{
    std::vector<NamedCode> codes;
    for (const auto& p : files_with_extension(dir, ".icode", false)) {
        codes.push_back({p.stem().string(), read_iris_code(p)});
    }
    return codes;
}

// ---------------------------------------------------------------------------
// preprocess

struct PreprocessArgs {
    fs::path input_dir;
    fs::path config_file;
    std::vector<std::string> exclude;
};

int cmd_preprocess(const Globals& g, const PreprocessArgs& a)
{
    if (!fs::is_directory(a.input_dir)) throw UsageError("input directory not readable: " + a.input_dir.string());
    PipelineConfig cfg;
    if (!a.config_file.empty()) cfg = load_pipeline_config(a.config_file, cfg);
    if (g.seed_given) cfg.seed = g.seed;
    if (g.threads_given) cfg.threads = g.threads;
    if (!a.exclude.empty()) cfg.exclude = a.exclude;
    cfg.validate();

    const DatasetManifest m = run_pipeline(a.input_dir, g.out, cfg);
    for (const auto& r : m.records) {
        if (r.survived) {
            info(g, r.source_id + ": class " + std::to_string(r.color_class));
        } else {
            std::cerr << r.source_id << ": rejected (" << r.rejection_reason << ") " << r.detail << '\n';
        }
    }
    std::cout << "preprocess: " << m.records.size() << " inputs, " << m.survivors() << " survivors, manifest "
              << (g.out / "manifest.jsonl").string() << '\n';
    return m.survivors() > 0 ? kOk : kEmptyResult;
}

// ---------------------------------------------------------------------------
// segment

struct SegmentArgs {
    std::vector<fs::path> images;
    BoundarySpec spec;
};

int cmd_segment(const Globals& g, const SegmentArgs& a)
{
    for (const auto& p : a.images) {
        if (!fs::exists(p)) throw UsageError("image not found: " + p.string());
    }
    struct Row {
        std::string status;
        IrisBoundaries b;
    };
    std::vector<Row> rows(a.images.size());
    parallel_for(a.images.size(), g.threads, [&](std::size_t i) {
        try {
            rows[i].b = segment_iris(read_png(a.images[i]), a.spec);
            rows[i].status = "ok";
        } catch (const SegmentationError& e) {
            rows[i].status = to_string(e.reason());
        } catch (const IoError&) {
            rows[i].status = "unreadable";
        }
    });

    fs::create_directories(g.out);
    const fs::path csv = g.out / "segmentation.csv";
    std::ofstream out(csv);
    if (!out) throw Error("cannot create " + csv.string());
    out << "image,status,center_x,center_y,pupil_radius,limbic_radius\n";
    std::size_t ok = 0;
    char buf[160];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f,%.4f", r.b.center_x, r.b.center_y, r.b.pupil_radius,
                      r.b.limbic_radius);
        out << a.images[i].string() << ',' << r.status << ',' << (r.status == "ok" ? buf : ",,,") << '\n';
        if (r.status == "ok") {
            ++ok;
        } else {
            std::cerr << a.images[i].string() << ": " << r.status << '\n';
        }
    }
    std::cout << "segment: " << ok << " of " << rows.size() << " segmented\n";
    return ok > 0 ? kOk : kInsufficientData;
}

// ---------------------------------------------------------------------------
// encode

struct EncodeArgs {
    std::vector<fs::path> images;
    fs::path manifest;
    BoundarySpec spec;
};

struct EncodeJob {
    fs::path image;
    fs::path output;     // relative to the output dir
    std::string original;  // set for variants
};

int cmd_encode(const Globals& g, const EncodeArgs& a)
{
    if (a.images.empty() == a.manifest.empty()) throw UsageError("encode: give either image paths or --manifest");

    std::vector<EncodeJob> jobs;
    if (!a.manifest.empty()) {
        if (!fs::exists(a.manifest)) throw UsageError("manifest not found: " + a.manifest.string());
        const DatasetManifest m = read_manifest(a.manifest);
        const fs::path base = a.manifest.parent_path();
        for (const auto& r : m.records) {
            if (!r.survived || r.rotation_paths.empty()) continue;
            jobs.push_back({base / r.rotation_paths.front(), fs::path("reference") / (r.source_id + ".icode"), {}});
            for (const auto& v : r.authentic_paths) {
                const std::string name = r.source_id + "__" + fs::path(v).stem().string() + ".icode";
                jobs.push_back({base / v, fs::path("variants") / name, r.source_id});
            }
        }
    } else {
        for (const auto& p : a.images) {
            if (!fs::exists(p)) throw UsageError("image not found: " + p.string());
            jobs.push_back({p, fs::path("reference") / (p.stem().string() + ".icode"), {}});
        }
    }

    std::vector<std::string> failure(jobs.size());
    parallel_for(jobs.size(), g.threads, [&](std::size_t i) {
        try {
            const RasterImage img = read_png(jobs[i].image);
            const IrisBoundaries b = segment_iris(img, a.spec);
            const IrisCode code = encode(normalize(img, b));
            fs::create_directories((g.out / jobs[i].output).parent_path());
            write_iris_code(g.out / jobs[i].output, code);
        } catch (const SegmentationError& e) {
            failure[i] = e.what();
        } catch (const IoError& e) {
            failure[i] = std::string("unreadable: ") + e.what();
        }
    });

    std::size_t ok = 0;
    std::ofstream map;
    if (!a.manifest.empty()) {
        fs::create_directories(g.out);
        map.open(g.out / "authentic_map.csv");
        if (!map) throw Error("cannot create " + (g.out / "authentic_map.csv").string());
        map << "original_id,variant_path\n";
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!failure[i].empty()) {
            std::cerr << jobs[i].image.string() << ": skipped, " << failure[i] << '\n';
            continue;
        }
        ++ok;
        info(g, jobs[i].image.string() + " -> " + (g.out / jobs[i].output).string());
        if (map.is_open() && !jobs[i].original.empty()) {
            map << jobs[i].original << ',' << jobs[i].output.generic_string() << '\n';
        }
    }
    std::cout << "encode: " << ok << " of " << jobs.size() << " encoded\n";
    return ok > 0 ? kOk : kInsufficientData;
}

// ---------------------------------------------------------------------------
// validate

struct ValidateArgs {
    fs::path reference_dir;
    fs::path authentic_map;
};

int cmd_validate(const Globals& g, const ValidateArgs& a)
{
    const std::vector<NamedCode> originals = load_codes(a.reference_dir);
    if (originals.size() < 2) {
        std::cerr << "validate: need at least 2 reference codes, found " << originals.size() << '\n';
        return kInsufficientData;
    }
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < originals.size(); ++i) index[originals[i].id] = i;

    std::vector<std::vector<NamedCode>> variants(originals.size());
    if (!a.authentic_map.empty()) {
        std::ifstream in(a.authentic_map);
        if (!in) throw UsageError("cannot read authentic map " + a.authentic_map.string());
        const fs::path base = a.authentic_map.parent_path();
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos) throw UsageError("malformed authentic map line: " + line);
            const std::string id = line.substr(0, comma);
            fs::path p = line.substr(comma + 1);
            if (p.is_relative()) p = base / p;
            auto it = index.find(id);
            if (it == index.end()) {
                warn("authentic map names unknown original '" + id + "'");
                continue;
            }
            variants[it->second].push_back({p.stem().string(), read_iris_code(p)});
        }
    }

    const HdDistributions d = build_distributions(originals, variants, {g.threads});
    fs::create_directories(g.out);
    write_distributions_csv(g.out / "distributions.csv", d, originals, variants);
    std::cout << "validate: " << d.imposter.size() << " imposter, " << d.authentic.size() << " authentic samples\n";
    std::printf("  imposter mean %.4f sd %.4f min %.4f max %.4f\n", d.imposter_stats.mean, d.imposter_stats.sd,
                d.imposter_stats.min, d.imposter_stats.max);
    if (d.authentic_empty) {
        std::cerr << "validate: no authentic samples; threshold sweep skipped\n";
        return kInsufficientData;
    }
    std::printf("  authentic mean %.4f sd %.4f min %.4f max %.4f\n", d.authentic_stats.mean, d.authentic_stats.sd,
                d.authentic_stats.min, d.authentic_stats.max);
    const ThresholdReport r = sweep_threshold(d);
    write_threshold_csv(g.out / "threshold.csv", r);
    write_threshold_summary_json(g.out / "threshold_summary.json", r);
    std::printf("  chosen threshold %.2f far %.6f frr %.6f\n", r.chosen, r.chosen_far, r.chosen_frr);
    return kOk;
}

// ---------------------------------------------------------------------------
// screen

struct ScreenArgs {
    fs::path candidate_dir;
    fs::path reference_dir;
    double criterion = 0.4;
};

int cmd_screen(const Globals& g, const ScreenArgs& a)
{
    if (!(a.criterion > 0.0 && a.criterion < 1.0)) throw UsageError("--criterion must lie strictly between 0 and 1");
    const auto candidates = load_codes(a.candidate_dir);
    const auto reference = load_codes(a.reference_dir);
    if (candidates.empty() || reference.empty()) {
        std::cerr << "screen: candidate and reference directories must both hold .icode files\n";
        return kInsufficientData;
    }
    const UniquenessReport r = uniqueness_screen(candidates, reference, a.criterion, {g.threads});
    fs::create_directories(g.out);
    write_uniqueness_csv(g.out / "uniqueness.csv", r);
    std::cout << "screen: " << r.passed << " passed, " << r.failed << " failed at criterion " << a.criterion << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// coloranalysis

struct ColorArgs {
    fs::path set_a;
    fs::path set_b;
    double bin_width = kDefaultBinWidth;
    std::size_t components = 3;
    int colored_threshold = kDefaultColoredThreshold;
};

struct ColorSet {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> ilr;
};

ColorSet analyse_set(const Globals& g, const fs::path& dir, int threshold)
{
    const auto files = files_with_extension(dir, ".png", true);
    ColorSet s;
    s.ids.resize(files.size());
    s.ilr.resize(files.size());
    std::vector<std::string> failure(files.size());
    parallel_for(files.size(), g.threads, [&](std::size_t i) {
        fs::path rel = fs::relative(files[i], dir);
        rel.replace_extension();
        s.ids[i] = rel.generic_string();
        try {
            s.ilr[i] = ilr_transform(quantify_colors(read_png(files[i]), Palette::iris_default(), threshold));
        } catch (const Error& e) {
            failure[i] = e.what();
        }
    });
    ColorSet kept;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!failure[i].empty()) {
            std::cerr << files[i].string() << ": skipped, " << failure[i] << '\n';
            continue;
        }
        kept.ids.push_back(s.ids[i]);
        kept.ilr.push_back(s.ilr[i]);
    }
    return kept;
}

int cmd_coloranalysis(const Globals& g, const ColorArgs& a)
{
    const ColorSet set_a = analyse_set(g, a.set_a, a.colored_threshold);
    if (set_a.ids.empty()) {
        std::cerr << "coloranalysis: set A holds no usable images\n";
        return kInsufficientData;
    }
    std::optional<ColorSet> set_b;
    if (!a.set_b.empty()) set_b = analyse_set(g, a.set_b, a.colored_threshold);

    std::vector<std::string> ids = set_a.ids;
    std::vector<std::string> labels(set_a.ids.size(), "A");
    std::vector<std::vector<double>> all = set_a.ilr;
    if (set_b) {
        ids.insert(ids.end(), set_b->ids.begin(), set_b->ids.end());
        labels.insert(labels.end(), set_b->ids.size(), "B");
        all.insert(all.end(), set_b->ilr.begin(), set_b->ilr.end());
    }

    fs::create_directories(g.out);
    write_ilr_csv(g.out / "ilr.csv", ids, all);
    if (all.size() >= 2) {
        const PcaModel model = pca_fit(all, std::min(a.components, all.front().size()));
        std::vector<std::vector<double>> coords;
        coords.reserve(all.size());
        for (const auto& v : all) coords.push_back(pca_project(model, v));
        write_pca_csv(g.out / "pca.csv", ids, labels, coords);
    } else {
        warn("fewer than 2 compositions; pca.csv not written");
    }
    write_histogram_csv(g.out / "hist_intra.csv", distance_analysis(set_a.ilr, a.bin_width));
    if (set_b && !set_b->ilr.empty()) {
        write_histogram_csv(g.out / "hist_inter.csv", distance_analysis(set_a.ilr, set_b->ilr, a.bin_width));
    }
    std::cout << "coloranalysis: " << set_a.ids.size() << " images in set A";
    if (set_b) std::cout << ", " << set_b->ids.size() << " in set B";
    std::cout << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"irisval: iris code encoding, matching and dataset validation"};
    app.fallthrough();
    app.require_subcommand(1);
    Globals g;
    auto* seed_opt = app.add_option("--seed", g.seed, "Seed for randomised steps")->capture_default_str();
    auto* threads_opt = app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_flag("-v,--verbose", g.verbose, "Log per-item progress");

    PreprocessArgs pre;
    auto* c_pre = app.add_subcommand("preprocess", "Build a training-style dataset from iris-on-black images");
    c_pre->add_option("input_dir", pre.input_dir)->required();
    c_pre->add_option("--config", pre.config_file, "key = value pipeline configuration");
    c_pre->add_option("--exclude", pre.exclude, "Source ids to drop (manual review)")->delimiter(',');

    SegmentArgs seg;
    auto* c_seg = app.add_subcommand("segment", "Locate pupil and limbic circles");
    c_seg->add_option("images", seg.images)->required();
    c_seg->add_option("--pupil", seg.spec.expected_pupil_radius)->capture_default_str();
    c_seg->add_option("--limbic", seg.spec.expected_limbic_radius)->capture_default_str();
    c_seg->add_option("--tolerance", seg.spec.tolerance)->capture_default_str();
    c_seg->add_option("--max-offset", seg.spec.max_center_offset)->capture_default_str();

    EncodeArgs enc;
    auto* c_enc = app.add_subcommand("encode", "Write .icode files for images or a preprocess manifest");
    c_enc->add_option("images", enc.images);
    c_enc->add_option("--manifest", enc.manifest, "manifest.jsonl written by preprocess");
    c_enc->add_option("--pupil", enc.spec.expected_pupil_radius)->capture_default_str();
    c_enc->add_option("--limbic", enc.spec.expected_limbic_radius)->capture_default_str();
    c_enc->add_option("--tolerance", enc.spec.tolerance)->capture_default_str();

    ValidateArgs val;
    auto* c_val = app.add_subcommand("validate", "Authentic/imposter distributions and threshold sweep");
    c_val->add_option("reference_dir", val.reference_dir)->required();
    c_val->add_option("authentic_map", val.authentic_map, "CSV original_id,variant_path");

    ScreenArgs scr;
    auto* c_scr = app.add_subcommand("screen", "Check candidate codes for uniqueness against references");
    c_scr->add_option("candidate_dir", scr.candidate_dir)->required();
    c_scr->add_option("reference_dir", scr.reference_dir)->required();
    c_scr->add_option("--criterion", scr.criterion, "Fail when min HD is below this")->capture_default_str();

    ColorArgs col;
    auto* c_col = app.add_subcommand("coloranalysis", "Palette composition, ILR, PCA and distance histograms");
    c_col->add_option("set_a", col.set_a)->required();
    c_col->add_option("set_b", col.set_b);
    c_col->add_option("--bin-width", col.bin_width)->capture_default_str();
    c_col->add_option("--components", col.components)->capture_default_str();

    SelftestOptions st;
    auto* c_st = app.add_subcommand("selftest", "Compare production code against brute-force oracles");
    c_st->add_option("--cases", st.cases, "Random cases per oracle")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    g.seed_given = seed_opt->count() > 0;
    g.threads_given = threads_opt->count() > 0;

    try {
        if (*c_pre) return cmd_preprocess(g, pre);
        if (*c_seg) return cmd_segment(g, seg);
        if (*c_enc) return cmd_encode(g, enc);
        if (*c_val) return cmd_validate(g, val);
        if (*c_scr) return cmd_screen(g, scr);
        if (*c_col) return cmd_coloranalysis(g, col);
        if (*c_st) {
            st.seed = g.seed;
            st.threads = g.threads;
            st.verbose = g.verbose;
            return run_selftest(st, std::cout) ? kOk : kSelftestFailed;
        }
    } catch (const std::exception& e) {
        // Bad paths, malformed inputs and invalid settings all land here.
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
