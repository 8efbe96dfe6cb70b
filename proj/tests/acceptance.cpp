// Acceptance run: one PASS/FAIL line per criterion. Exit status 0 only when
// every criterion passes.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "helpers.hpp"
#include "irisval/color.hpp"
#include "irisval/encoding.hpp"
#include "irisval/imaging.hpp"
#include "irisval/matching.hpp"
#include "irisval/oracles.hpp"
#include "irisval/parallel.hpp"
#include "irisval/pipeline.hpp"
#include "irisval/png_io.hpp"
#include "irisval/segmentation.hpp"
#include "irisval/selftest.hpp"
#include "irisval/synth.hpp"

using namespace irisval;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

IrisCode random_code(std::mt19937_64& rng)
{
    IrisCode c;
    for (int r = 0; r < c.rows(); ++r) {
        for (int k = 0; k < 2 * c.cols(); ++k) c.set_bit(r, k, (rng() >> 63) != 0);
    }
    return c;
}

IrisCode encode_frame(const RasterImage& img) { return encode(normalize(img, segment_iris(img))); }

// Raw frames shaped like the make_synthetic_corpus defaults.
SyntheticIrisOptions raw_options()
{
    SyntheticIrisOptions o;
    o.size = 300;
    o.pupil_radius = 60;
    o.limbic_radius = 125;
    o.specular = true;
    return o;
}

Outcome code_geometry()
{
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const IrisCode c = encode_frame(synthetic_iris(seed));
        ok = ok && c.bit_count() == 32400 && c.packed().size() == 4050
             && serialize_iris_code(c).size() == static_cast<std::size_t>(kCodeFileBytes);
    }
    return {ok, fmt("bits=%d payload=%d bytes", kCodeBits, kCodePayloadBytes)};
}

Outcome counting_identities()
{
    auto stub = [](std::size_t i) {
        IrisCode c(1, 1);
        c.set_cell(0, 0, i & 1, (i >> 1) & 1);
        return c;
    };
    const std::size_t n = 1757;
    std::vector<NamedCode> originals;
    std::vector<std::vector<NamedCode>> variants(n);
    for (std::size_t i = 0; i < n; ++i) {
        originals.push_back({std::to_string(i), stub(i)});
        for (int v = 0; v < 11 + 30; ++v) variants[i].push_back({std::to_string(v), stub(i + v)});
    }
    const HdDistributions d = build_distributions(originals, variants, {worker_count()});
    std::vector<int> per_original(n, 0);
    for (const auto& m : d.authentic) ++per_original[m.a];
    const bool each41 = std::all_of(per_original.begin(), per_original.end(), [](int c) { return c == 41; });

    std::vector<NamedCode> small(originals.begin(), originals.begin() + 50);
    const HdDistributions d50 = build_distributions(small, {}, {1});
    const bool ok = d.imposter.size() == 1542646 && each41 && d50.imposter.size() == 50 * 49 / 2;
    return {ok, fmt("imposter pairs %zu, authentic %zu (41 per original: %s), n=50 -> %zu", d.imposter.size(),
                    d.authentic.size(), each41 ? "yes" : "no", d50.imposter.size())};
}

Outcome rotational_invariance()
{
    double worst_hd = 0.0;
    int worst_shift_err = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const RasterImage img = synthetic_iris(100 + seed);
        const IrisCode base = encode_frame(img);
        const MatchScore m = best_match(base, encode_frame(rotate(img, 30.0)));
        worst_hd = std::max(worst_hd, m.hd);
        worst_shift_err = std::max(worst_shift_err, std::abs(m.best_shift - 30));
    }
    std::mt19937_64 rng(5);
    const IrisCode c = random_code(rng);
    bool exact = true;
    for (int k = 0; k < 360; ++k) exact = exact && best_match(c, shift_code(c, k)).hd == 0.0;
    const bool ok = worst_hd <= 0.15 && worst_shift_err <= 2 && exact;
    return {ok, fmt("worst hd %.4f, worst shift error %d deg, exact shifts %s", worst_hd, worst_shift_err,
                    exact ? "all zero" : "NONZERO")};
}

Outcome order_statistics()
{
    const int pairs = 1000;
    std::vector<double> hd(pairs);
    parallel_for(pairs, worker_count(), [&](std::size_t i) {
        std::mt19937_64 rng(0x5eed0000 + i);
        const IrisCode a = random_code(rng);
        const IrisCode b = random_code(rng);
        hd[i] = best_match(a, b).hd;
    });
    double mean = 0.0;
    for (double v : hd) mean += v;
    mean /= pairs;
    const double expected = oracle::min_of_binomials_mean(kCodeBits, kCodeCols, 2000, 17);
    const bool ok = mean >= 0.485 && mean <= 0.498 && expected >= 0.485 && expected <= 0.498
                    && std::abs(mean - expected) < 0.002;
    return {ok, fmt("mean %.5f, simulated min-of-360-binomials %.5f", mean, expected)};
}

Outcome separation()
{
    const int identities = 100;
    PipelineConfig cfg;
    const SyntheticIrisOptions opts = raw_options();
    std::vector<NamedCode> originals(identities);
    std::vector<std::vector<NamedCode>> variants(identities);
    std::vector<std::string> problems(identities);
    parallel_for(identities, worker_count(), [&](std::size_t i) {
        const std::string id = fmt("iris_%03zu", i);
        ManifestRecord rec;
        const auto frame = prepare_frame(synthetic_iris(1000 + i, opts), cfg, rec);
        if (!frame) {
            problems[i] = id + " rejected (" + rec.rejection_reason + ")";
            return;
        }
        try {
            originals[i] = {id, encode_frame(*frame)};
            const auto rotations = augment_rotations(*frame, cfg.rotations, cfg.rotation_step);
            for (std::size_t k = 1; k < rotations.size(); ++k) {
                variants[i].push_back({"rot_" + std::to_string(k), encode_frame(rotations[k])});
            }
            const auto holes = hole_punch_variants(*frame, *rec.final_boundaries, cfg, source_seed(id));
            for (std::size_t v = 0; v < holes.size(); ++v) {
                variants[i].push_back({"auth_" + std::to_string(v), encode_frame(holes[v])});
            }
        } catch (const std::exception& e) {
            problems[i] = id + ": " + e.what();
        }
    });
    std::size_t failed = 0;
    std::string first;
    for (const auto& p : problems) {
        if (p.empty()) continue;
        if (failed++ == 0) first = p;
    }
    if (failed > 0) return {false, fmt("%zu identities failed, first: %s", failed, first.c_str())};

    const HdDistributions d = build_distributions(originals, variants, {worker_count()});
    const ThresholdReport r = sweep_threshold(d);
    // Coarse text histograms, 0.05 wide, for a visual check of the two modes.
    auto histogram = [](const std::vector<MatchSample>& s) {
        std::vector<int> bins(12, 0);
        for (const auto& m : s) ++bins[std::min<std::size_t>(11, static_cast<std::size_t>(m.hd / 0.05))];
        std::string out;
        for (int b : bins) out += std::to_string(b) + " ";
        return out;
    };
    std::printf("  authentic bins [0,0.6) by 0.05: %s\n", histogram(d.authentic).c_str());
    std::printf("  imposter  bins [0,0.6) by 0.05: %s\n", histogram(d.imposter).c_str());
    const bool ok = d.authentic.size() == 100 * 41 && d.authentic_stats.mean < 0.3 && d.imposter_stats.mean > 0.42
                    && r.chosen_far == 0.0 && r.chosen_frr == 0.0;
    return {ok, fmt("authentic n=%zu mean %.4f max %.4f; imposter n=%zu mean %.4f min %.4f; threshold %.2f "
                    "FAR %.4f FRR %.4f",
                    d.authentic.size(), d.authentic_stats.mean, d.authentic_stats.max, d.imposter.size(),
                    d.imposter_stats.mean, d.imposter_stats.min, r.chosen, r.chosen_far, r.chosen_frr)};
}

Outcome oracle_equivalence()
{
    SelftestOptions o;
    o.seed = 2024;
    o.threads = worker_count();
    o.cases = 200;
    const auto checks = run_oracle_checks(o);
    bool ok = !checks.empty();
    std::string detail;
    for (const auto& c : checks) {
        ok = ok && c.passed();
        detail += fmt("%s %d/%d; ", c.name.c_str(), c.cases - c.mismatches, c.cases);
    }
    return {ok, detail};
}

Outcome geometry_round_trips()
{
    const IrisBoundaries b = centered_boundaries(256, 45, 85);
    double worst_wrap = 0.0;
    for (int ch : {1, 3}) {
        const RasterImage img = smooth_annulus(256, 45, 85, ch);
        const RasterImage back = wrap_cartesian(unwrap_polar(img, b, 40, 534), b, 256);
        worst_wrap = std::max(worst_wrap, testing_support::annulus_mae(img, back, 47.0, 83.0));
    }
    double worst_rot = 0.0;
    bool quarter = true;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const RasterImage iris = synthetic_iris(seed);
        worst_rot = std::max(worst_rot, testing_support::annulus_mae(iris, rotate(rotate(iris, 30), -30), 48.0, 82.0));
        RasterImage r = iris;
        for (int k = 0; k < 4; ++k) r = rotate(r, 90);
        quarter = quarter && r == iris;
    }
    const bool ok = worst_wrap <= 5.0 && worst_rot <= 3.0 && quarter;
    return {ok, fmt("wrap/unwrap MAE %.3f, +-30 deg MAE %.3f, 4x90 exact %s", worst_wrap, worst_rot,
                    quarter ? "yes" : "no")};
}

Outcome compositional_math()
{
    bool uniform_zero = true;
    for (double v : ilr_transform(std::vector<double>{0.25, 0.25, 0.25, 0.25})) uniform_zero = uniform_zero && v == 0.0;

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.001, 1.0);
    auto composition = [&] {
        std::vector<double> v(4);
        double s = 0.0;
        for (auto& x : v) s += (x = u(rng));
        for (auto& x : v) x /= s;
        return v;
    };
    auto log_ratio_distance = [](const std::vector<double>& x, const std::vector<double>& y) {
        // Aitchison distance: sqrt(1/(2D) sum_i sum_j (ln(xi/xj) - ln(yi/yj))^2).
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (std::size_t j = 0; j < x.size(); ++j) {
                const double d = std::log(x[i] / x[j]) - std::log(y[i] / y[j]);
                s += d * d;
            }
        }
        return std::sqrt(s / (2.0 * x.size()));
    };
    double worst_iso = 0.0;
    std::vector<std::vector<double>> ilrs;
    for (int i = 0; i < 500; ++i) {
        const auto x = composition();
        const auto y = composition();
        const auto ix = ilr_transform(x), iy = ilr_transform(y);
        double e = 0.0;
        for (std::size_t k = 0; k < ix.size(); ++k) e += (ix[k] - iy[k]) * (ix[k] - iy[k]);
        worst_iso = std::max(worst_iso, std::abs(std::sqrt(e) - log_ratio_distance(x, y)));
        ilrs.push_back(ix);
    }

    const PcaModel m = pca_fit(ilrs, 3);
    double worst_ortho = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            double dot = 0.0;
            for (std::size_t k = 0; k < 3; ++k) dot += m.components[i][k] * m.components[j][k];
            worst_ortho = std::max(worst_ortho, std::abs(dot - (i == j ? 1.0 : 0.0)));
        }
    }
    double worst_recon = 0.0;
    for (const auto& v : ilrs) {
        const auto back = pca_reconstruct(m, pca_project(m, v));
        for (std::size_t k = 0; k < v.size(); ++k) worst_recon = std::max(worst_recon, std::abs(back[k] - v[k]));
    }
    const bool ok = uniform_zero && worst_iso <= 1e-9 && worst_ortho <= 1e-9 && worst_recon <= 1e-8;
    return {ok, fmt("uniform->0 %s, isometry err %.2e, orthonormality err %.2e, reconstruction err %.2e",
                    uniform_zero ? "exact" : "NO", worst_iso, worst_ortho, worst_recon)};
}

Outcome pipeline_conformance()
{
    testing_support::TempDir in("accept_in");
    testing_support::TempDir out("accept_out");
    const int count = 10;
    for (int i = 0; i < count; ++i) {
        SyntheticIrisOptions o = raw_options();
        if (i == count - 1) {
            o.wedge_from_deg = -5.0;
            o.wedge_to_deg = 95.0;
        }
        write_png(in.path() / fmt("iris_%03d.png", i), synthetic_iris(1 + i, o));
    }
    PipelineConfig cfg;
    cfg.threads = worker_count();
    const DatasetManifest m = run_pipeline(in.path(), out.path(), cfg);

    const ManifestRecord& wedged = m.records.back();
    const bool rejected = !wedged.survived && wedged.rejection_reason == "coverage" && wedged.empty_rays >= 4;
    std::vector<fs::path> frames;
    bool twelve = true;
    for (const auto& r : m.records) {
        if (!r.survived) continue;
        twelve = twelve && r.rotation_paths.size() == 12;
        for (const auto& p : r.rotation_paths) frames.push_back(out.path() / p);
        for (std::size_t k = 11; k < r.authentic_paths.size(); ++k) frames.push_back(out.path() / r.authentic_paths[k]);
    }
    std::vector<int> seg_ok(frames.size(), 0);
    parallel_for(frames.size(), worker_count(), [&](std::size_t i) {
        try {
            const IrisBoundaries b = segment_iris(read_png(frames[i]));
            seg_ok[i] = std::abs(b.pupil_radius - 45) <= 3 && std::abs(b.limbic_radius - 85) <= 3;
        } catch (const Error&) {
        }
    });
    const auto segmented = std::count(seg_ok.begin(), seg_ok.end(), 1);
    const bool ok = rejected && twelve && m.survivors() == count - 1 && segmented == static_cast<long>(frames.size());
    return {ok, fmt("survivors %zu of %d, wedged frame %s (%d empty rays), 12 rotations each %s, "
                    "%ld of %zu final frames segment at 45/85 +-3",
                    m.survivors(), count, rejected ? "rejected" : "NOT rejected", wedged.empty_rays,
                    twelve ? "yes" : "no", static_cast<long>(segmented), frames.size())};
}

Outcome performance_floor()
{
    std::mt19937_64 rng(99);
    std::vector<NamedCode> codes;
    for (int i = 0; i < 100; ++i) codes.push_back({std::to_string(i), random_code(rng)});
    const auto t0 = std::chrono::steady_clock::now();
    const HdDistributions d = build_distributions(codes, {}, {1});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {d.imposter.size() == 4950 && secs < 60.0,
            fmt("4950 pairs x 360 shifts in %.2f s single-threaded", secs)};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"code geometry", code_geometry},
        {"counting identities", counting_identities},
        {"rotational invariance", rotational_invariance},
        {"order statistics", order_statistics},
        {"separation pipeline", separation},
        {"oracle equivalence", oracle_equivalence},
        {"geometry round trips", geometry_round_trips},
        {"compositional math", compositional_math},
        {"pipeline conformance", pipeline_conformance},
        {"performance floor", performance_floor},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
