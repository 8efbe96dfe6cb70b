#include "irisval/selftest.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "irisval/encoding.hpp"
#include "irisval/matching.hpp"
#include "irisval/oracles.hpp"
#include "irisval/parallel.hpp"
#include "irisval/segmentation.hpp"

namespace irisval {

namespace {

IrisCode random_code(std::mt19937_64& rng)
{
    IrisCode c;
    for (int r = 0; r < c.rows(); ++r) {
        for (int k = 0; k < 2 * c.cols(); ++k) c.set_bit(r, k, (rng() >> 63) != 0);
    }
    return c;
}

// Gray image with a few random modes so every split level gets exercised.
RasterImage random_gray(std::mt19937_64& rng)
{
    const int w = 8 + static_cast<int>(rng() % 57);
    const int h = 8 + static_cast<int>(rng() % 57);
    const int modes = 1 + static_cast<int>(rng() % 4);
    std::vector<int> centre(modes), spread(modes);
    for (int m = 0; m < modes; ++m) {
        centre[m] = static_cast<int>(rng() % 256);
        spread[m] = static_cast<int>(rng() % 40);
    }
    RasterImage img(w, h, 1);
    for (auto& v : img.data()) {
        const int m = static_cast<int>(rng() % modes);
        const int d = spread[m] == 0 ? 0 : static_cast<int>(rng() % (2 * spread[m] + 1)) - spread[m];
        v = static_cast<std::uint8_t>(std::clamp(centre[m] + d, 0, 255));
    }
    return img;
}

template <typename Check>
OracleCheck run_cases(const std::string& name, int cases, std::uint64_t seed, std::uint64_t salt, unsigned threads,
                      Check&& check)
{
    OracleCheck result{name, cases, 0, {}};
    std::vector<std::string> failures(cases);
    parallel_for(static_cast<std::size_t>(cases), threads, [&](std::size_t i) {
        std::seed_seq sequence{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(i)};
        std::mt19937_64 rng(sequence);
        failures[i] = check(rng);
    });
    for (int i = 0; i < cases; ++i) {
        if (failures[i].empty()) continue;
        if (result.mismatches++ == 0) result.first_failure = "case " + std::to_string(i) + ": " + failures[i];
    }
    return result;
}

} // namespace

std::vector<OracleCheck> run_oracle_checks(const SelftestOptions& opts)
{
    std::vector<OracleCheck> checks;
    const int n = std::max(1, opts.cases);

    checks.push_back(run_cases("otsu_vs_exhaustive_scan", n, opts.seed, 1, opts.threads, [](std::mt19937_64& rng) {
        const RasterImage img = random_gray(rng);
        const OtsuResult fast = otsu_threshold(img);
        const int slow = oracle::otsu_exhaustive(img);
        if (fast.level == slow) return std::string();
        return "otsu " + std::to_string(fast.level) + " vs scan " + std::to_string(slow);
    }));

    checks.push_back(run_cases("welzl_vs_bruteforce", n, opts.seed, 2, opts.threads, [](std::mt19937_64& rng) {
        const int count = 1 + static_cast<int>(rng() % 30);
        std::uniform_real_distribution<double> coord(-100.0, 100.0);
        std::vector<std::pair<double, double>> pts;
        const bool lattice = rng() % 4 == 0;
        for (int i = 0; i < count; ++i) {
            double x = coord(rng), y = coord(rng);
            if (lattice) {
                x = std::round(x / 10.0);
                y = std::round(y / 10.0);
            }
            pts.emplace_back(x, y);
        }
        const Circle fast = min_enclosing_circle(std::span<const std::pair<double, double>>(pts));
        const Circle slow = oracle::enclosing_circle_bruteforce(pts);
        const double err = std::abs(fast.radius - slow.radius);
        if (err <= 1e-9 * std::max(1.0, slow.radius)) return std::string();
        std::ostringstream s;
        s.precision(17);
        s << "radius " << fast.radius << " vs " << slow.radius;
        return s.str();
    }));

    checks.push_back(run_cases("shifted_hamming_vs_relayout", std::max(1, n / 4), opts.seed, 3, opts.threads,
                               [](std::mt19937_64& rng) {
        const IrisCode a = random_code(rng);
        IrisCode b = a;
        // Mix of unrelated, lightly perturbed and exactly shifted partners.
        const int kind = static_cast<int>(rng() % 3);
        if (kind == 0) {
            b = random_code(rng);
        } else {
            b = shift_code(a, static_cast<int>(rng() % 360));
            if (kind == 2) {
                for (int f = 0; f < 500; ++f) {
                    const int r = static_cast<int>(rng() % 45), k = static_cast<int>(rng() % 720);
                    b.set_bit(r, k, !b.bit(r, k));
                }
            }
        }
        const int s = static_cast<int>(rng() % 360);
        const int direct = differing_bits(a, shift_code(b, s));
        const int naive = oracle::shifted_differing_bits(a, b, s);
        if (direct != naive) return "shift " + std::to_string(s) + ": " + std::to_string(direct) + " vs " + std::to_string(naive);
        const MatchScore fast = best_match(a, b);
        const oracle::NaiveMatch slow = oracle::best_match_naive(a, b);
        if (fast.differing_bits != slow.differing_bits || fast.best_shift != slow.best_shift) {
            return "best_match " + std::to_string(fast.differing_bits) + "@" + std::to_string(fast.best_shift) + " vs "
                   + std::to_string(slow.differing_bits) + "@" + std::to_string(slow.best_shift);
        }
        return std::string();
    }));

    checks.push_back(run_cases("log_gabor_vs_direct_dft", std::max(1, n / 10), opts.seed, 4, opts.threads,
                               [](std::mt19937_64& rng) {
        std::vector<double> row(360);
        std::uniform_real_distribution<double> v(0.0, 255.0);
        for (double& x : row) x = v(rng);
        const auto fast = log_gabor_row(row);
        const auto slow = oracle::log_gabor_dft(row, GaborParams{});
        double worst = 0.0;
        for (std::size_t i = 0; i < row.size(); ++i) worst = std::max(worst, std::abs(fast[i] - slow[i]));
        if (worst <= 1e-9) return std::string();
        return "max deviation " + std::to_string(worst);
    }));

    checks.push_back(run_cases("clahe_vs_reference", std::max(1, n / 10), opts.seed, 5, opts.threads,
                               [](std::mt19937_64& rng) {
        RasterImage img = random_gray(rng);
        const ClaheParams p{0.5 + static_cast<double>(rng() % 40) / 10.0, 1 + static_cast<int>(rng() % 4),
                            1 + static_cast<int>(rng() % 3)};
        if (img.width() < p.tiles_x || img.height() < p.tiles_y) return std::string();
        if (clahe(img, p) == oracle::clahe_reference(img, p)) return std::string();
        return std::string("output differs");
    }));

    return checks;
}

bool run_selftest(const SelftestOptions& opts, std::ostream& out)
{
    bool ok = true;
    for (const auto& c : run_oracle_checks(opts)) {
        out << (c.passed() ? "PASS " : "FAIL ") << c.name << " (" << c.cases - c.mismatches << "/" << c.cases
            << " agree)";
        if (!c.passed()) out << " " << c.first_failure;
        out << '\n';
        ok = ok && c.passed();
    }
    return ok;
}

} // namespace irisval
