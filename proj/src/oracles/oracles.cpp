#include "irisval/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace irisval::oracle {

int otsu_exhaustive(const RasterImage& gray)
{
    if (!gray.is_gray() || gray.empty()) throw InvalidArgument("otsu_exhaustive: need a non-empty gray image");
    if (static_cast<long>(gray.width()) * gray.height() > 256L * 256L) {
        throw InvalidArgument("otsu_exhaustive: frame too large for exact arithmetic");
    }
    using u128 = unsigned __int128;
    // Best score so far as num/den with num = (n1*S0 - n0*S1)^2, den = n0*n1.
    u128 best_num = 0;
    u128 best_den = 1;
    int best = -1;
    for (int t = 0; t < 256; ++t) {
        std::int64_t n0 = 0, n1 = 0, s0 = 0, s1 = 0;
        for (std::uint8_t v : gray.data()) {
            if (v <= t) {
                ++n0;
                s0 += v;
            } else {
                ++n1;
                s1 += v;
            }
        }
        if (n0 == 0 || n1 == 0) continue;
        const std::int64_t diff = n1 * s0 - n0 * s1;
        const u128 mag = static_cast<u128>(diff < 0 ? -diff : diff);
        const u128 num = mag * mag;
        const u128 den = static_cast<u128>(n0) * static_cast<u128>(n1);
        if (best < 0 || num * best_den > best_num * den) {
            best_num = num;
            best_den = den;
            best = t;
        }
    }
    if (best < 0) return gray.data()[0];
    return best;
}

namespace {

Circle from_two(std::pair<double, double> a, std::pair<double, double> b)
{
    const double cx = (a.first + b.first) / 2.0;
    const double cy = (a.second + b.second) / 2.0;
    return {cx, cy, std::hypot(a.first - cx, a.second - cy)};
}

bool from_three(std::pair<double, double> a, std::pair<double, double> b, std::pair<double, double> c, Circle& out)
{
    const double ax = a.first, ay = a.second;
    const double bx = b.first, by = b.second;
    const double cx = c.first, cy = c.second;
    const double d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    if (std::abs(d) < 1e-12) return false;
    const double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    const double ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    const double uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    out = {ux, uy, std::max({std::hypot(ax - ux, ay - uy), std::hypot(bx - ux, by - uy), std::hypot(cx - ux, cy - uy)})};
    return true;
}

bool contains_all(const Circle& c, const std::vector<std::pair<double, double>>& pts)
{
    const double slack = 1e-9 * std::max(1.0, c.radius);
    for (const auto& p : pts) {
        if (std::hypot(p.first - c.cx, p.second - c.cy) > c.radius + slack) return false;
    }
    return true;
}

} // namespace

Circle enclosing_circle_bruteforce(const std::vector<std::pair<double, double>>& points)
{
    if (points.empty()) throw InvalidArgument("enclosing_circle_bruteforce: no points");
    if (points.size() == 1) return {points[0].first, points[0].second, 0.0};
    Circle best{0, 0, std::numeric_limits<double>::infinity()};
    const std::size_t n = points.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Circle c = from_two(points[i], points[j]);
            if (c.radius < best.radius && contains_all(c, points)) best = c;
            for (std::size_t k = j + 1; k < n; ++k) {
                Circle t;
                if (from_three(points[i], points[j], points[k], t) && t.radius < best.radius && contains_all(t, points)) {
                    best = t;
                }
            }
        }
    }
    return best;
}

int shifted_differing_bits(const IrisCode& a, const IrisCode& b, int shift)
{
    const int rows = a.rows(), cols = a.cols();
    // Re-layout b as a plain 2-D grid of (re, im) pairs, rotate the grid, compare.
    std::vector<std::vector<std::pair<bool, bool>>> grid(rows, std::vector<std::pair<bool, bool>>(cols));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) grid[r][c] = {b.real_bit(r, c), b.imag_bit(r, c)};
    }
    for (auto& row : grid) {
        const int s = ((shift % cols) + cols) % cols;
        std::rotate(row.begin(), row.begin() + s, row.end());
    }
    int diff = 0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            diff += a.real_bit(r, c) != grid[r][c].first;
            diff += a.imag_bit(r, c) != grid[r][c].second;
        }
    }
    return diff;
}

NaiveMatch best_match_naive(const IrisCode& a, const IrisCode& b)
{
    NaiveMatch best{std::numeric_limits<int>::max(), 0};
    for (int s = 0; s < a.cols(); ++s) {
        const int d = shifted_differing_bits(a, b, s);
        if (d < best.differing_bits) best = {d, s};
    }
    return best;
}

std::vector<std::complex<double>> log_gabor_dft(const std::vector<double>& signal, const GaborParams& p)
{
    const int n = static_cast<int>(signal.size());
    double mean = 0.0;
    for (double v : signal) mean += v;
    mean /= n;

    std::vector<std::complex<double>> spectrum(n);
    for (int k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (int m = 0; m < n; ++m) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) * m / n;
            acc += (signal[m] - mean) * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        spectrum[k] = acc;
    }
    const double f0 = 1.0 / p.wavelength;
    const double denom = 2.0 * std::pow(std::log(p.sigma_over_f), 2);
    for (int k = 0; k < n; ++k) {
        double g = 0.0;
        if (k >= 1 && 2 * k <= n) {
            const double f = static_cast<double>(k) / n;
            g = std::exp(-std::pow(std::log(f / f0), 2) / denom);
        }
        spectrum[k] *= g;
    }
    std::vector<std::complex<double>> out(n);
    for (int m = 0; m < n; ++m) {
        std::complex<double> acc = 0.0;
        for (int k = 0; k < n; ++k) {
            const double ang = 2.0 * std::numbers::pi * static_cast<double>(k) * m / n;
            acc += spectrum[k] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[m] = acc / static_cast<double>(n);
    }
    return out;
}

RasterImage clahe_reference(const RasterImage& gray, const ClaheParams& params)
{
    const int w = gray.width(), h = gray.height();
    const int tx = params.tiles_x, ty = params.tiles_y;
    std::vector<int> xs(tx + 1), ys(ty + 1);
    for (int i = 0; i <= tx; ++i) xs[i] = static_cast<int>(static_cast<long long>(i) * w / tx);
    for (int j = 0; j <= ty; ++j) ys[j] = static_cast<int>(static_cast<long long>(j) * h / ty);

    // mapping[tile][v]
    std::vector<std::vector<int>> mapping;
    for (int j = 0; j < ty; ++j) {
        for (int i = 0; i < tx; ++i) {
            std::vector<int> hist(256, 0);
            for (int y = ys[j]; y < ys[j + 1]; ++y) {
                for (int x = xs[i]; x < xs[i + 1]; ++x) hist[gray.at(x, y)] += 1;
            }
            const int area = (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
            int clip = static_cast<int>(params.clip_limit * area / 256.0);
            if (clip < 1) clip = 1;
            int excess = 0;
            for (int v = 0; v < 256; ++v) {
                if (hist[v] > clip) {
                    excess += hist[v] - clip;
                    hist[v] = clip;
                }
            }
            // Uniform share to every bin, leftovers one by one at a fixed stride.
            const int each = excess / 256;
            const int left = excess % 256;
            for (int v = 0; v < 256; ++v) hist[v] += each;
            if (left != 0) {
                const int stride = std::max(1, 256 / left);
                int given = 0;
                for (int v = 0; v < 256 && given < left; v += stride) {
                    hist[v] += 1;
                    ++given;
                }
            }
            std::vector<int> lut(256);
            long long running = 0;
            for (int v = 0; v < 256; ++v) {
                running += hist[v];
                lut[v] = clamp_round(static_cast<double>(running) * 255.0 / area);
            }
            mapping.push_back(lut);
        }
    }

    auto centre = [](const std::vector<int>& e, int i) { return (e[i] + e[i + 1] - 1) / 2.0; };
    // Weight of tile i for coordinate p: tent between neighbouring centres,
    // flat beyond the outermost centres.
    auto weights = [&](const std::vector<int>& e, int tiles, double p) {
        std::vector<double> wt(tiles, 0.0);
        if (p <= centre(e, 0)) {
            wt[0] = 1.0;
        } else if (p >= centre(e, tiles - 1)) {
            wt[tiles - 1] = 1.0;
        } else {
            for (int i = 0; i + 1 < tiles; ++i) {
                const double a = centre(e, i), b = centre(e, i + 1);
                if (p >= a && p < b) {
                    wt[i + 1] = (p - a) / (b - a);
                    wt[i] = 1.0 - wt[i + 1];
                }
            }
        }
        return wt;
    };

    RasterImage out(w, h, 1);
    for (int y = 0; y < h; ++y) {
        const auto wy = weights(ys, ty, y);
        for (int x = 0; x < w; ++x) {
            const auto wx = weights(xs, tx, x);
            const int v = gray.at(x, y);
            // Blend horizontally within each tile row, then vertically.
            double acc = 0.0;
            for (int j = 0; j < ty; ++j) {
                if (wy[j] == 0.0) continue;
                double row = 0.0;
                for (int i = 0; i < tx; ++i) {
                    if (wx[i] != 0.0) row += wx[i] * mapping[static_cast<std::size_t>(j) * tx + i][v];
                }
                acc += wy[j] * row;
            }
            out.at(x, y) = clamp_round(acc);
        }
    }
    return out;
}

double min_of_binomials_mean(int bits, int shifts, int trials, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::binomial_distribution<int> draw(bits, 0.5);
    double total = 0.0;
    for (int t = 0; t < trials; ++t) {
        int lowest = bits;
        for (int s = 0; s < shifts; ++s) lowest = std::min(lowest, draw(rng));
        total += static_cast<double>(lowest) / bits;
    }
    return total / trials;
}

int empty_rays(const RasterImage& img, const IrisBoundaries& b, int rays, int samples, double min_fraction,
               int colored_threshold)
{
    int empty = 0;
    for (int k = 0; k < rays; ++k) {
        const double deg = 360.0 * k / rays;
        const double rad = deg * std::numbers::pi / 180.0;
        int hits = 0;
        for (int j = 0; j < samples; ++j) {
            const double rho = b.pupil_radius + (b.limbic_radius - b.pupil_radius) * (j + 0.5) / samples;
            const double fx = b.center_x + rho * std::cos(rad);
            const double fy = b.center_y - rho * std::sin(rad);
            const int x = static_cast<int>(std::floor(fx + 0.5));
            const int y = static_cast<int>(std::floor(fy + 0.5));
            if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) continue;
            int brightest = 0;
            for (int c = 0; c < img.channels(); ++c) brightest = std::max<int>(brightest, img.at(x, y, c));
            hits += brightest > colored_threshold;
        }
        if (hits < min_fraction * samples) ++empty;
    }
    return empty;
}

} // namespace irisval::oracle
