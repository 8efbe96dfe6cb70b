#include "irisval/imaging.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

namespace irisval {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double wrap_degrees(double deg)
{
    double d = std::fmod(deg, 360.0);
    if (d < 0) d += 360.0;
    return d;
}

// Weights for one output coordinate along one axis.
struct AxisTaps {
    std::vector<int> index;
    std::vector<double> weight;
};

double catmull_rom(double t)
{
    constexpr double a = -0.5;
    t = std::abs(t);
    if (t < 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

std::vector<AxisTaps> axis_taps(int in, int out, Interpolation method)
{
    std::vector<AxisTaps> taps(out);
    const double scale = static_cast<double>(in) / out;
    for (int d = 0; d < out; ++d) {
        AxisTaps& t = taps[d];
        if (method == Interpolation::area) {
            const double lo = d * scale;
            const double hi = (d + 1) * scale;
            for (int s = static_cast<int>(std::floor(lo)); s < hi && s < in; ++s) {
                const double overlap = std::min(hi, s + 1.0) - std::max(lo, static_cast<double>(s));
                if (overlap > 0) {
                    t.index.push_back(s);
                    t.weight.push_back(overlap / scale);
                }
            }
            continue;
        }
        const double src = (d + 0.5) * scale - 0.5;
        const int base = static_cast<int>(std::floor(src));
        const double frac = src - base;
        if (method == Interpolation::bilinear) {
            t.index = {std::clamp(base, 0, in - 1), std::clamp(base + 1, 0, in - 1)};
            t.weight = {1.0 - frac, frac};
        } else {
            for (int k = -1; k <= 2; ++k) {
                t.index.push_back(std::clamp(base + k, 0, in - 1));
                t.weight.push_back(catmull_rom(frac - k));
            }
        }
    }
    return taps;
}

} // namespace

RasterImage to_grayscale(const RasterImage& img)
{
    if (!img.is_rgb()) {
        throw InvalidArgument("to_grayscale: expected a 3-channel image");
    }
    RasterImage out(img.width(), img.height(), 1);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            auto p = img.pixel(x, y);
            out.at(x, y) = clamp_round(0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]);
        }
    }
    return out;
}

double sample_bilinear(const RasterImage& img, double x, double y, int channel)
{
    x = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
    y = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, img.width() - 1);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = (1 - fx) * img.at(x0, y0, channel) + fx * img.at(x1, y0, channel);
    const double bot = (1 - fx) * img.at(x0, y1, channel) + fx * img.at(x1, y1, channel);
    return (1 - fy) * top + fy * bot;
}

PolarStrip unwrap_polar(const RasterImage& img, const IrisBoundaries& b, int radial, int angular)
{
    if (radial < 1 || angular < 1) {
        throw InvalidArgument("unwrap_polar: radial and angular sizes must be >= 1");
    }
    validate_boundaries(b, img.width(), img.height());
    PolarStrip strip(radial, angular, img.channels());
    const double band = b.limbic_radius - b.pupil_radius;
    for (int t = 0; t < angular; ++t) {
        const double theta = t * (360.0 / angular) * kDegToRad;
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (int r = 0; r < radial; ++r) {
            const double rho = b.pupil_radius + (r + 0.5) / radial * band;
            const double x = b.center_x + rho * c;
            const double y = b.center_y - rho * s;
            for (int ch = 0; ch < img.channels(); ++ch) {
                strip.at(r, t, ch) = clamp_round(sample_bilinear(img, x, y, ch));
            }
        }
    }
    return strip;
}

RasterImage wrap_cartesian(const PolarStrip& strip, const IrisBoundaries& b, int out_size)
{
    validate_boundaries(b, out_size, out_size);
    const int radial = strip.radial_size();
    const int angular = strip.angular_size();
    if (radial < 1 || angular < 1) {
        throw InvalidArgument("wrap_cartesian: empty strip");
    }
    RasterImage out(out_size, out_size, strip.channels());
    const double band = b.limbic_radius - b.pupil_radius;
    const double cols_per_degree = angular / 360.0;
    for (int y = 0; y < out_size; ++y) {
        for (int x = 0; x < out_size; ++x) {
            const double dx = x - b.center_x;
            const double dy = y - b.center_y;
            const double rho = std::hypot(dx, dy);
            if (rho < b.pupil_radius || rho > b.limbic_radius) continue;
            const double rpos = std::clamp((rho - b.pupil_radius) / band * radial - 0.5, 0.0,
                                           static_cast<double>(radial - 1));
            double tpos = wrap_degrees(std::atan2(-dy, dx) / kDegToRad) * cols_per_degree;
            if (tpos >= angular) tpos -= angular;
            const int r0 = static_cast<int>(std::floor(rpos));
            const int r1 = std::min(r0 + 1, radial - 1);
            const int t0 = static_cast<int>(std::floor(tpos)) % angular;
            const int t1 = (t0 + 1) % angular;
            const double fr = rpos - r0;
            const double ft = tpos - std::floor(tpos);
            for (int ch = 0; ch < strip.channels(); ++ch) {
                const double a = (1 - ft) * strip.at(r0, t0, ch) + ft * strip.at(r0, t1, ch);
                const double c = (1 - ft) * strip.at(r1, t0, ch) + ft * strip.at(r1, t1, ch);
                out.at(x, y, ch) = clamp_round((1 - fr) * a + fr * c);
            }
        }
    }
    return out;
}

RasterImage white_balance(const RasterImage& img)
{
    if (!img.is_rgb()) {
        throw InvalidArgument("white_balance: expected a 3-channel image");
    }
    struct Ranked {
        int sum;
        std::size_t index;
    };
    std::vector<Ranked> lit;
    const std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
    auto data = img.data();
    for (std::size_t i = 0; i < n; ++i) {
        const int s = data[3 * i] + data[3 * i + 1] + data[3 * i + 2];
        if (s > 0) lit.push_back({s, i});
    }
    if (lit.size() < 100) {
        throw InvalidArgument("white_balance: fewer than 100 non-black pixels");
    }
    const std::size_t top = lit.size() / 100;
    std::partial_sort(lit.begin(), lit.begin() + top, lit.end(), [](const Ranked& a, const Ranked& b) {
        return a.sum != b.sum ? a.sum > b.sum : a.index < b.index;
    });

    std::array<double, 3> mean{};
    for (std::size_t k = 0; k < top; ++k) {
        for (int c = 0; c < 3; ++c) mean[c] += data[3 * lit[k].index + c];
    }
    for (double& m : mean) m /= static_cast<double>(top);
    const double gray = (mean[0] + mean[1] + mean[2]) / 3.0;
    std::array<double, 3> gain{};
    for (int c = 0; c < 3; ++c) gain[c] = mean[c] > 0 ? gray / mean[c] : 1.0;

    RasterImage out = img;
    auto od = out.data();
    for (std::size_t i = 0; i < od.size(); ++i) od[i] = clamp_round(od[i] * gain[i % 3]);
    return out;
}

RasterImage rotate(const RasterImage& img, double degrees)
{
    if (img.width() != img.height()) {
        throw InvalidArgument("rotate: image must be square");
    }
    const int n = img.width();
    const double quarter = degrees / 90.0;
    if (std::abs(quarter - std::round(quarter)) < 1e-12) {
        const int k = ((static_cast<int>(std::llround(quarter)) % 4) + 4) % 4;
        if (k == 0) return img;
        RasterImage out(n, n, img.channels());
        for (int y = 0; y < n; ++y) {
            for (int x = 0; x < n; ++x) {
                int sx = x, sy = y;
                switch (k) {
                case 1: sx = n - 1 - y; sy = x; break;
                case 2: sx = n - 1 - x; sy = n - 1 - y; break;
                case 3: sx = y; sy = n - 1 - x; break;
                }
                auto src = img.pixel(sx, sy);
                std::copy(src.begin(), src.end(), out.pixel(x, y).begin());
            }
        }
        return out;
    }

    const double c = (n - 1) / 2.0;
    const double cs = std::cos(degrees * kDegToRad);
    const double sn = std::sin(degrees * kDegToRad);
    RasterImage out(n, n, img.channels());
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double dx = x - c;
            const double dy = y - c;
            const double sx = c + dx * cs - dy * sn;
            const double sy = c + dx * sn + dy * cs;
            if (sx < -0.5 || sy < -0.5 || sx > n - 0.5 || sy > n - 0.5) continue;
            for (int ch = 0; ch < img.channels(); ++ch) {
                out.at(x, y, ch) = clamp_round(sample_bilinear(img, sx, sy, ch));
            }
        }
    }
    return out;
}

RasterImage clahe(const RasterImage& img, const ClaheParams& params)
{
    if (!img.is_gray()) {
        throw InvalidArgument("clahe: expected a grayscale image");
    }
    const int w = img.width();
    const int h = img.height();
    const int tx = params.tiles_x;
    const int ty = params.tiles_y;
    if (tx < 1 || ty < 1 || w < tx || h < ty || !(params.clip_limit > 0.0)) {
        throw InvalidArgument("clahe: degenerate tile grid or clip limit");
    }

    auto edge = [](int i, int size, int tiles) { return static_cast<int>(static_cast<long long>(i) * size / tiles); };

    std::vector<std::array<std::uint8_t, 256>> luts(static_cast<std::size_t>(tx) * ty);
    for (int j = 0; j < ty; ++j) {
        for (int i = 0; i < tx; ++i) {
            const int x0 = edge(i, w, tx), x1 = edge(i + 1, w, tx);
            const int y0 = edge(j, h, ty), y1 = edge(j + 1, h, ty);
            const int area = (x1 - x0) * (y1 - y0);
            std::array<int, 256> hist{};
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) ++hist[img.at(x, y)];
            }
            const int limit = std::max(1, static_cast<int>(params.clip_limit * area / 256.0));
            int excess = 0;
            for (int& v : hist) {
                if (v > limit) {
                    excess += v - limit;
                    v = limit;
                }
            }
            const int batch = excess / 256;
            int residual = excess - batch * 256;
            for (int& v : hist) v += batch;
            if (residual > 0) {
                const int step = std::max(256 / residual, 1);
                for (int k = 0; k < 256 && residual > 0; k += step, --residual) ++hist[k];
            }
            auto& lut = luts[static_cast<std::size_t>(j) * tx + i];
            long long cdf = 0;
            for (int v = 0; v < 256; ++v) {
                cdf += hist[v];
                lut[v] = clamp_round(cdf * 255.0 / area);
            }
        }
    }

    // Tile centres and per-coordinate blending neighbours.
    auto blend_axis = [&](int size, int tiles) {
        std::vector<double> centre(tiles);
        for (int i = 0; i < tiles; ++i) centre[i] = (edge(i, size, tiles) + edge(i + 1, size, tiles) - 1) / 2.0;
        struct Pair {
            int lo, hi;
            double t;
        };
        std::vector<Pair> out(size);
        for (int p = 0; p < size; ++p) {
            if (p <= centre.front()) {
                out[p] = {0, 0, 0.0};
            } else if (p >= centre.back()) {
                out[p] = {tiles - 1, tiles - 1, 0.0};
            } else {
                int i = 0;
                while (p >= centre[i + 1]) ++i;
                out[p] = {i, i + 1, (p - centre[i]) / (centre[i + 1] - centre[i])};
            }
        }
        return out;
    };
    const auto bx = blend_axis(w, tx);
    const auto by = blend_axis(h, ty);

    RasterImage out(w, h, 1);
    for (int y = 0; y < h; ++y) {
        const auto& vy = by[y];
        for (int x = 0; x < w; ++x) {
            const auto& vx = bx[x];
            const int v = img.at(x, y);
            const double l00 = luts[static_cast<std::size_t>(vy.lo) * tx + vx.lo][v];
            const double l01 = luts[static_cast<std::size_t>(vy.lo) * tx + vx.hi][v];
            const double l10 = luts[static_cast<std::size_t>(vy.hi) * tx + vx.lo][v];
            const double l11 = luts[static_cast<std::size_t>(vy.hi) * tx + vx.hi][v];
            const double top = (1 - vx.t) * l00 + vx.t * l01;
            const double bot = (1 - vx.t) * l10 + vx.t * l11;
            out.at(x, y) = clamp_round((1 - vy.t) * top + vy.t * bot);
        }
    }
    return out;
}

RasterImage resize(const RasterImage& img, int out_w, int out_h, Interpolation method)
{
    if (out_w < 1 || out_h < 1) {
        throw InvalidArgument("resize: output dimensions must be >= 1");
    }
    if (out_w == img.width() && out_h == img.height()) return img;
    if (img.empty()) {
        throw InvalidArgument("resize: empty source image");
    }
    const auto tx = axis_taps(img.width(), out_w, method);
    const auto ty = axis_taps(img.height(), out_h, method);
    const int ch = img.channels();

    // Separable: horizontal pass into doubles, then vertical pass.
    std::vector<double> mid(static_cast<std::size_t>(out_w) * img.height() * ch);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < out_w; ++x) {
            for (int c = 0; c < ch; ++c) {
                double acc = 0;
                for (std::size_t k = 0; k < tx[x].index.size(); ++k) acc += tx[x].weight[k] * img.at(tx[x].index[k], y, c);
                mid[(static_cast<std::size_t>(y) * out_w + x) * ch + c] = acc;
            }
        }
    }
    RasterImage out(out_w, out_h, ch);
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            for (int c = 0; c < ch; ++c) {
                double acc = 0;
                for (std::size_t k = 0; k < ty[y].index.size(); ++k) {
                    acc += ty[y].weight[k] * mid[(static_cast<std::size_t>(ty[y].index[k]) * out_w + x) * ch + c];
                }
                out.at(x, y, c) = clamp_round(acc);
            }
        }
    }
    return out;
}

RasterImage roll_columns(const RasterImage& img, int shift)
{
    const int w = img.width();
    if (w == 0) return img;
    const int s = ((shift % w) + w) % w;
    RasterImage out(w, img.height(), img.channels());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < w; ++x) {
            auto src = img.pixel((x - s + w) % w, y);
            std::copy(src.begin(), src.end(), out.pixel(x, y).begin());
        }
    }
    return out;
}

} // namespace irisval
