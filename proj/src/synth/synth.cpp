#include "irisval/synth.hpp"

#include <cmath>
#include <numbers>

#include "irisval/color.hpp"

namespace irisval {

namespace {

std::uint64_t mix(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double lattice(std::uint64_t seed, int octave, int i, int j)
{
    std::uint64_t h = mix(seed);
    h = mix(h ^ static_cast<std::uint64_t>(octave));
    h = mix(h ^ static_cast<std::uint32_t>(i));
    h = mix(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(j)) << 32));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

struct Octave {
    int radial_cells;
    int angular_cells;
    double weight;
};

constexpr Octave kOctaves[] = {{4, 24, 1.0}, {8, 48, 0.9}, {16, 96, 0.5}};

} // namespace

double synthetic_texture(std::uint64_t seed, double u, double theta)
{
    double a = theta / (2.0 * std::numbers::pi);
    a -= std::floor(a);
    double total = 0.0;
    double weight = 0.0;
    int o = 0;
    for (const Octave& oct : kOctaves) {
        const double fr = std::clamp(u, 0.0, 1.0) * oct.radial_cells;
        const double fa = a * oct.angular_cells;
        const int r0 = static_cast<int>(std::floor(fr));
        const int a0 = static_cast<int>(std::floor(fa));
        const double tr = smooth(fr - r0);
        const double ta = smooth(fa - a0);
        const int a1 = (a0 + 1) % oct.angular_cells;
        const double v00 = lattice(seed, o, r0, a0 % oct.angular_cells);
        const double v01 = lattice(seed, o, r0, a1);
        const double v10 = lattice(seed, o, r0 + 1, a0 % oct.angular_cells);
        const double v11 = lattice(seed, o, r0 + 1, a1);
        const double v = (v00 * (1 - ta) + v01 * ta) * (1 - tr) + (v10 * (1 - ta) + v11 * ta) * tr;
        total += oct.weight * v;
        weight += oct.weight;
        ++o;
    }
    // Sums of value noise crowd the middle; stretch back towards [0, 1].
    const double t = (total / weight - 0.5) * 2.2 + 0.5;
    return std::clamp(t, 0.0, 1.0);
}

RasterImage synthetic_iris(std::uint64_t seed, const SyntheticIrisOptions& opts)
{
    if (!(opts.pupil_radius > 0) || !(opts.limbic_radius > opts.pupil_radius)) {
        throw InvalidArgument("synthetic_iris: bad radii");
    }
    std::array<std::uint8_t, 3> base{};
    if (opts.base_color) {
        base = *opts.base_color;
    } else {
        const auto& palette = Palette::iris_default();
        base = palette.entry(mix(seed ^ 0x5151) % palette.size()).rgb;
    }
    // Lift dark bases so the texture keeps some gray-level range.
    const double lift = std::max(1.0, 150.0 / std::max({base[0], base[1], base[2]}));

    const double c = (opts.size - 1) / 2.0;
    const double spec_angle = 2.0 * std::numbers::pi * lattice(seed, 99, 0, 0);
    const double spec_rho = 0.5 * (opts.pupil_radius + opts.limbic_radius);
    const double spec_x = c + spec_rho * std::cos(spec_angle);
    const double spec_y = c - spec_rho * std::sin(spec_angle);
    const double spec_r = 0.1 * (opts.limbic_radius - opts.pupil_radius) + 1.0;

    RasterImage img(opts.size, opts.size, 3);
    for (int y = 0; y < opts.size; ++y) {
        for (int x = 0; x < opts.size; ++x) {
            const double dx = x - c;
            const double dy = c - y;
            const double rho = std::hypot(dx, dy);
            if (rho < opts.pupil_radius || rho > opts.limbic_radius) continue;
            double theta = std::atan2(dy, dx);
            if (theta < 0) theta += 2.0 * std::numbers::pi;
            if (opts.wedge_from_deg != opts.wedge_to_deg) {
                const double deg = theta * 180.0 / std::numbers::pi;
                const double from = std::fmod(std::fmod(opts.wedge_from_deg, 360.0) + 360.0, 360.0);
                const double span = opts.wedge_to_deg - opts.wedge_from_deg;
                const double off = std::fmod(deg - from + 360.0, 360.0);
                if (off <= span) continue;
            }
            auto px = img.pixel(x, y);
            if (opts.specular && std::hypot(x - spec_x, y - spec_y) <= spec_r) {
                px[0] = px[1] = px[2] = 250;
                continue;
            }
            const double u = (rho - opts.pupil_radius) / (opts.limbic_radius - opts.pupil_radius);
            const double t = synthetic_texture(seed, u, theta);
            const double k = opts.min_brightness + (opts.max_brightness - opts.min_brightness) * t;
            for (int ch = 0; ch < 3; ++ch) px[ch] = clamp_round(base[ch] * lift * k);
        }
    }
    return img;
}

RasterImage smooth_annulus(int size, double pupil_radius, double limbic_radius, int channels)
{
    RasterImage img(size, size, channels);
    const double c = (size - 1) / 2.0;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double rho = std::hypot(x - c, c - y);
            if (rho < pupil_radius || rho > limbic_radius) continue;
            const double theta = std::atan2(c - y, x - c);
            const double u = (rho - pupil_radius) / (limbic_radius - pupil_radius);
            for (int ch = 0; ch < channels; ++ch) {
                const double v = 130.0 + 60.0 * std::sin(3.0 * theta + ch) + 40.0 * std::cos(std::numbers::pi * u);
                img.at(x, y, ch) = clamp_round(v);
            }
        }
    }
    return img;
}

} // namespace irisval
