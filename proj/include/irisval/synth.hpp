#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "irisval/image.hpp"

namespace irisval {

// Procedural iris-on-black frames for tests, benchmarks and demo corpora.
// Texture is multi-octave value noise on a polar lattice that wraps in angle,
// so it depends only on the seed and not on frame size or iris radii.
struct SyntheticIrisOptions {
    int size = 256;
    double pupil_radius = 45.0;
    double limbic_radius = 85.0;
    std::optional<std::array<std::uint8_t, 3>> base_color;  // default: picked from the seed
    double min_brightness = 0.45;
    double max_brightness = 1.0;
    bool specular = false;  // white catchlight inside the iris
    // Black wedge, degrees counterclockwise from +x; empty when from == to.
    double wedge_from_deg = 0.0;
    double wedge_to_deg = 0.0;
};

// Texture value in [0, 1] at normalised radius u in [0, 1] and angle theta
// (radians).
double synthetic_texture(std::uint64_t seed, double u, double theta);

RasterImage synthetic_iris(std::uint64_t seed, const SyntheticIrisOptions& opts = {});

// Annulus whose intensity varies slowly with angle and radius; used for
// resampling round-trip checks.
RasterImage smooth_annulus(int size, double pupil_radius, double limbic_radius, int channels = 1);

} // namespace irisval
