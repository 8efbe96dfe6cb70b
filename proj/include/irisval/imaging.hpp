#pragma once

#include "irisval/image.hpp"

namespace irisval {

// ITU-R 601 luma: round(0.299 R + 0.587 G + 0.114 B).
RasterImage to_grayscale(const RasterImage& img);

// Bilinear sample at continuous pixel coordinates; coordinates outside the
// frame are clamped to the nearest edge pixel.
double sample_bilinear(const RasterImage& img, double x, double y, int channel);

// Cartesian annulus -> polar strip. Angle is measured counterclockwise as
// displayed (x right, y down), starting from the +x axis. Sample radius for
// row r is pupil + (r + 0.5) / radial * (limbic - pupil).
PolarStrip unwrap_polar(const RasterImage& img, const IrisBoundaries& b, int radial, int angular);

// Inverse of unwrap_polar onto an out_size x out_size black canvas. Pixels
// whose centre radius falls outside [pupil, limbic] stay 0.
RasterImage wrap_cartesian(const PolarStrip& strip, const IrisBoundaries& b, int out_size);

// Neutralises the colour cast of the brightest 1% of non-black pixels.
// Requires at least 100 non-black pixels.
RasterImage white_balance(const RasterImage& img);

// Rotation about the frame centre, counterclockwise as displayed for positive
// degrees. Multiples of 90 degrees take an exact permutation path; other
// angles use bilinear resampling with black outside the source.
RasterImage rotate(const RasterImage& img, double degrees);

struct ClaheParams {
    double clip_limit = 2.0;
    int tiles_x = 8;
    int tiles_y = 1;
};

RasterImage clahe(const RasterImage& img, const ClaheParams& params = {});

enum class Interpolation { bilinear, bicubic, area };

RasterImage resize(const RasterImage& img, int out_w, int out_h, Interpolation method);

// Circular shift of columns: out(x) = in((x - shift) mod width).
RasterImage roll_columns(const RasterImage& img, int shift);

} // namespace irisval
