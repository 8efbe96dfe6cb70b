#include "irisval/image.hpp"

#include <algorithm>
#include <cmath>

namespace irisval {

RasterImage::RasterImage(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels)
{
    if (width < 0 || height < 0 || (channels != 1 && channels != 3)) {
        throw InvalidArgument("RasterImage: bad dimensions or channel count");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

RasterImage::RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data))
{
    if (width < 0 || height < 0 || (channels != 1 && channels != 3)) {
        throw InvalidArgument("RasterImage: bad dimensions or channel count");
    }
    if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
        throw InvalidArgument("RasterImage: data length does not match dimensions");
    }
}

std::size_t BinaryMask::count() const
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

void validate_boundaries(const IrisBoundaries& b, int width, int height)
{
    if (!(b.pupil_radius > 0.0) || !(b.pupil_radius < b.limbic_radius)) {
        throw InvalidArgument("boundaries: require 0 < pupil_radius < limbic_radius");
    }
    const double eps = 1e-9;
    if (b.center_x - b.limbic_radius < -0.5 - eps || b.center_x + b.limbic_radius > width - 0.5 + eps
        || b.center_y - b.limbic_radius < -0.5 - eps
        || b.center_y + b.limbic_radius > height - 0.5 + eps) {
        throw InvalidArgument("boundaries: limbic circle exceeds image extent");
    }
}

IrisBoundaries centered_boundaries(int size, double pupil_radius, double limbic_radius)
{
    const double c = (size - 1) / 2.0;
    return {c, c, pupil_radius, limbic_radius};
}

bool is_colored(std::span<const std::uint8_t> px, int threshold)
{
    return *std::max_element(px.begin(), px.end()) > threshold;
}

std::uint8_t clamp_round(double v)
{
    if (!(v > 0.0)) return 0;
    if (v >= 255.0) return 255;
    return static_cast<std::uint8_t>(std::lround(v));
}

} // namespace irisval
