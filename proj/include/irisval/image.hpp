#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace irisval {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// 8-bit raster, row-major, channel-interleaved. channels is 1 (gray) or 3 (RGB).
class RasterImage {
public:
    RasterImage() = default;
    RasterImage(int width, int height, int channels, std::uint8_t fill = 0);
    RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }
    bool is_gray() const { return channels_ == 1; }
    bool is_rgb() const { return channels_ == 3; }

    std::uint8_t& at(int x, int y, int c = 0)
    {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    std::uint8_t at(int x, int y, int c = 0) const
    {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    std::span<std::uint8_t> pixel(int x, int y)
    {
        return {data_.data() + (static_cast<std::size_t>(y) * width_ + x) * channels_,
                static_cast<std::size_t>(channels_)};
    }
    std::span<const std::uint8_t> pixel(int x, int y) const
    {
        return {data_.data() + (static_cast<std::size_t>(y) * width_ + x) * channels_,
                static_cast<std::size_t>(channels_)};
    }

    std::span<std::uint8_t> data() { return data_; }
    std::span<const std::uint8_t> data() const { return data_; }

    bool operator==(const RasterImage&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

// Concentric pupil/limbic circles. Coordinates are in pixel units with pixel
// (x, y) centred at (x, y); the centre of a w x h frame is ((w-1)/2, (h-1)/2).
struct IrisBoundaries {
    double center_x = 0.0;
    double center_y = 0.0;
    double pupil_radius = 0.0;
    double limbic_radius = 0.0;

    bool operator==(const IrisBoundaries&) const = default;
};

// Throws InvalidArgument unless 0 < pupil < limbic and the limbic circle lies
// inside the pixel extent of a width x height frame.
void validate_boundaries(const IrisBoundaries& b, int width, int height);

// Boundaries centred in a size x size frame.
IrisBoundaries centered_boundaries(int size, double pupil_radius, double limbic_radius);

// Rectangular polar representation of an annulus. Row 0 is the pupillary
// edge, the last row the limbic edge; column c covers angle c * 360/angular.
class PolarStrip {
public:
    PolarStrip() = default;
    explicit PolarStrip(RasterImage pixels) : pixels_(std::move(pixels)) {}
    PolarStrip(int radial, int angular, int channels, std::uint8_t fill = 0)
        : pixels_(angular, radial, channels, fill)
    {
    }

    int radial_size() const { return pixels_.height(); }
    int angular_size() const { return pixels_.width(); }
    int channels() const { return pixels_.channels(); }

    std::uint8_t& at(int r, int theta, int c = 0) { return pixels_.at(theta, r, c); }
    std::uint8_t at(int r, int theta, int c = 0) const { return pixels_.at(theta, r, c); }

    const RasterImage& image() const { return pixels_; }
    RasterImage& image() { return pixels_; }

    bool operator==(const PolarStrip&) const = default;

private:
    RasterImage pixels_;
};

// One flag per pixel, row-major.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false)
        : width_(width), height_(height), bits_(static_cast<std::size_t>(width) * height, fill ? 1 : 0)
    {
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool get(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set(int x, int y, bool v = true) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }
    std::size_t count() const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

// Any pixel whose brightest channel exceeds this is "colored" (iris pattern
// rather than background).
inline constexpr int kDefaultColoredThreshold = 10;

bool is_colored(std::span<const std::uint8_t> px, int threshold = kDefaultColoredThreshold);

// Round half away from zero, clipped to [0, 255].
std::uint8_t clamp_round(double v);

} // namespace irisval
