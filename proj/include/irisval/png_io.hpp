#pragma once

#include <filesystem>

#include "irisval/image.hpp"

namespace irisval {

class IoError : public Error {
public:
    using Error::Error;
};

// Loads 8-bit (or 16-bit, reduced) gray, gray+alpha, RGB or RGBA PNG.
// Alpha is composited over black. Gray stays 1 channel; colour becomes RGB.
RasterImage read_png(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const RasterImage& img);

} // namespace irisval
