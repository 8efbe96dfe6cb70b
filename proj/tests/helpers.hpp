#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "irisval/image.hpp"

namespace testing_support {

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("irisval_" + tag + "_" + std::to_string(rd()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline irisval::RasterImage random_image(int w, int h, int channels, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    irisval::RasterImage img(w, h, channels);
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng() & 0xff);
    return img;
}

// Mean absolute difference over pixels whose centre radius lies in [lo, hi].
inline double annulus_mae(const irisval::RasterImage& a, const irisval::RasterImage& b, double lo, double hi)
{
    const double c = (a.width() - 1) / 2.0;
    double total = 0.0;
    long n = 0;
    for (int y = 0; y < a.height(); ++y) {
        for (int x = 0; x < a.width(); ++x) {
            const double r = std::hypot(x - c, y - c);
            if (r < lo || r > hi) continue;
            for (int ch = 0; ch < a.channels(); ++ch) {
                total += std::abs(int(a.at(x, y, ch)) - int(b.at(x, y, ch)));
                ++n;
            }
        }
    }
    return n ? total / n : 0.0;
}

} // namespace testing_support
