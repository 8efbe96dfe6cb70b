#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "irisval/image.hpp"

namespace irisval {

struct Lab {
    double l = 0.0;
    double a = 0.0;
    double b = 0.0;
};

// sRGB (D65) to CIE L*a*b*.
Lab srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

struct PaletteEntry {
    std::string name;
    std::array<std::uint8_t, 3> rgb;
};

// Nearest-centroid colour palette. Centroids are given in sRGB and compared in
// L*a*b*.
class Palette {
public:
    explicit Palette(std::vector<PaletteEntry> entries);

    // blue-grey, green, light-brown, dark-brown.
    static const Palette& iris_default();

    std::size_t size() const { return entries_.size(); }
    const PaletteEntry& entry(std::size_t i) const { return entries_[i]; }
    std::size_t nearest(std::uint8_t r, std::uint8_t g, std::uint8_t b) const;

private:
    std::vector<PaletteEntry> entries_;
    std::vector<Lab> lab_;
};

namespace palette_index {
inline constexpr std::size_t blue_grey = 0;
inline constexpr std::size_t green = 1;
inline constexpr std::size_t light_brown = 2;
inline constexpr std::size_t dark_brown = 3;
} // namespace palette_index

struct ColorComposition {
    std::vector<double> fractions;
    std::size_t pixel_count = 0;
};

// Fractions of colored pixels inside the annulus falling nearest each palette
// centroid. Throws InvalidArgument when no colored pixel is present.
ColorComposition quantify_colors(const RasterImage& img, const IrisBoundaries& b,
                                 const Palette& palette = Palette::iris_default(),
                                 int colored_threshold = kDefaultColoredThreshold);

// Same, over every colored pixel in the frame.
ColorComposition quantify_colors(const RasterImage& img, const Palette& palette = Palette::iris_default(),
                                 int colored_threshold = kDefaultColoredThreshold);

// Orthonormal basis of the clr hyperplane, (D-1) x D, row i:
//   sqrt(i/(i+1)) * (1/i, ..., 1/i, -1, 0, ..., 0)   (i ones-over-i, then -1)
// for i = 1..D-1.
std::vector<std::vector<double>> ilr_basis(std::size_t parts);

std::vector<double> clr(const std::vector<double>& composition);

inline constexpr double kDefaultPseudoCount = 1e-4;

// Zeros become `pseudo`, the composition is renormalised, then projected.
std::vector<double> ilr_transform(const ColorComposition& c, double pseudo = kDefaultPseudoCount);
std::vector<double> ilr_transform(const std::vector<double>& fractions, double pseudo = kDefaultPseudoCount);

struct PcaModel {
    std::vector<double> mean;
    std::vector<std::vector<double>> components;  // k rows, unit length
    std::vector<double> variances;                // nonincreasing
};

// Covariance (n - 1 denominator) eigendecomposition by cyclic Jacobi. Each
// component's first non-negligible coordinate is positive.
PcaModel pca_fit(const std::vector<std::vector<double>>& vectors, std::size_t k);
std::vector<double> pca_project(const PcaModel& m, const std::vector<double>& v);
std::vector<double> pca_reconstruct(const PcaModel& m, const std::vector<double>& coords);

// Symmetric eigendecomposition; eigenvalues descending, eigenvectors as rows.
struct SymmetricEigen {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
};
SymmetricEigen symmetric_eigen(std::vector<std::vector<double>> matrix);

struct DistanceHistogram {
    double bin_width = 0.05;
    std::vector<double> values;
    std::vector<std::size_t> counts;  // bin i covers [i*w, (i+1)*w)
};

inline constexpr double kDefaultBinWidth = 0.05;

// Intra: all unordered pairwise distances in `a`.
DistanceHistogram distance_analysis(const std::vector<std::vector<double>>& a, double bin_width = kDefaultBinWidth);
// Inter: for each vector of `b`, its minimum distance to `a`.
DistanceHistogram distance_analysis(const std::vector<std::vector<double>>& a,
                                    const std::vector<std::vector<double>>& b, double bin_width = kDefaultBinWidth);

void write_ilr_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                   const std::vector<std::vector<double>>& vectors);
void write_pca_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                   const std::vector<std::string>& set_labels, const std::vector<std::vector<double>>& coords);
void write_histogram_csv(const std::filesystem::path& path, const DistanceHistogram& h);

} // namespace irisval
