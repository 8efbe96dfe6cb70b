#pragma once

#include <complex>
#include <span>
#include <vector>

#include "irisval/image.hpp"
#include "irisval/imaging.hpp"
#include "irisval/iris_code.hpp"

namespace irisval {

struct GaborParams {
    double wavelength = 18.0;   // pixels along the angular axis
    double sigma_over_f = 0.5;  // bandwidth ratio sigma / f0

    void validate() const;
};

// 45 x 360 grayscale polar strip after CLAHE.
class NormalizedIris {
public:
    // Throws InvalidArgument unless strip is 45 x 360 grayscale.
    explicit NormalizedIris(PolarStrip strip);

    const PolarStrip& strip() const { return strip_; }

private:
    PolarStrip strip_;
};

// Contrast settings used by normalize(): 8 angular tiles, 1 radial tile.
inline constexpr ClaheParams kNormalizeClahe{2.0, 8, 1};

// grayscale -> 45 x 360 polar unwrap -> CLAHE.
NormalizedIris normalize(const RasterImage& img, const IrisBoundaries& b);

// 1D Log-Gabor transfer function over one period of N samples. Bin k holds
// G(k/N) for 1 <= k <= N/2 and 0 elsewhere (DC and negative frequencies).
std::vector<double> log_gabor_transfer(int n, const GaborParams& p);

// Complex response of a single circular filter to a real row. Implemented as a
// circular convolution with the filter's impulse response so that shifting the
// input shifts the output bit-for-bit.
class LogGaborFilter {
public:
    LogGaborFilter(int length, const GaborParams& p);

    int length() const { return static_cast<int>(kernel_.size()); }
    const std::vector<std::complex<double>>& impulse_response() const { return kernel_; }

    std::vector<std::complex<double>> apply(std::span<const std::uint8_t> row) const;
    std::vector<std::complex<double>> apply(std::span<const double> row) const;

private:
    std::vector<std::complex<double>> convolve(std::span<const double> centred) const;

    std::vector<std::complex<double>> kernel_;
};

// Filters one 360-sample row (mean removed first). Throws on other lengths.
std::vector<std::complex<double>> log_gabor_row(std::span<const double> signal, const GaborParams& p = {});

// Quantises a row-major rows x cols grid of responses: real bit = Re >= 0,
// imaginary bit = Im >= 0.
IrisCode quantize_responses(int rows, int cols, std::span<const std::complex<double>> responses);

IrisCode encode(const NormalizedIris& n, const GaborParams& p = {});

} // namespace irisval
