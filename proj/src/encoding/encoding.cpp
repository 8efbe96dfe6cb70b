#include "irisval/encoding.hpp"

#include <cmath>
#include <numbers>

namespace irisval {

void GaborParams::validate() const
{
    if (!(wavelength > 2.0)) throw InvalidArgument("GaborParams: wavelength must exceed 2 pixels");
    if (!(sigma_over_f > 0.0 && sigma_over_f < 1.0)) {
        throw InvalidArgument("GaborParams: sigma_over_f must lie in (0, 1)");
    }
}

NormalizedIris::NormalizedIris(PolarStrip strip) : strip_(std::move(strip))
{
    if (strip_.radial_size() != kCodeRows || strip_.angular_size() != kCodeCols || strip_.channels() != 1) {
        throw InvalidArgument("NormalizedIris: expected a 45 x 360 grayscale strip");
    }
}

NormalizedIris normalize(const RasterImage& img, const IrisBoundaries& b)
{
    const RasterImage gray = img.is_rgb() ? to_grayscale(img) : img;
    PolarStrip strip = unwrap_polar(gray, b, kCodeRows, kCodeCols);
    return NormalizedIris(PolarStrip(clahe(strip.image(), kNormalizeClahe)));
}

std::vector<double> log_gabor_transfer(int n, const GaborParams& p)
{
    p.validate();
    std::vector<double> g(n, 0.0);
    const double f0 = 1.0 / p.wavelength;
    const double denom = 2.0 * std::pow(std::log(p.sigma_over_f), 2);
    for (int k = 1; k <= n / 2; ++k) {
        const double f = static_cast<double>(k) / n;
        g[k] = std::exp(-std::pow(std::log(f / f0), 2) / denom);
    }
    return g;
}

LogGaborFilter::LogGaborFilter(int length, const GaborParams& p)
{
    if (length < 2) throw InvalidArgument("LogGaborFilter: length must be >= 2");
    const auto g = log_gabor_transfer(length, p);
    // h[m] = (1/N) sum_k G[k] exp(2 pi i k m / N); exact phase via k*m mod N.
    kernel_.assign(length, {0.0, 0.0});
    for (int m = 0; m < length; ++m) {
        std::complex<double> acc{0.0, 0.0};
        for (int k = 1; k <= length / 2; ++k) {
            const long long phase = (static_cast<long long>(k) * m) % length;
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(phase) / length;
            acc += g[k] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        kernel_[m] = acc / static_cast<double>(length);
    }
}

std::vector<std::complex<double>> LogGaborFilter::convolve(std::span<const double> centred) const
{
    const int n = length();
    // Doubled buffer so each output is a contiguous dot product with the same
    // evaluation order regardless of where the row starts.
    std::vector<double> doubled(2 * n);
    for (int j = 0; j < 2 * n; ++j) doubled[j] = centred[j % n];

    std::vector<std::complex<double>> out(n);
    for (int t = 0; t < n; ++t) {
        double re = 0.0, im = 0.0;
        // y[t] = sum_m h[m] x[t - m]
        const double* x = doubled.data() + t + n;
        for (int m = 0; m < n; ++m) {
            re += kernel_[m].real() * x[-m];
            im += kernel_[m].imag() * x[-m];
        }
        out[t] = {re, im};
    }
    return out;
}

std::vector<std::complex<double>> LogGaborFilter::apply(std::span<const double> row) const
{
    const int n = length();
    if (static_cast<int>(row.size()) != n) {
        throw InvalidArgument("LogGaborFilter: row length does not match filter");
    }
    double mean = 0;
    for (double v : row) mean += v;
    mean /= n;
    std::vector<double> centred(n);
    for (int j = 0; j < n; ++j) centred[j] = row[j] - mean;
    return convolve(centred);
}

std::vector<std::complex<double>> LogGaborFilter::apply(std::span<const std::uint8_t> row) const
{
    const int n = length();
    if (static_cast<int>(row.size()) != n) {
        throw InvalidArgument("LogGaborFilter: row length does not match filter");
    }
    // Integer sum keeps the mean independent of sample order.
    long long sum = 0;
    for (std::uint8_t v : row) sum += v;
    const double mean = static_cast<double>(sum) / n;
    std::vector<double> centred(n);
    for (int j = 0; j < n; ++j) centred[j] = row[j] - mean;
    return convolve(centred);
}

std::vector<std::complex<double>> log_gabor_row(std::span<const double> signal, const GaborParams& p)
{
    if (signal.size() != static_cast<std::size_t>(kCodeCols)) {
        throw InvalidArgument("log_gabor_row: expected 360 samples");
    }
    return LogGaborFilter(kCodeCols, p).apply(signal);
}

IrisCode quantize_responses(int rows, int cols, std::span<const std::complex<double>> responses)
{
    if (responses.size() != static_cast<std::size_t>(rows) * cols) {
        throw InvalidArgument("quantize_responses: response grid size mismatch");
    }
    IrisCode code(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const auto& z = responses[static_cast<std::size_t>(r) * cols + c];
            code.set_cell(r, c, z.real() >= 0.0, z.imag() >= 0.0);
        }
    }
    return code;
}

IrisCode encode(const NormalizedIris& n, const GaborParams& p)
{
    const LogGaborFilter filter(kCodeCols, p);
    const RasterImage& img = n.strip().image();
    std::vector<std::complex<double>> grid;
    grid.reserve(static_cast<std::size_t>(kCodeRows) * kCodeCols);
    for (int r = 0; r < kCodeRows; ++r) {
        auto row = img.data().subspan(static_cast<std::size_t>(r) * kCodeCols, kCodeCols);
        const auto resp = filter.apply(std::span<const std::uint8_t>(row));
        grid.insert(grid.end(), resp.begin(), resp.end());
    }
    return quantize_responses(kCodeRows, kCodeCols, grid);
}

} // namespace irisval
