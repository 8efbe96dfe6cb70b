#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "irisval/encoding.hpp"
#include "irisval/image.hpp"
#include "irisval/imaging.hpp"
#include "irisval/iris_code.hpp"
#include "irisval/segmentation.hpp"

// Slow, direct reference implementations used to cross-check the production
// code. None of these share code paths with the functions they verify.
namespace irisval::oracle {

// Scans every level 0..255 over raw pixels (no histogram) and compares the
// between-class variance exactly. Frames up to 256 x 256.
int otsu_exhaustive(const RasterImage& gray);

// Smallest circle through every 2- and 3-point support set that contains all
// points.
Circle enclosing_circle_bruteforce(const std::vector<std::pair<double, double>>& points);

// Builds the shifted code cell by cell and counts disagreements.
int shifted_differing_bits(const IrisCode& a, const IrisCode& b, int shift);

struct NaiveMatch {
    int differing_bits = 0;
    int best_shift = 0;
};
NaiveMatch best_match_naive(const IrisCode& a, const IrisCode& b);

// O(N^2) DFT -> transfer function -> inverse DFT.
std::vector<std::complex<double>> log_gabor_dft(const std::vector<double>& signal, const GaborParams& p);

// Per-pixel CLAHE written directly from the textbook description.
RasterImage clahe_reference(const RasterImage& gray, const ClaheParams& params);

// Mean of the minimum of 360 Binomial(bits, 1/2)/bits draws over `trials`.
double min_of_binomials_mean(int bits, int shifts, int trials, std::uint64_t seed);

// Number of coverage rays with fewer than `min_fraction` colored samples.
int empty_rays(const RasterImage& img, const IrisBoundaries& b, int rays, int samples, double min_fraction,
               int colored_threshold);

} // namespace irisval::oracle
