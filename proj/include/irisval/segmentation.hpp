#pragma once

#include <optional>
#include <span>
#include <vector>

#include "irisval/image.hpp"

namespace irisval {

struct Point {
    int x = 0;
    int y = 0;
    bool operator==(const Point&) const = default;
};

enum class ContourKind { outer, hole };

// Closed 8-connected border. Outer borders run counterclockwise as displayed
// (y down), hole borders clockwise.
struct Contour {
    std::vector<Point> points;
    ContourKind kind = ContourKind::outer;
};

struct OtsuResult {
    int level = 0;
    // Set when the image holds a single grey level; level is then that value.
    bool degenerate = false;
};

// Threshold t maximising between-class variance of the {<= t} / {> t} split.
// Ties go to the smallest t. Scores are compared exactly.
OtsuResult otsu_threshold(const RasterImage& gray);

// Exact comparison key for the Otsu criterion at one split. Exposed so brute
// force checks can use the same total order.
struct OtsuScore {
    unsigned __int128 numerator = 0; // (N * S0 - n0 * S)^2
    unsigned __int128 denominator = 1; // n0 * n1
};
OtsuScore otsu_score(std::uint64_t total_count, std::uint64_t total_sum, std::uint64_t below_count,
                     std::uint64_t below_sum);
bool otsu_score_less(const OtsuScore& a, const OtsuScore& b);

// Foreground = samples strictly above level.
BinaryMask threshold_mask(const RasterImage& gray, int level);

// Suzuki-Abe border following (8-connected foreground, 4-connected holes).
std::vector<Contour> trace_contours(const BinaryMask& mask);

struct Circle {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
};

// Smallest enclosing circle (Welzl, iterative move-to-front with a content-
// seeded shuffle so results are deterministic).
Circle min_enclosing_circle(std::span<const Point> points);
Circle min_enclosing_circle(std::span<const std::pair<double, double>> points);

struct BoundarySpec {
    double expected_pupil_radius = 45.0;
    double expected_limbic_radius = 85.0;
    double tolerance = 3.0;
    double max_center_offset = 10.0;
};

enum class SegmentationFailure { no_boundaries, deviation_exceeded, ambiguous_candidates };

const char* to_string(SegmentationFailure f);

class SegmentationError : public Error {
public:
    SegmentationError(SegmentationFailure reason, const std::string& detail);
    SegmentationFailure reason() const { return reason_; }

private:
    SegmentationFailure reason_;
};

// Otsu -> contours -> enclosing circles -> (pupil, limbic) selection.
// Throws SegmentationError.
IrisBoundaries segment_iris(const RasterImage& img, const BoundarySpec& spec = {});

} // namespace irisval
