#include "irisval/segmentation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <cstring>
#include <random>
#include <sstream>

#include "irisval/imaging.hpp"

namespace irisval {

// ---------------------------------------------------------------------------
// Otsu

OtsuScore otsu_score(std::uint64_t total_count, std::uint64_t total_sum, std::uint64_t below_count,
                     std::uint64_t below_sum)
{
    const std::uint64_t above_count = total_count - below_count;
    if (below_count == 0 || above_count == 0) return {0, 1};
    const __int128 diff = static_cast<__int128>(total_count) * below_sum - static_cast<__int128>(below_count) * total_sum;
    const unsigned __int128 mag = static_cast<unsigned __int128>(diff < 0 ? -diff : diff);
    return {mag * mag, static_cast<unsigned __int128>(below_count) * above_count};
}

bool otsu_score_less(const OtsuScore& a, const OtsuScore& b)
{
    // Continued-fraction comparison of a.n/a.d < b.n/b.d without overflow.
    unsigned __int128 n1 = a.numerator, d1 = a.denominator, n2 = b.numerator, d2 = b.denominator;
    bool flipped = false;
    for (;;) {
        const unsigned __int128 q1 = n1 / d1, q2 = n2 / d2;
        if (q1 != q2) return flipped ? q1 > q2 : q1 < q2;
        const unsigned __int128 r1 = n1 % d1, r2 = n2 % d2;
        if (r1 == 0 || r2 == 0) {
            if (r1 == 0 && r2 == 0) return false;
            // Equal integer parts; the one with zero remainder is smaller.
            return flipped ? r2 == 0 : r1 == 0;
        }
        // r1/d1 < r2/d2  <=>  d2/r2 < d1/r1 ... i.e. d1/r1 > d2/r2.
        n1 = d1; d1 = r1;
        n2 = d2; d2 = r2;
        flipped = !flipped;
    }
}

OtsuResult otsu_threshold(const RasterImage& gray)
{
    if (!gray.is_gray() || gray.empty()) {
        throw InvalidArgument("otsu_threshold: expected a non-empty grayscale image");
    }
    std::array<std::uint64_t, 256> hist{};
    for (std::uint8_t v : gray.data()) ++hist[v];

    const std::uint64_t total = gray.data().size();
    std::uint64_t total_sum = 0;
    for (int v = 0; v < 256; ++v) total_sum += hist[v] * static_cast<std::uint64_t>(v);
    for (int v = 0; v < 256; ++v) {
        if (hist[v] == total) return {v, true};
    }

    int best = 0;
    OtsuScore best_score{0, 1};
    std::uint64_t n0 = 0, s0 = 0;
    for (int t = 0; t < 256; ++t) {
        n0 += hist[t];
        s0 += hist[t] * static_cast<std::uint64_t>(t);
        const OtsuScore s = otsu_score(total, total_sum, n0, s0);
        if (otsu_score_less(best_score, s)) {
            best_score = s;
            best = t;
        }
    }
    return {best, false};
}

BinaryMask threshold_mask(const RasterImage& gray, int level)
{
    BinaryMask mask(gray.width(), gray.height());
    for (int y = 0; y < gray.height(); ++y) {
        for (int x = 0; x < gray.width(); ++x) {
            if (gray.at(x, y) > level) mask.set(x, y);
        }
    }
    return mask;
}

// ---------------------------------------------------------------------------
// Suzuki-Abe border following

namespace {

// Clockwise as displayed (row index grows downwards).
constexpr std::array<int, 8> kDi = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDj = {1, 1, 0, -1, -1, -1, 0, 1};

int direction_of(int di, int dj)
{
    for (int d = 0; d < 8; ++d) {
        if (kDi[d] == di && kDj[d] == dj) return d;
    }
    return -1;
}

long long twice_signed_area(const std::vector<Point>& pts)
{
    long long a = 0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const Point& p = pts[k];
        const Point& q = pts[(k + 1) % pts.size()];
        a += static_cast<long long>(p.x) * q.y - static_cast<long long>(q.x) * p.y;
    }
    return a;
}

} // namespace

std::vector<Contour> trace_contours(const BinaryMask& mask)
{
    const int h = mask.height() + 2;
    const int w = mask.width() + 2;
    std::vector<int> f(static_cast<std::size_t>(h) * w, 0);
    auto F = [&](int i, int j) -> int& { return f[static_cast<std::size_t>(i) * w + j]; };
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.get(x, y)) F(y + 1, x + 1) = 1;
        }
    }

    std::vector<Contour> contours;
    int nbd = 1;
    for (int i = 1; i < h - 1; ++i) {
        for (int j = 1; j < w - 1; ++j) {
            const int v = F(i, j);
            if (v == 0) continue;
            int i2, j2;
            ContourKind kind;
            if (v == 1 && F(i, j - 1) == 0) {
                kind = ContourKind::outer;
                i2 = i;
                j2 = j - 1;
            } else if (v >= 1 && F(i, j + 1) == 0) {
                kind = ContourKind::hole;
                i2 = i;
                j2 = j + 1;
            } else {
                continue;
            }
            ++nbd;

            Contour contour;
            contour.kind = kind;

            // 3.1: clockwise search around (i, j) starting from (i2, j2).
            const int start_dir = direction_of(i2 - i, j2 - j);
            int found = -1;
            for (int k = 0; k < 8; ++k) {
                const int d = (start_dir + k) % 8;
                if (F(i + kDi[d], j + kDj[d]) != 0) {
                    found = d;
                    break;
                }
            }
            if (found < 0) {
                F(i, j) = -nbd;
                contour.points.push_back({j - 1, i - 1});
                contours.push_back(std::move(contour));
                continue;
            }
            const int i1 = i + kDi[found], j1 = j + kDj[found];
            i2 = i1;
            j2 = j1;
            int i3 = i, j3 = j;
            for (;;) {
                contour.points.push_back({j3 - 1, i3 - 1});
                // 3.3: counterclockwise search around (i3, j3) starting after (i2, j2).
                const int from = direction_of(i2 - i3, j2 - j3);
                bool east_zero_examined = false;
                int d4 = -1;
                for (int k = 1; k <= 8; ++k) {
                    const int d = (from - k + 8) % 8;
                    if (F(i3 + kDi[d], j3 + kDj[d]) != 0) {
                        d4 = d;
                        break;
                    }
                    if (d == 0) east_zero_examined = true;
                }
                const int i4 = i3 + kDi[d4], j4 = j3 + kDj[d4];
                // 3.4
                if (east_zero_examined) {
                    F(i3, j3) = -nbd;
                } else if (F(i3, j3) == 1) {
                    F(i3, j3) = nbd;
                }
                // 3.5
                if (i4 == i && j4 == j && i3 == i1 && j3 == j1) break;
                i2 = i3;
                j2 = j3;
                i3 = i4;
                j3 = j4;
            }
            // The loop appends (i1, j1) last before closing; the start pixel
            // was appended first, so the sequence is already a closed cycle.
            const long long area = twice_signed_area(contour.points);
            const bool want_negative = kind == ContourKind::outer;
            if ((want_negative && area > 0) || (!want_negative && area < 0)) {
                std::reverse(contour.points.begin(), contour.points.end());
            }
            contours.push_back(std::move(contour));
        }
    }
    return contours;
}

// ---------------------------------------------------------------------------
// Minimum enclosing circle

namespace {

struct P2 {
    double x, y;
};

bool inside(const Circle& c, const P2& p)
{
    return std::hypot(p.x - c.cx, p.y - c.cy) <= c.radius * (1.0 + 1e-12) + 1e-12;
}

Circle from_two(const P2& a, const P2& b)
{
    return {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0, std::hypot(a.x - b.x, a.y - b.y) / 2.0};
}

Circle from_three(const P2& a, const P2& b, const P2& c)
{
    const double bx = b.x - a.x, by = b.y - a.y;
    const double cx = c.x - a.x, cy = c.y - a.y;
    const double d = 2.0 * (bx * cy - by * cx);
    const double scale = std::max({std::abs(bx), std::abs(by), std::abs(cx), std::abs(cy), 1.0});
    if (std::abs(d) <= 1e-12 * scale * scale) {
        // Collinear: the widest pair spans the others.
        Circle best = from_two(a, b);
        for (const Circle& k : {from_two(a, c), from_two(b, c)}) {
            if (k.radius > best.radius) best = k;
        }
        return best;
    }
    const double b2 = bx * bx + by * by;
    const double c2 = cx * cx + cy * cy;
    const double ux = (cy * b2 - by * c2) / d;
    const double uy = (bx * c2 - cx * b2) / d;
    return {a.x + ux, a.y + uy, std::hypot(ux, uy)};
}

Circle welzl(std::vector<P2> pts)
{
    if (pts.empty()) throw InvalidArgument("min_enclosing_circle: no points");

    // Seed from the point content so identical inputs give identical output.
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL ^ pts.size();
    for (const P2& p : pts) {
        std::uint64_t bits[2];
        std::memcpy(&bits[0], &p.x, sizeof(double));
        std::memcpy(&bits[1], &p.y, sizeof(double));
        for (std::uint64_t b : bits) {
            seed ^= b + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
        }
    }
    std::mt19937_64 rng(seed);
    for (std::size_t k = pts.size(); k > 1; --k) {
        std::swap(pts[k - 1], pts[rng() % k]);
    }

    Circle c{pts[0].x, pts[0].y, 0.0};
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (inside(c, pts[i])) continue;
        c = {pts[i].x, pts[i].y, 0.0};
        for (std::size_t j = 0; j < i; ++j) {
            if (inside(c, pts[j])) continue;
            c = from_two(pts[i], pts[j]);
            for (std::size_t k = 0; k < j; ++k) {
                if (inside(c, pts[k])) continue;
                c = from_three(pts[i], pts[j], pts[k]);
            }
        }
    }
    return c;
}

} // namespace

Circle min_enclosing_circle(std::span<const Point> points)
{
    std::vector<P2> pts;
    pts.reserve(points.size());
    for (const Point& p : points) pts.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
    return welzl(std::move(pts));
}

Circle min_enclosing_circle(std::span<const std::pair<double, double>> points)
{
    std::vector<P2> pts;
    pts.reserve(points.size());
    for (const auto& [x, y] : points) pts.push_back({x, y});
    return welzl(std::move(pts));
}

// ---------------------------------------------------------------------------
// Iris segmentation

const char* to_string(SegmentationFailure f)
{
    switch (f) {
    case SegmentationFailure::no_boundaries: return "NoBoundaries";
    case SegmentationFailure::deviation_exceeded: return "DeviationExceeded";
    case SegmentationFailure::ambiguous_candidates: return "AmbiguousCandidates";
    }
    return "Unknown";
}

SegmentationError::SegmentationError(SegmentationFailure reason, const std::string& detail)
    : Error(std::string(to_string(reason)) + ": " + detail), reason_(reason)
{
}

IrisBoundaries segment_iris(const RasterImage& img, const BoundarySpec& spec)
{
    const RasterImage gray = img.is_rgb() ? to_grayscale(img) : img;
    const OtsuResult otsu = otsu_threshold(gray);
    if (otsu.degenerate) {
        throw SegmentationError(SegmentationFailure::no_boundaries, "image has a single grey level");
    }
    const auto contours = trace_contours(threshold_mask(gray, otsu.level));

    const double cx = (img.width() - 1) / 2.0;
    const double cy = (img.height() - 1) / 2.0;
    std::vector<Circle> outer, holes;
    for (const Contour& c : contours) {
        const Circle circle = min_enclosing_circle(c.points);
        if (std::hypot(circle.cx - cx, circle.cy - cy) > spec.max_center_offset) continue;
        (c.kind == ContourKind::outer ? outer : holes).push_back(circle);
    }
    auto by_radius = [](const Circle& a, const Circle& b) { return a.radius > b.radius; };
    std::stable_sort(outer.begin(), outer.end(), by_radius);
    std::stable_sort(holes.begin(), holes.end(), by_radius);
    if (outer.empty()) {
        throw SegmentationError(SegmentationFailure::no_boundaries, "no centred outer contour");
    }
    std::vector<Circle> pupils = holes;
    if (pupils.empty()) pupils.assign(outer.begin() + 1, outer.end());

    struct Pair {
        const Circle* pupil;
        const Circle* limbic;
        double cost;
    };
    std::vector<Pair> pairs;
    for (const Circle& l : outer) {
        for (const Circle& p : pupils) {
            if (p.radius >= l.radius) continue;
            pairs.push_back({&p, &l,
                             std::abs(p.radius - spec.expected_pupil_radius)
                                 + std::abs(l.radius - spec.expected_limbic_radius)});
        }
    }
    if (pairs.empty()) {
        throw SegmentationError(SegmentationFailure::no_boundaries, "no pupil/limbic circle pair");
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.cost < b.cost; });
    const Pair& best = pairs.front();

    auto within = [&](const Pair& p) {
        return std::abs(p.pupil->radius - spec.expected_pupil_radius) <= spec.tolerance
            && std::abs(p.limbic->radius - spec.expected_limbic_radius) <= spec.tolerance;
    };
    if (!within(best)) {
        std::ostringstream msg;
        msg << "pupil radius " << best.pupil->radius << " (expected " << spec.expected_pupil_radius
            << "), limbic radius " << best.limbic->radius << " (expected " << spec.expected_limbic_radius
            << "), tolerance " << spec.tolerance;
        throw SegmentationError(SegmentationFailure::deviation_exceeded, msg.str());
    }
    if (pairs.size() > 1 && within(pairs[1]) && std::abs(pairs[1].cost - best.cost) < 1e-9) {
        throw SegmentationError(SegmentationFailure::ambiguous_candidates,
                                "several circle pairs fit the expected radii equally well");
    }

    IrisBoundaries b;
    b.center_x = (best.pupil->cx + best.limbic->cx) / 2.0;
    b.center_y = (best.pupil->cy + best.limbic->cy) / 2.0;
    b.pupil_radius = best.pupil->radius;
    b.limbic_radius = best.limbic->radius;
    return b;
}

} // namespace irisval
