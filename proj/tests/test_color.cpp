#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "irisval/color.hpp"

using namespace irisval;

namespace {

// Reference values from scikit-image rgb2lab (D65, 2 degree observer).
struct LabCase {
    std::array<std::uint8_t, 3> rgb;
    Lab lab;
};
const LabCase kLabCases[] = {
    {{255, 255, 255}, {100.0, -0.00245, 0.00465}},
    {{255, 0, 0}, {53.2405879437449, 80.0923082256922, 67.2027510444287}},
    {{118, 136, 150}, {55.747007698847455, -3.292964738977333, -9.636966849842455}},
    {{104, 124, 84}, {49.494111794463365, -15.036008875283002, 19.507189251237765}},
    {{150, 105, 60}, {48.15261203693004, 12.963355246596587, 32.17437894878539}},
    {{72, 44, 26}, {21.033669018489846, 10.737028713333958, 16.91779099980216}},
};

RasterImage filled(int size, std::array<std::uint8_t, 3> rgb)
{
    RasterImage img(size, size, 3);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = rgb[c];
        }
    }
    return img;
}

double norm_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

std::vector<double> random_composition(std::mt19937_64& rng, std::size_t parts)
{
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::vector<double> v(parts);
    double s = 0.0;
    for (auto& x : v) s += (x = u(rng));
    for (auto& x : v) x /= s;
    return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

} // namespace

TEST_CASE("srgb_to_lab")
{
    for (const auto& c : kLabCases) {
        const Lab lab = srgb_to_lab(c.rgb[0], c.rgb[1], c.rgb[2]);
        CHECK(std::abs(lab.l - c.lab.l) < 0.01);
        CHECK(std::abs(lab.a - c.lab.a) < 0.01);
        CHECK(std::abs(lab.b - c.lab.b) < 0.01);
    }
    const Lab black = srgb_to_lab(0, 0, 0);
    CHECK(std::abs(black.l) < 1e-9);
}

TEST_CASE("palette")
{
    const Palette& p = Palette::iris_default();
    REQUIRE(p.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& rgb = p.entry(i).rgb;
        CHECK(p.nearest(rgb[0], rgb[1], rgb[2]) == i);
    }
    CHECK(p.nearest(20, 40, 200) == palette_index::blue_grey);
    CHECK(p.nearest(60, 30, 10) == palette_index::dark_brown);
    CHECK_THROWS_AS(Palette({{"only", {1, 2, 3}}}), InvalidArgument);
}

TEST_CASE("quantify_colors")
{
    const IrisBoundaries b = centered_boundaries(64, 10, 30);

    SUBCASE("uniform green annulus")
    {
        const ColorComposition c = quantify_colors(filled(64, {104, 124, 84}), b);
        REQUIRE(c.fractions.size() == 4);
        CHECK(c.fractions[0] == 0.0);
        CHECK(c.fractions[1] == 1.0);
        CHECK(c.fractions[2] == 0.0);
        CHECK(c.fractions[3] == 0.0);
        CHECK(c.pixel_count > 0);
    }

    SUBCASE("half and half split, black pixels ignored")
    {
        RasterImage img(64, 64, 3);
        for (int y = 0; y < 64; ++y) {
            for (int x = 0; x < 64; ++x) {
                const bool left = x < 32;
                const std::array<std::uint8_t, 3> rgb =
                    left ? std::array<std::uint8_t, 3>{118, 136, 150} : std::array<std::uint8_t, 3>{150, 105, 60};
                for (int ch = 0; ch < 3; ++ch) img.at(x, y, ch) = rgb[ch];
            }
        }
        const ColorComposition c = quantify_colors(img, b);
        CHECK(c.fractions[0] == doctest::Approx(0.5));
        CHECK(c.fractions[2] == doctest::Approx(0.5));
        const ColorComposition whole = quantify_colors(img);
        CHECK(whole.pixel_count == 64 * 64);

        RasterImage holed = img;
        for (int x = 0; x < 64; ++x) {
            for (int ch = 0; ch < 3; ++ch) holed.at(x, 20, ch) = 0;
        }
        CHECK(quantify_colors(holed).pixel_count == 64 * 63);
    }

    SUBCASE("pixel order does not matter")
    {
        RasterImage img = testing_support::random_image(40, 40, 3, 5);
        const ColorComposition a = quantify_colors(img);
        std::vector<std::array<std::uint8_t, 3>> px;
        for (int y = 0; y < 40; ++y) {
            for (int x = 0; x < 40; ++x) px.push_back({img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2)});
        }
        std::mt19937_64 rng(6);
        std::shuffle(px.begin(), px.end(), rng);
        for (int i = 0; i < 1600; ++i) {
            for (int ch = 0; ch < 3; ++ch) img.at(i % 40, i / 40, ch) = px[i][ch];
        }
        const ColorComposition b2 = quantify_colors(img);
        CHECK(a.fractions == b2.fractions);
        double s = 0.0;
        for (double f : a.fractions) s += f;
        CHECK(s == doctest::Approx(1.0));
    }

    CHECK_THROWS_AS(quantify_colors(RasterImage(64, 64, 3), b), InvalidArgument);
    CHECK_THROWS_AS(quantify_colors(RasterImage(64, 64, 1, 100), b), InvalidArgument);
}

TEST_CASE("ilr")
{
    SUBCASE("basis is orthonormal and orthogonal to the ones vector")
    {
        for (std::size_t d : {2u, 4u, 7u}) {
            const auto basis = ilr_basis(d);
            REQUIRE(basis.size() == d - 1);
            for (std::size_t i = 0; i < basis.size(); ++i) {
                double sum = 0.0;
                for (double v : basis[i]) sum += v;
                CHECK(std::abs(sum) < 1e-12);
                for (std::size_t j = 0; j < basis.size(); ++j) {
                    double dot = 0.0;
                    for (std::size_t k = 0; k < d; ++k) dot += basis[i][k] * basis[j][k];
                    CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0));
                }
            }
        }
        CHECK_THROWS_AS(ilr_basis(1), InvalidArgument);
    }

    SUBCASE("uniform composition maps to the origin")
    {
        for (double v : ilr_transform(std::vector<double>{0.25, 0.25, 0.25, 0.25})) CHECK(std::abs(v) < 1e-12);
    }

    SUBCASE("isometry with the Aitchison distance")
    {
        std::mt19937_64 rng(3);
        auto clr_direct = [](const std::vector<double>& x) {
            double mean_log = 0.0;
            for (double v : x) mean_log += std::log(v);
            mean_log /= x.size();
            std::vector<double> out;
            for (double v : x) out.push_back(std::log(v) - mean_log);
            return out;
        };
        for (int trial = 0; trial < 50; ++trial) {
            const auto x = random_composition(rng, 4);
            const auto y = random_composition(rng, 4);
            const double aitchison = norm_diff(clr_direct(x), clr_direct(y));
            CHECK(norm_diff(ilr_transform(x), ilr_transform(y)) == doctest::Approx(aitchison).epsilon(1e-10));
            CHECK(norm_diff(clr(x), clr_direct(x)) < 1e-12);
        }
    }

    SUBCASE("scale invariance and zero replacement")
    {
        const std::vector<double> x{0.1, 0.2, 0.3, 0.4};
        const std::vector<double> x3{0.3, 0.6, 0.9, 1.2};
        CHECK(norm_diff(ilr_transform(x), ilr_transform(x3)) < 1e-12);
        const auto z = ilr_transform(std::vector<double>{0.0, 0.5, 0.5, 0.0});
        for (double v : z) CHECK(std::isfinite(v));
        CHECK_THROWS_AS(ilr_transform(std::vector<double>{-0.1, 1.1}), InvalidArgument);
        CHECK_THROWS_AS(clr({0.0, 1.0}), InvalidArgument);
    }
}

TEST_CASE("pca")
{
    SUBCASE("points on a line")
    {
        std::vector<std::vector<double>> pts;
        for (int i = 0; i < 20; ++i) pts.push_back({1.0 + 2.0 * i, -3.0 + 1.0 * i, 0.5});
        const PcaModel m = pca_fit(pts, 2);
        const double n = std::sqrt(5.0);
        CHECK(m.components[0][0] == doctest::Approx(2.0 / n));
        CHECK(m.components[0][1] == doctest::Approx(1.0 / n));
        CHECK(std::abs(m.components[0][2]) < 1e-12);
        CHECK(m.variances[1] == doctest::Approx(0.0).scale(1.0));
        for (const auto& p : pts) CHECK(norm_diff(pca_reconstruct(m, pca_project(m, p)), p) < 1e-9);
    }

    SUBCASE("random clouds")
    {
        std::mt19937_64 rng(12);
        std::normal_distribution<double> g(0.0, 1.0);
        std::vector<std::vector<double>> pts;
        for (int i = 0; i < 200; ++i) {
            const double a = g(rng), b = g(rng), c = g(rng);
            pts.push_back({3.0 * a + 0.5 * b, a - b, 0.2 * c + 1.0});
        }
        const PcaModel m = pca_fit(pts, 3);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                double dot = 0.0;
                for (std::size_t k = 0; k < 3; ++k) dot += m.components[i][k] * m.components[j][k];
                CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0));
            }
            if (i > 0) CHECK(m.variances[i] <= m.variances[i - 1]);
        }
        for (double v : pca_project(m, m.mean)) CHECK(std::abs(v) < 1e-12);
        for (const auto& p : pts) CHECK(norm_diff(pca_reconstruct(m, pca_project(m, p)), p) < 1e-9);

        // Largest variance over a fine sweep of unit directions.
        double best = 0.0;
        for (int ti = 0; ti < 360; ++ti) {
            for (int pi = 0; pi <= 180; ++pi) {
                const double t = ti * std::numbers::pi / 180.0, p = pi * std::numbers::pi / 180.0;
                const double u[3] = {std::sin(p) * std::cos(t), std::sin(p) * std::sin(t), std::cos(p)};
                double s = 0.0;
                for (const auto& q : pts) {
                    double proj = 0.0;
                    for (int k = 0; k < 3; ++k) proj += (q[k] - m.mean[k]) * u[k];
                    s += proj * proj;
                }
                best = std::max(best, s / (pts.size() - 1));
            }
        }
        CHECK(m.variances[0] >= best - 1e-9);
        CHECK(m.variances[0] == doctest::Approx(best).epsilon(1e-3));
    }

    SUBCASE("symmetric_eigen on a known matrix")
    {
        const SymmetricEigen e = symmetric_eigen({{2.0, 1.0}, {1.0, 2.0}});
        CHECK(e.values[0] == doctest::Approx(3.0));
        CHECK(e.values[1] == doctest::Approx(1.0));
        CHECK(std::abs(e.vectors[0][0]) == doctest::Approx(std::sqrt(0.5)));
    }

    CHECK_THROWS_AS(pca_fit({{1.0, 2.0}}, 1), InvalidArgument);
    CHECK_THROWS_AS(pca_fit({{1.0, 2.0}, {2.0, 1.0}}, 3), InvalidArgument);
}

TEST_CASE("distance_analysis")
{
    SUBCASE("intra distances")
    {
        const std::vector<std::vector<double>> a{{0.0, 0.0}, {3.0, 4.0}, {0.0, 0.12}};
        const DistanceHistogram h = distance_analysis(a, 0.05);
        REQUIRE(h.values.size() == 3);
        CHECK(h.values[0] == doctest::Approx(5.0));
        CHECK(h.values[1] == doctest::Approx(0.12));
        std::size_t total = 0;
        for (auto c : h.counts) total += c;
        CHECK(total == 3);
        CHECK(h.counts[2] == 1);  // 0.12 falls in [0.10, 0.15)
    }

    SUBCASE("inter distances take the nearest member")
    {
        const std::vector<std::vector<double>> a{{0.0}, {10.0}};
        const DistanceHistogram h = distance_analysis(a, {{1.0}, {9.5}, {20.0}}, 1.0);
        REQUIRE(h.values.size() == 3);
        CHECK(h.values[0] == doctest::Approx(1.0));
        CHECK(h.values[1] == doctest::Approx(0.5));
        CHECK(h.values[2] == doctest::Approx(10.0));
    }

    SUBCASE("two planted clusters give a bimodal intra histogram")
    {
        std::mt19937_64 rng(2);
        std::normal_distribution<double> g(0.0, 0.02);
        std::vector<std::vector<double>> a;
        for (int i = 0; i < 20; ++i) a.push_back({g(rng), g(rng)});
        for (int i = 0; i < 20; ++i) a.push_back({2.0 + g(rng), g(rng)});
        const DistanceHistogram h = distance_analysis(a, 0.1);
        std::size_t near = 0, far = 0, middle = 0;
        for (double v : h.values) (v < 0.3 ? near : v > 1.7 ? far : middle)++;
        CHECK(near == 2 * 190);
        CHECK(far == 400);
        CHECK(middle == 0);
    }

    CHECK_THROWS_AS(distance_analysis({}, 0.05), InvalidArgument);
    CHECK_THROWS_AS(distance_analysis({{0.0}}, 0.0), InvalidArgument);
    CHECK_THROWS_AS(distance_analysis({{0.0}}, {{1.0, 2.0}}), InvalidArgument);
}

TEST_CASE("color writers")
{
    testing_support::TempDir dir("color");
    write_ilr_csv(dir.path() / "ilr.csv", {"a", "b"}, {{0.5, -1.0, 0.0}, {1.0, 2.0, 3.0}});
    auto lines = read_lines(dir.path() / "ilr.csv");
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "id,ilr1,ilr2,ilr3");
    CHECK(lines[1].rfind("a,0.5,-1", 0) == 0);

    write_pca_csv(dir.path() / "pca.csv", {"a", "b"}, {"A", "B"}, {{1.0, 2.0}, {3.0, 4.0}});
    lines = read_lines(dir.path() / "pca.csv");
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "id,set,pc1,pc2");
    CHECK(lines[2].rfind("b,B,3", 0) == 0);

    const DistanceHistogram h = distance_analysis({{0.0}, {0.07}}, 0.05);
    write_histogram_csv(dir.path() / "h.csv", h);
    lines = read_lines(dir.path() / "h.csv");
    CHECK(lines[0] == "bin_lo,bin_hi,count");
    CHECK(lines.size() == 1 + h.counts.size());
}
