#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "irisval/encoding.hpp"
#include "irisval/matching.hpp"
#include "irisval/oracles.hpp"
#include "irisval/synth.hpp"

using namespace irisval;

namespace {

PolarStrip random_strip(std::uint64_t seed)
{
    return PolarStrip(testing_support::random_image(kCodeCols, kCodeRows, 1, seed));
}

IrisCode random_code(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    IrisCode c;
    for (int r = 0; r < c.rows(); ++r) {
        for (int k = 0; k < 2 * c.cols(); ++k) c.set_bit(r, k, rng() & 1);
    }
    return c;
}

std::vector<double> cosine(int k, double phase = 0.0)
{
    std::vector<double> v(kCodeCols);
    for (int j = 0; j < kCodeCols; ++j) v[j] = std::cos(2.0 * std::numbers::pi * k * j / kCodeCols + phase);
    return v;
}

} // namespace

TEST_CASE("log-gabor transfer function")
{
    const auto g = log_gabor_transfer(kCodeCols, GaborParams{});
    REQUIRE(g.size() == 360);
    // Independent evaluation of exp(-ln(f/f0)^2 / (2 ln(0.5)^2)), f0 = 1/18.
    CHECK(g[5] == doctest::Approx(0.1353352832366127).epsilon(1e-12));
    CHECK(g[10] == doctest::Approx(0.6065306597126334).epsilon(1e-12));
    CHECK(g[20] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g[40] == doctest::Approx(0.6065306597126334).epsilon(1e-12));
    CHECK(g[80] == doctest::Approx(0.1353352832366127).epsilon(1e-12));
    CHECK(g[0] == 0.0);
    for (int k = 181; k < 360; ++k) CHECK(g[k] == 0.0);
    for (int k = 1; k <= 180; ++k) CHECK(g[k] <= g[20]);

    CHECK_THROWS_AS(log_gabor_transfer(360, GaborParams{1.5, 0.5}), InvalidArgument);
    CHECK_THROWS_AS(log_gabor_transfer(360, GaborParams{18.0, 1.0}), InvalidArgument);
}

TEST_CASE("log-gabor filtering")
{
    SUBCASE("zero and constant rows give zero response")
    {
        for (double level : {0.0, 77.0}) {
            const std::vector<double> row(360, level);
            for (const auto& z : log_gabor_row(row)) CHECK(std::abs(z) < 1e-12);
        }
    }

    SUBCASE("pure tones are scaled by half the transfer gain")
    {
        const auto g = log_gabor_transfer(kCodeCols, GaborParams{});
        for (int k : {5, 10, 20, 40, 80}) {
            const auto resp = log_gabor_row(cosine(k, 0.3));
            for (int j = 0; j < 360; j += 17) CHECK(std::abs(resp[j]) == doctest::Approx(0.5 * g[k]).epsilon(1e-9));
        }
        double best = 0.0;
        int best_k = 0;
        for (int k = 1; k < 180; ++k) {
            const double m = std::abs(log_gabor_row(cosine(k))[0]);
            if (m > best) {
                best = m;
                best_k = k;
            }
        }
        CHECK(best_k == 20);
    }

    SUBCASE("matches a direct DFT implementation")
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.0, 255.0);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> row(360);
            for (auto& v : row) v = u(rng);
            const auto fast = log_gabor_row(row);
            const auto slow = oracle::log_gabor_dft(row, GaborParams{});
            for (int j = 0; j < 360; ++j) CHECK(std::abs(fast[j] - slow[j]) < 1e-9);
        }
    }

    SUBCASE("wrong row length throws")
    {
        CHECK_THROWS_AS(log_gabor_row(std::vector<double>(100, 1.0)), InvalidArgument);
    }
}

TEST_CASE("encode")
{
    SUBCASE("geometry")
    {
        const IrisCode c = encode(NormalizedIris(random_strip(1)));
        CHECK(c.rows() == 45);
        CHECK(c.cols() == 360);
        CHECK(c.bit_count() == 32400);
        CHECK(c.packed().size() == 4050);
    }

    SUBCASE("column roll shifts the code exactly")
    {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const PolarStrip s = random_strip(seed);
            const IrisCode base = encode(NormalizedIris(s));
            for (int k : {1, 30, 179, 359}) {
                const IrisCode rolled = encode(NormalizedIris(PolarStrip(roll_columns(s.image(), k))));
                CHECK(rolled == shift_code(base, -k));
            }
        }
    }

    SUBCASE("bits follow the response signs")
    {
        const PolarStrip s = random_strip(9);
        const IrisCode c = encode(NormalizedIris(s));
        const LogGaborFilter f(360, GaborParams{});
        for (int r : {0, 22, 44}) {
            const auto row = s.image().data().subspan(static_cast<std::size_t>(r) * 360, 360);
            const auto resp = f.apply(std::span<const std::uint8_t>(row));
            for (int col = 0; col < 360; ++col) {
                CHECK(c.real_bit(r, col) == (resp[col].real() >= 0.0));
                CHECK(c.imag_bit(r, col) == (resp[col].imag() >= 0.0));
            }
        }
    }

    SUBCASE("random strips give balanced codes")
    {
        const IrisCode c = encode(NormalizedIris(random_strip(5)));
        int ones = 0;
        for (int r = 0; r < 45; ++r) {
            for (int k = 0; k < 720; ++k) ones += c.bit(r, k);
        }
        CHECK(ones > 0.45 * 32400);
        CHECK(ones < 0.55 * 32400);
    }
}

TEST_CASE("quantize_responses")
{
    const std::vector<std::complex<double>> z{{1.0, -1.0}, {0.0, 0.0}, {-2.0, 3.0}, {-0.0, -1e-300}};
    const IrisCode c = quantize_responses(1, 4, z);
    CHECK(c.real_bit(0, 0));
    CHECK_FALSE(c.imag_bit(0, 0));
    CHECK(c.real_bit(0, 1));
    CHECK(c.imag_bit(0, 1));
    CHECK_FALSE(c.real_bit(0, 2));
    CHECK(c.imag_bit(0, 2));
    CHECK(c.real_bit(0, 3));
    CHECK_FALSE(c.imag_bit(0, 3));
    CHECK_THROWS_AS(quantize_responses(2, 4, z), InvalidArgument);
}

TEST_CASE("iris code storage")
{
    SUBCASE("cell layout")
    {
        IrisCode c;
        c.set_cell(3, 100, true, false);
        CHECK(c.bit(3, 200));
        CHECK_FALSE(c.bit(3, 201));
        c.set_cell(3, 100, false, true);
        CHECK_FALSE(c.bit(3, 200));
        CHECK(c.bit(3, 201));
        const auto bytes = c.packed();
        // Row 3 starts at bit 3 * 720; bit 201 of the row is MSB-first.
        const int abs_bit = 3 * 720 + 201;
        CHECK(((bytes[abs_bit / 8] >> (7 - abs_bit % 8)) & 1) == 1);
    }

    SUBCASE("pack round trip")
    {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const IrisCode c = random_code(seed);
            CHECK(IrisCode::from_packed(45, 360, c.packed()) == c);
        }
        const IrisCode odd = [] {
            IrisCode c(3, 7);
            c.set_cell(2, 6, true, true);
            return c;
        }();
        CHECK(IrisCode::from_packed(3, 7, odd.packed()) == odd);
    }

    SUBCASE("file format")
    {
        testing_support::TempDir dir("code");
        const IrisCode c = random_code(3);
        const auto path = dir.path() / "a.icode";
        write_iris_code(path, c);
        CHECK(std::filesystem::file_size(path) == 4058);
        CHECK(read_iris_code(path) == c);
        const auto bytes = serialize_iris_code(c);
        CHECK(bytes[0] == 'I');
        CHECK(bytes[3] == '1');
        CHECK((bytes[4] | (bytes[5] << 8)) == 45);
        CHECK((bytes[6] | (bytes[7] << 8)) == 360);
    }

    SUBCASE("malformed input")
    {
        auto bytes = serialize_iris_code(random_code(4));
        auto bad = bytes;
        bad[0] = 'X';
        CHECK_THROWS_AS(deserialize_iris_code(bad), FormatError);
        bytes.pop_back();
        CHECK_THROWS_AS(deserialize_iris_code(bytes), FormatError);
        CHECK_THROWS_AS(deserialize_iris_code(std::vector<std::uint8_t>{'I', 'R'}), FormatError);
    }
}

TEST_CASE("normalize")
{
    SUBCASE("dimensions and constant input")
    {
        const RasterImage flat(256, 256, 3, 120);
        const NormalizedIris n = normalize(flat, centered_boundaries(256, 45, 85));
        CHECK(n.strip().radial_size() == 45);
        CHECK(n.strip().angular_size() == 360);
        CHECK(n.strip().channels() == 1);
        const auto first = n.strip().image().data()[0];
        for (auto v : n.strip().image().data()) CHECK(v == first);
    }

    SUBCASE("rotating the eye rolls the strip")
    {
        const RasterImage eye = synthetic_iris(12);
        const IrisBoundaries b = centered_boundaries(256, 45, 85);
        const RasterImage base = normalize(eye, b).strip().image();
        for (int k : {30, 90, 150}) {
            const RasterImage turned = normalize(rotate(eye, k), b).strip().image();
            const RasterImage expected = roll_columns(base, k);
            double err = 0.0;
            for (std::size_t i = 0; i < turned.data().size(); ++i) {
                err += std::abs(turned.data()[i] - expected.data()[i]);
            }
            CHECK(err / turned.data().size() <= 6.0);
        }
    }

    CHECK_THROWS_AS(NormalizedIris(PolarStrip(44, 360, 1)), InvalidArgument);
    CHECK_THROWS_AS(NormalizedIris(PolarStrip(45, 360, 3)), InvalidArgument);
}
