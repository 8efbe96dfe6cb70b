#include "irisval/color.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

namespace irisval {

namespace {

double srgb_to_linear(double c)
{
    c /= 255.0;
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t)
{
    constexpr double delta = 6.0 / 29.0;
    return t > delta * delta * delta ? std::cbrt(t) : t / (3 * delta * delta) + 4.0 / 29.0;
}

double distance(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

void require_dimension(const std::vector<double>& v, std::size_t dim)
{
    if (v.size() != dim) throw InvalidArgument("vector dimension mismatch");
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

DistanceHistogram bin(std::vector<double> values, double width)
{
    if (!(width > 0)) throw InvalidArgument("distance_analysis: bin width must be positive");
    DistanceHistogram h;
    h.bin_width = width;
    h.values = std::move(values);
    double hi = 0;
    for (double v : h.values) hi = std::max(hi, v);
    h.counts.assign(static_cast<std::size_t>(std::floor(hi / width)) + 1, 0);
    for (double v : h.values) {
        const auto i = std::min(static_cast<std::size_t>(std::floor(v / width)), h.counts.size() - 1);
        ++h.counts[i];
    }
    return h;
}

} // namespace

Lab srgb_to_lab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8)
{
    const double r = srgb_to_linear(r8), g = srgb_to_linear(g8), b = srgb_to_linear(b8);
    const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    const double fx = lab_f(x / 0.95047), fy = lab_f(y / 1.0), fz = lab_f(z / 1.08883);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Palette::Palette(std::vector<PaletteEntry> entries) : entries_(std::move(entries))
{
    if (entries_.size() < 2) throw InvalidArgument("Palette: need at least two entries");
    for (const auto& e : entries_) lab_.push_back(srgb_to_lab(e.rgb[0], e.rgb[1], e.rgb[2]));
}

const Palette& Palette::iris_default()
{
    static const Palette p({{"blue-grey", {118, 136, 150}},
                            {"green", {104, 124, 84}},
                            {"light-brown", {150, 105, 60}},
                            {"dark-brown", {72, 44, 26}}});
    return p;
}

std::size_t Palette::nearest(std::uint8_t r, std::uint8_t g, std::uint8_t b) const
{
    const Lab c = srgb_to_lab(r, g, b);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lab_.size(); ++i) {
        const double d = (c.l - lab_[i].l) * (c.l - lab_[i].l) + (c.a - lab_[i].a) * (c.a - lab_[i].a)
                       + (c.b - lab_[i].b) * (c.b - lab_[i].b);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

namespace {

ColorComposition quantify(const RasterImage& img, const IrisBoundaries* b, const Palette& palette, int threshold)
{
    if (!img.is_rgb()) throw InvalidArgument("quantify_colors: expected an RGB image");
    std::vector<std::size_t> counts(palette.size(), 0);
    std::size_t total = 0;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (b) {
                const double rho = std::hypot(x - b->center_x, y - b->center_y);
                if (rho < b->pupil_radius || rho > b->limbic_radius) continue;
            }
            auto px = img.pixel(x, y);
            if (!is_colored(px, threshold)) continue;
            ++counts[palette.nearest(px[0], px[1], px[2])];
            ++total;
        }
    }
    if (total == 0) throw InvalidArgument("quantify_colors: no colored pixels");
    ColorComposition c;
    c.pixel_count = total;
    for (std::size_t n : counts) c.fractions.push_back(static_cast<double>(n) / total);
    return c;
}

} // namespace

ColorComposition quantify_colors(const RasterImage& img, const IrisBoundaries& b, const Palette& palette,
                                 int colored_threshold)
{
    return quantify(img, &b, palette, colored_threshold);
}

ColorComposition quantify_colors(const RasterImage& img, const Palette& palette, int colored_threshold)
{
    return quantify(img, nullptr, palette, colored_threshold);
}

std::vector<std::vector<double>> ilr_basis(std::size_t parts)
{
    if (parts < 2) throw InvalidArgument("ilr_basis: need at least two parts");
    std::vector<std::vector<double>> basis(parts - 1, std::vector<double>(parts, 0.0));
    for (std::size_t i = 1; i < parts; ++i) {
        const double scale = std::sqrt(static_cast<double>(i) / (i + 1));
        for (std::size_t j = 0; j < i; ++j) basis[i - 1][j] = scale / static_cast<double>(i);
        basis[i - 1][i] = -scale;
    }
    return basis;
}

std::vector<double> clr(const std::vector<double>& composition)
{
    std::vector<double> out(composition.size());
    double mean_log = 0;
    for (std::size_t i = 0; i < composition.size(); ++i) {
        if (!(composition[i] > 0)) throw InvalidArgument("clr: parts must be positive");
        out[i] = std::log(composition[i]);
        mean_log += out[i];
    }
    mean_log /= static_cast<double>(composition.size());
    for (double& v : out) v -= mean_log;
    return out;
}

std::vector<double> ilr_transform(const std::vector<double>& fractions, double pseudo)
{
    if (fractions.size() < 2) throw InvalidArgument("ilr_transform: need at least two parts");
    std::vector<double> x = fractions;
    for (double& v : x) {
        if (v < 0) throw InvalidArgument("ilr_transform: negative fraction");
        if (v == 0) v = pseudo;
    }
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    for (double& v : x) v /= total;
    const auto c = clr(x);
    const auto basis = ilr_basis(x.size());
    std::vector<double> out(basis.size(), 0.0);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = 0; j < c.size(); ++j) out[i] += basis[i][j] * c[j];
    }
    return out;
}

std::vector<double> ilr_transform(const ColorComposition& c, double pseudo)
{
    return ilr_transform(c.fractions, pseudo);
}

SymmetricEigen symmetric_eigen(std::vector<std::vector<double>> a)
{
    const std::size_t n = a.size();
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        require_dimension(a[i], n);
        v[i][i] = 1.0;
    }

    double norm = 0;
    for (const auto& row : a) {
        for (double x : row) norm += x * x;
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        }
        if (off <= 1e-32 * norm || off == 0.0) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    SymmetricEigen out;
    std::vector<std::vector<double>> vecs(n, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) vecs[j][k] = v[k][j];
        // Sign: first non-negligible coordinate positive.
        for (double x : vecs[j]) {
            if (std::abs(x) > 1e-12) {
                if (x < 0) {
                    for (double& y : vecs[j]) y = -y;
                }
                break;
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const double tie = 1e-12 * std::max(1.0, std::sqrt(norm));
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (std::abs(a[i][i] - a[j][j]) > tie) return a[i][i] > a[j][j];
        return vecs[i] > vecs[j];
    });
    for (std::size_t i : order) {
        out.values.push_back(a[i][i]);
        out.vectors.push_back(vecs[i]);
    }
    return out;
}

PcaModel pca_fit(const std::vector<std::vector<double>>& vectors, std::size_t k)
{
    if (vectors.size() < 2) throw InvalidArgument("pca_fit: need at least two vectors");
    const std::size_t dim = vectors.front().size();
    if (dim == 0 || k < 1 || k > dim) throw InvalidArgument("pca_fit: component count out of range");
    for (const auto& v : vectors) require_dimension(v, dim);

    PcaModel m;
    m.mean.assign(dim, 0.0);
    for (const auto& v : vectors) {
        for (std::size_t i = 0; i < dim; ++i) m.mean[i] += v[i];
    }
    for (double& x : m.mean) x /= static_cast<double>(vectors.size());

    std::vector<std::vector<double>> cov(dim, std::vector<double>(dim, 0.0));
    for (const auto& v : vectors) {
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) cov[i][j] += (v[i] - m.mean[i]) * (v[j] - m.mean[j]);
        }
    }
    for (auto& row : cov) {
        for (double& x : row) x /= static_cast<double>(vectors.size() - 1);
    }
    auto eig = symmetric_eigen(std::move(cov));
    for (std::size_t i = 0; i < k; ++i) {
        m.components.push_back(eig.vectors[i]);
        m.variances.push_back(std::max(0.0, eig.values[i]));
    }
    return m;
}

std::vector<double> pca_project(const PcaModel& m, const std::vector<double>& v)
{
    require_dimension(v, m.mean.size());
    std::vector<double> out(m.components.size(), 0.0);
    for (std::size_t c = 0; c < m.components.size(); ++c) {
        for (std::size_t i = 0; i < v.size(); ++i) out[c] += m.components[c][i] * (v[i] - m.mean[i]);
    }
    return out;
}

std::vector<double> pca_reconstruct(const PcaModel& m, const std::vector<double>& coords)
{
    require_dimension(coords, m.components.size());
    std::vector<double> out = m.mean;
    for (std::size_t c = 0; c < coords.size(); ++c) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += coords[c] * m.components[c][i];
    }
    return out;
}

DistanceHistogram distance_analysis(const std::vector<std::vector<double>>& a, double bin_width)
{
    if (a.empty()) throw InvalidArgument("distance_analysis: empty set");
    std::vector<double> values;
    values.reserve(a.size() * (a.size() - 1) / 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            require_dimension(a[j], a[i].size());
            values.push_back(distance(a[i], a[j]));
        }
    }
    return bin(std::move(values), bin_width);
}

DistanceHistogram distance_analysis(const std::vector<std::vector<double>>& a,
                                    const std::vector<std::vector<double>>& b, double bin_width)
{
    if (a.empty() || b.empty()) throw InvalidArgument("distance_analysis: empty set");
    std::vector<double> values;
    values.reserve(b.size());
    for (const auto& q : b) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : a) {
            require_dimension(q, p.size());
            best = std::min(best, distance(p, q));
        }
        values.push_back(best);
    }
    return bin(std::move(values), bin_width);
}

void write_ilr_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                   const std::vector<std::vector<double>>& vectors)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot create " + path.string());
    out << "id";
    const std::size_t dim = vectors.empty() ? 0 : vectors.front().size();
    for (std::size_t i = 1; i <= dim; ++i) out << ",ilr" << i;
    out << '\n';
    for (std::size_t r = 0; r < ids.size(); ++r) {
        out << ids[r];
        for (double v : vectors[r]) out << ',' << fmt(v);
        out << '\n';
    }
}

void write_pca_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                   const std::vector<std::string>& set_labels, const std::vector<std::vector<double>>& coords)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot create " + path.string());
    out << "id,set";
    const std::size_t dim = coords.empty() ? 0 : coords.front().size();
    for (std::size_t i = 1; i <= dim; ++i) out << ",pc" << i;
    out << '\n';
    for (std::size_t r = 0; r < ids.size(); ++r) {
        out << ids[r] << ',' << set_labels[r];
        for (double v : coords[r]) out << ',' << fmt(v);
        out << '\n';
    }
}

void write_histogram_csv(const std::filesystem::path& path, const DistanceHistogram& h)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot create " + path.string());
    out << "bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        out << fmt(i * h.bin_width) << ',' << fmt((i + 1) * h.bin_width) << ',' << h.counts[i] << '\n';
    }
}

} // namespace irisval
