#include "irisval/matching.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "irisval/parallel.hpp"

namespace irisval {

namespace {

void require_same_shape(const IrisCode& a, int rows, int cols)
{
    if (a.rows() != rows || a.cols() != cols) {
        throw InvalidArgument("iris codes differ in dimensions");
    }
}

// Appends nbits (MSB-first) from src to dst starting at bit position pos.
void append_bits(std::vector<std::uint64_t>& dst, std::size_t pos, const std::uint64_t* src, int nbits)
{
    for (int k = 0; k < nbits; k += 64) {
        const int take = std::min(64, nbits - k);
        std::uint64_t word = src[k / 64];
        if (take < 64) word &= ~std::uint64_t{0} << (64 - take);
        const std::size_t at = pos + static_cast<std::size_t>(k);
        const int off = static_cast<int>(at & 63);
        dst[at >> 6] |= word >> off;
        if (off != 0 && off + take > 64) dst[(at >> 6) + 1] |= word << (64 - off);
    }
}

std::string fmt_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

int differing_bits(const IrisCode& a, const IrisCode& b)
{
    require_same_shape(b, a.rows(), a.cols());
    int diff = 0;
    for (int r = 0; r < a.rows(); ++r) {
        const auto wa = a.row_words(r);
        const auto wb = b.row_words(r);
        for (std::size_t k = 0; k < wa.size(); ++k) diff += std::popcount(wa[k] ^ wb[k]);
    }
    return diff;
}

double hamming(const IrisCode& a, const IrisCode& b)
{
    return static_cast<double>(differing_bits(a, b)) / a.bit_count();
}

IrisCode shift_code(const IrisCode& c, int degrees)
{
    const int cols = c.cols();
    const int s = ((degrees % cols) + cols) % cols;
    if (s == 0) return c;
    const ShiftableCode doubled(c);
    IrisCode out(c.rows(), cols);
    const int row_bits = 2 * cols;
    for (int r = 0; r < c.rows(); ++r) {
        const std::uint64_t* d = doubled.doubled_row(r);
        for (int k = 0; k < row_bits; ++k) {
            const int src = k + 2 * s;
            out.set_bit(r, k, (d[src >> 6] >> (63 - (src & 63))) & 1u);
        }
    }
    return out;
}

ShiftableCode::ShiftableCode(const IrisCode& code)
    : rows_(code.rows()), cols_(code.cols()), words_per_row_(code.words_per_row())
{
    const int row_bits = 2 * cols_;
    // Two copies plus one spare word so window reads never run off the end.
    stride_ = static_cast<std::size_t>((2 * row_bits + 63) / 64 + 1);
    doubled_.assign(stride_ * rows_, 0);
    std::vector<std::uint64_t> scratch(stride_);
    for (int r = 0; r < rows_; ++r) {
        std::fill(scratch.begin(), scratch.end(), 0);
        const std::uint64_t* src = code.row_words(r).data();
        append_bits(scratch, 0, src, row_bits);
        append_bits(scratch, static_cast<std::size_t>(row_bits), src, row_bits);
        std::copy(scratch.begin(), scratch.end(), doubled_.begin() + static_cast<std::ptrdiff_t>(stride_ * r));
    }
}

MatchScore best_match(const IrisCode& a, const ShiftableCode& b)
{
    require_same_shape(a, b.rows(), b.cols());
    const int rows = a.rows();
    const int cols = a.cols();
    const int words = a.words_per_row();
    const int tail_bits = 2 * cols - 64 * (words - 1);
    const std::uint64_t tail_mask = ~std::uint64_t{0} << (64 - tail_bits);

    int best = std::numeric_limits<int>::max();
    int best_shift = 0;
    for (int s = 0; s < cols && best > 0; ++s) {
        const int offset = 2 * s;
        const int q = offset >> 6;
        const int r = offset & 63;
        int count = 0;
        for (int row = 0; row < rows && count < best; ++row) {
            const std::uint64_t* wa = a.row_words(row).data();
            const std::uint64_t* d = b.doubled_row(row) + q;
            if (r == 0) {
                for (int k = 0; k < words - 1; ++k) count += std::popcount(wa[k] ^ d[k]);
                count += std::popcount(wa[words - 1] ^ (d[words - 1] & tail_mask));
            } else {
                for (int k = 0; k < words - 1; ++k) {
                    count += std::popcount(wa[k] ^ ((d[k] << r) | (d[k + 1] >> (64 - r))));
                }
                const std::uint64_t last = ((d[words - 1] << r) | (d[words] >> (64 - r))) & tail_mask;
                count += std::popcount(wa[words - 1] ^ last);
            }
        }
        // Abandoned rows leave count >= best, so only complete sums win.
        if (count < best) {
            best = count;
            best_shift = s;
        }
    }
    return {static_cast<double>(best) / a.bit_count(), best_shift, best};
}

MatchScore best_match(const IrisCode& a, const IrisCode& b)
{
    return best_match(a, ShiftableCode(b));
}

SummaryStats summarize(const std::vector<MatchSample>& samples)
{
    SummaryStats s;
    s.count = samples.size();
    if (samples.empty()) return s;
    s.min = samples.front().hd;
    s.max = samples.front().hd;
    double sum = 0;
    for (const auto& m : samples) {
        sum += m.hd;
        s.min = std::min(s.min, m.hd);
        s.max = std::max(s.max, m.hd);
    }
    s.mean = sum / samples.size();
    if (samples.size() > 1) {
        double ss = 0;
        for (const auto& m : samples) ss += (m.hd - s.mean) * (m.hd - s.mean);
        s.sd = std::sqrt(ss / (samples.size() - 1));
    }
    return s;
}

HdDistributions build_distributions(const std::vector<NamedCode>& originals,
                                    const std::vector<std::vector<NamedCode>>& variants,
                                    const BatchOptions& options)
{
    const std::size_t n = originals.size();
    if (n < 2) throw InvalidArgument("build_distributions: need at least 2 originals");
    if (!variants.empty() && variants.size() != n) {
        throw InvalidArgument("build_distributions: variant lists must match originals");
    }

    HdDistributions d;
    std::vector<ShiftableCode> prepared;
    prepared.reserve(n);
    for (const auto& o : originals) prepared.emplace_back(o.code);

    // Authentic: row offsets fixed up front so slots are schedule-independent.
    std::vector<std::size_t> auth_offset(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auth_offset[i + 1] = auth_offset[i] + (variants.empty() ? 0 : variants[i].size());
    }
    d.authentic.resize(auth_offset[n]);
    parallel_for(n, options.threads, [&](std::size_t i) {
        if (variants.empty()) return;
        for (std::size_t v = 0; v < variants[i].size(); ++v) {
            const MatchScore m = best_match(originals[i].code, ShiftableCode(variants[i][v].code));
            d.authentic[auth_offset[i] + v] = {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(v), m.hd,
                                               m.best_shift};
        }
    });

    // Imposter pair (i, j), i < j, lives at index i*n - i*(i+1)/2 + (j - i - 1).
    d.imposter.resize(n * (n - 1) / 2);
    parallel_for(n - 1, options.threads, [&](std::size_t i) {
        const std::size_t base = i * n - i * (i + 1) / 2;
        for (std::size_t j = i + 1; j < n; ++j) {
            const MatchScore m = best_match(originals[i].code, prepared[j]);
            d.imposter[base + (j - i - 1)] = {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), m.hd,
                                              m.best_shift};
        }
    });

    d.authentic_stats = summarize(d.authentic);
    d.imposter_stats = summarize(d.imposter);
    d.authentic_empty = d.authentic.empty();
    return d;
}

ThresholdReport sweep_threshold(const HdDistributions& d)
{
    if (d.authentic.empty() || d.imposter.empty()) {
        throw InvalidArgument("sweep_threshold: authentic and imposter samples are both required");
    }
    ThresholdReport r;
    r.n_authentic = d.authentic.size();
    r.n_imposter = d.imposter.size();
    const auto na = static_cast<long double>(r.n_authentic);
    const auto ni = static_cast<long double>(r.n_imposter);

    std::size_t best_i = 0;
    unsigned __int128 best_key = 0;
    for (int i = 0; i < kThresholdGridSize; ++i) {
        const double t = i / 100.0;
        std::size_t false_accept = 0, false_reject = 0;
        for (const auto& m : d.imposter) false_accept += m.hd < t;
        for (const auto& m : d.authentic) false_reject += m.hd >= t;
        r.grid.push_back(t);
        r.far_at.push_back(static_cast<double>(false_accept / ni));
        r.frr_at.push_back(static_cast<double>(false_reject / na));
        // FAR + FRR compared exactly as (fa * na + fr * ni) / (ni * na).
        const unsigned __int128 key = static_cast<unsigned __int128>(false_accept) * r.n_authentic
                                    + static_cast<unsigned __int128>(false_reject) * r.n_imposter;
        if (i == 0 || key < best_key) {
            best_key = key;
            best_i = static_cast<std::size_t>(i);
        }
    }
    r.chosen = r.grid[best_i];
    r.chosen_far = r.far_at[best_i];
    r.chosen_frr = r.frr_at[best_i];
    return r;
}

UniquenessReport uniqueness_screen(const std::vector<NamedCode>& candidates, const std::vector<NamedCode>& reference,
                                   double criterion, const BatchOptions& options)
{
    if (!(criterion > 0.0 && criterion < 1.0)) {
        throw InvalidArgument("uniqueness_screen: criterion must lie in (0, 1)");
    }
    if (reference.empty()) throw InvalidArgument("uniqueness_screen: empty reference set");

    std::vector<ShiftableCode> prepared;
    prepared.reserve(reference.size());
    for (const auto& r : reference) prepared.emplace_back(r.code);

    UniquenessReport report;
    report.criterion = criterion;
    report.results.resize(candidates.size());
    parallel_for(candidates.size(), options.threads, [&](std::size_t c) {
        ScreenResult res;
        res.candidate_id = candidates[c].id;
        int best_bits = std::numeric_limits<int>::max();
        for (std::size_t r = 0; r < reference.size(); ++r) {
            if (reference[r].id == candidates[c].id) continue;
            const MatchScore m = best_match(candidates[c].code, prepared[r]);
            if (m.differing_bits < best_bits) {
                best_bits = m.differing_bits;
                res.min_hd = m.hd;
                res.closest_ref = reference[r].id;
                res.best_shift = m.best_shift;
            }
        }
        res.pass = !(res.min_hd < criterion);
        report.results[c] = std::move(res);
    });
    for (const auto& r : report.results) (r.pass ? report.passed : report.failed)++;
    return report;
}

void write_distributions_csv(const std::filesystem::path& path, const HdDistributions& d,
                             const std::vector<NamedCode>& originals,
                             const std::vector<std::vector<NamedCode>>& variants)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot create " + path.string());
    out << "kind,id_a,id_b,hd,best_shift\n";
    for (const auto& m : d.authentic) {
        out << "authentic," << originals[m.a].id << ',' << variants[m.a][m.b].id << ',' << fmt_double(m.hd) << ','
            << m.best_shift << '\n';
    }
    for (const auto& m : d.imposter) {
        out << "imposter," << originals[m.a].id << ',' << originals[m.b].id << ',' << fmt_double(m.hd) << ','
            << m.best_shift << '\n';
    }
}

void write_threshold_csv(const std::filesystem::path& path, const ThresholdReport& r)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot create " + path.string());
    out << "threshold,far,frr\n";
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        out << fmt_double(r.grid[i]) << ',' << fmt_double(r.far_at[i]) << ',' << fmt_double(r.frr_at[i]) << '\n';
    }
}

void write_threshold_summary_json(const std::filesystem::path& path, const ThresholdReport& r)
{
    const nlohmann::json j = {{"chosen", r.chosen},
                              {"far", r.chosen_far},
                              {"frr", r.chosen_frr},
                              {"n_authentic", r.n_authentic},
                              {"n_imposter", r.n_imposter}};
    std::ofstream out(path);
    if (!out) throw Error("cannot create " + path.string());
    out << j.dump(2) << '\n';
}

void write_uniqueness_csv(const std::filesystem::path& path, const UniquenessReport& r)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot create " + path.string());
    out << "candidate_id,min_hd,closest_ref,pass\n";
    for (const auto& s : r.results) {
        out << s.candidate_id << ',' << fmt_double(s.min_hd) << ',' << s.closest_ref << ','
            << (s.pass ? "true" : "false") << '\n';
    }
}

} // namespace irisval
