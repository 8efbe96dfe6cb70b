#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "irisval/iris_code.hpp"

namespace irisval {

// Fraction of differing bits. Throws InvalidArgument on dimension mismatch.
double hamming(const IrisCode& a, const IrisCode& b);
int differing_bits(const IrisCode& a, const IrisCode& b);

// Cyclic column shift: result(col) = c((col + degrees) mod cols). Both bits of
// a cell move together. shift_code(c, k) is the code of the iris rotated by k
// degrees clockwise, so best_match reports how far b is rotated
// counterclockwise relative to a.
IrisCode shift_code(const IrisCode& c, int degrees);

// Every row stored twice back to back, so any cyclic shift is a contiguous
// bit window. Build once per code when it takes part in many comparisons.
class ShiftableCode {
public:
    explicit ShiftableCode(const IrisCode& code);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int words_per_row() const { return words_per_row_; }
    const std::uint64_t* doubled_row(int row) const { return doubled_.data() + static_cast<std::size_t>(row) * stride_; }

private:
    int rows_;
    int cols_;
    int words_per_row_;
    std::size_t stride_;
    std::vector<std::uint64_t> doubled_;
};

struct MatchScore {
    double hd = 1.0;
    int best_shift = 0;
    int differing_bits = 0;
};

// Minimum Hamming distance over all cyclic shifts s of b; ties resolve to the
// smallest s.
MatchScore best_match(const IrisCode& a, const IrisCode& b);
MatchScore best_match(const IrisCode& a, const ShiftableCode& b);

struct NamedCode {
    std::string id;
    IrisCode code;
};

struct MatchSample {
    std::uint32_t a = 0;  // original index
    std::uint32_t b = 0;  // imposter: second original; authentic: variant index
    double hd = 1.0;
    int best_shift = 0;
};

struct SummaryStats {
    std::size_t count = 0;
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation (n - 1)
    double min = 0.0;
    double max = 0.0;
};

SummaryStats summarize(const std::vector<MatchSample>& samples);

struct HdDistributions {
    std::vector<MatchSample> authentic;
    std::vector<MatchSample> imposter;
    SummaryStats authentic_stats;
    SummaryStats imposter_stats;
    bool authentic_empty = false;
};

struct BatchOptions {
    unsigned threads = 1;
};

// Authentic samples: each original against each of its variants. Imposter
// samples: every unordered pair of originals, ordered (0,1), (0,2), ...
HdDistributions build_distributions(const std::vector<NamedCode>& originals,
                                    const std::vector<std::vector<NamedCode>>& variants,
                                    const BatchOptions& options = {});

inline constexpr int kThresholdGridSize = 100;

struct ThresholdReport {
    std::vector<double> grid;  // 0.00, 0.01, ..., 0.99
    std::vector<double> far_at;
    std::vector<double> frr_at;
    double chosen = 0.0;
    double chosen_far = 0.0;
    double chosen_frr = 0.0;
    std::size_t n_authentic = 0;
    std::size_t n_imposter = 0;
};

// FAR(t) = imposters with hd < t; FRR(t) = authentics with hd >= t. The chosen
// threshold minimises FAR + FRR, ties to the smaller threshold.
ThresholdReport sweep_threshold(const HdDistributions& d);

struct ScreenResult {
    std::string candidate_id;
    double min_hd = 1.0;
    std::string closest_ref;
    int best_shift = 0;
    bool pass = true;
};

struct UniquenessReport {
    double criterion = 0.4;
    std::vector<ScreenResult> results;
    std::size_t passed = 0;
    std::size_t failed = 0;
};

// A candidate fails when its minimum distance to any reference is below the
// criterion. References sharing the candidate's id are skipped.
UniquenessReport uniqueness_screen(const std::vector<NamedCode>& candidates, const std::vector<NamedCode>& reference,
                                   double criterion, const BatchOptions& options = {});

// CSV / JSON exports.
void write_distributions_csv(const std::filesystem::path& path, const HdDistributions& d,
                             const std::vector<NamedCode>& originals,
                             const std::vector<std::vector<NamedCode>>& variants);
void write_threshold_csv(const std::filesystem::path& path, const ThresholdReport& r);
void write_threshold_summary_json(const std::filesystem::path& path, const ThresholdReport& r);
void write_uniqueness_csv(const std::filesystem::path& path, const UniquenessReport& r);

} // namespace irisval
