#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "irisval/image.hpp"

namespace irisval {

inline constexpr int kCodeRows = 45;
inline constexpr int kCodeCols = 360;
inline constexpr int kCodeBits = kCodeRows * kCodeCols * 2;
inline constexpr int kCodePayloadBytes = kCodeBits / 8;
inline constexpr int kCodeFileBytes = 4 + 2 + 2 + kCodePayloadBytes;

class FormatError : public Error {
public:
    using Error::Error;
};

// Phase-quantised template: rows x cols cells, two bits per cell (real-sign
// then imaginary-sign). Each row is stored as a run of 2*cols bits packed
// most-significant-bit first into 64-bit words.
class IrisCode {
public:
    IrisCode() : IrisCode(kCodeRows, kCodeCols) {}
    IrisCode(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int bit_count() const { return rows_ * cols_ * 2; }
    int words_per_row() const { return words_per_row_; }

    bool real_bit(int row, int col) const { return bit(row, 2 * col); }
    bool imag_bit(int row, int col) const { return bit(row, 2 * col + 1); }
    void set_cell(int row, int col, bool real, bool imag);

    // Bit k of the row's 2*cols-bit run.
    bool bit(int row, int k) const
    {
        return (row_words(row)[k >> 6] >> (63 - (k & 63))) & 1u;
    }
    void set_bit(int row, int k, bool v);

    std::span<const std::uint64_t> row_words(int row) const
    {
        return {words_.data() + static_cast<std::size_t>(row) * words_per_row_,
                static_cast<std::size_t>(words_per_row_)};
    }

    // Contiguous MSB-first payload: rows outer, columns inner, real then imag.
    std::vector<std::uint8_t> packed() const;
    static IrisCode from_packed(int rows, int cols, std::span<const std::uint8_t> payload);

    bool operator==(const IrisCode&) const = default;

private:
    int rows_;
    int cols_;
    int words_per_row_;
    std::vector<std::uint64_t> words_;
};

// File form: "IRC1", rows (u16 LE), cols (u16 LE), payload.
std::vector<std::uint8_t> serialize_iris_code(const IrisCode& code);
IrisCode deserialize_iris_code(std::span<const std::uint8_t> bytes);

void write_iris_code(const std::filesystem::path& path, const IrisCode& code);
IrisCode read_iris_code(const std::filesystem::path& path);

} // namespace irisval
