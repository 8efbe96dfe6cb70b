#include "irisval/iris_code.hpp"

#include <fstream>
#include <iterator>

namespace irisval {

IrisCode::IrisCode(int rows, int cols)
    : rows_(rows), cols_(cols), words_per_row_((2 * cols + 63) / 64)
{
    if (rows < 1 || cols < 1 || rows > 0xffff || cols > 0xffff) {
        throw InvalidArgument("IrisCode: bad dimensions");
    }
    words_.assign(static_cast<std::size_t>(rows) * words_per_row_, 0);
}

void IrisCode::set_bit(int row, int k, bool v)
{
    std::uint64_t& w = words_[static_cast<std::size_t>(row) * words_per_row_ + (k >> 6)];
    const std::uint64_t m = std::uint64_t{1} << (63 - (k & 63));
    w = v ? (w | m) : (w & ~m);
}

void IrisCode::set_cell(int row, int col, bool real, bool imag)
{
    set_bit(row, 2 * col, real);
    set_bit(row, 2 * col + 1, imag);
}

std::vector<std::uint8_t> IrisCode::packed() const
{
    const std::size_t total = static_cast<std::size_t>(bit_count());
    std::vector<std::uint8_t> out((total + 7) / 8, 0);
    std::size_t pos = 0;
    const int row_bits = 2 * cols_;
    for (int r = 0; r < rows_; ++r) {
        for (int k = 0; k < row_bits; ++k, ++pos) {
            if (bit(r, k)) out[pos >> 3] |= static_cast<std::uint8_t>(0x80u >> (pos & 7));
        }
    }
    return out;
}

IrisCode IrisCode::from_packed(int rows, int cols, std::span<const std::uint8_t> payload)
{
    IrisCode code(rows, cols);
    const std::size_t total = static_cast<std::size_t>(code.bit_count());
    if (payload.size() != (total + 7) / 8) {
        throw FormatError("iris code payload has " + std::to_string(payload.size()) + " bytes, expected "
                          + std::to_string((total + 7) / 8));
    }
    std::size_t pos = 0;
    const int row_bits = 2 * cols;
    for (int r = 0; r < rows; ++r) {
        for (int k = 0; k < row_bits; ++k, ++pos) {
            if ((payload[pos >> 3] >> (7 - (pos & 7))) & 1u) code.set_bit(r, k, true);
        }
    }
    return code;
}

std::vector<std::uint8_t> serialize_iris_code(const IrisCode& code)
{
    std::vector<std::uint8_t> out = {'I', 'R', 'C', '1'};
    auto put16 = [&](int v) {
        out.push_back(static_cast<std::uint8_t>(v & 0xff));
        out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    };
    put16(code.rows());
    put16(code.cols());
    const auto payload = code.packed();
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

IrisCode deserialize_iris_code(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 8 || bytes[0] != 'I' || bytes[1] != 'R' || bytes[2] != 'C' || bytes[3] != '1') {
        throw FormatError("bad iris code magic");
    }
    const int rows = bytes[4] | (bytes[5] << 8);
    const int cols = bytes[6] | (bytes[7] << 8);
    if (rows < 1 || cols < 1) throw FormatError("iris code has zero dimensions");
    return IrisCode::from_packed(rows, cols, bytes.subspan(8));
}

void write_iris_code(const std::filesystem::path& path, const IrisCode& code)
{
    const auto bytes = serialize_iris_code(code);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed writing " + path.string());
}

IrisCode read_iris_code(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    try {
        return deserialize_iris_code(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

} // namespace irisval
