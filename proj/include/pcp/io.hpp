#pragma once

#include <iosfwd>
#include <string>

#include "pcp/matrix.hpp"

namespace pcp {

enum class MatrixFormat { Csv, Binary };

/// ".pcpm" and ".bin" select the binary format, anything else CSV.
MatrixFormat format_for_path(const std::string& path);

/// CSV: one matrix row per line, '.' decimal separator, comma or whitespace
/// separated. Lines starting with '#' are comments; a leading "# n d" comment,
/// when present, must agree with the data.
Matrix read_csv(std::istream& in);
/// Writes a "# n d" header and each entry with 17 significant digits.
void write_csv(std::ostream& out, const Matrix& m);

/// Binary: magic "PCPM", version u32 = 1, n u64, d u64, then n·d IEEE-754
/// doubles row-major. All integers and doubles little-endian.
Matrix read_binary(std::istream& in);
void write_binary(std::ostream& out, const Matrix& m);

Matrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const Matrix& m);

}  // namespace pcp
