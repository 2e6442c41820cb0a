#include "pcp/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "pcp/error.hpp"

namespace pcp {

namespace {

constexpr std::array<char, 4> kMagic = {'P', 'C', 'P', 'M'};
constexpr std::uint32_t kVersion = 1;

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  auto bits = std::bit_cast<std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  using Bits = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T));
  if (!in) throw IoError("binary matrix: unexpected end of file");
  Bits bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<Bits>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

std::vector<double> parse_row(const std::string& line, std::size_t line_no) {
  std::vector<double> row;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ',' || *p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p >= end) break;
    if (*p == '+') ++p;
    double v = 0.0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || next == p) {
      throw IoError("csv line " + std::to_string(line_no) + ": cannot parse number");
    }
    row.push_back(v);
    p = next;
    if (p < end && *p != ',' && *p != ' ' && *p != '\t' && *p != '\r') {
      throw IoError("csv line " + std::to_string(line_no) + ": unexpected character");
    }
  }
  return row;
}

}  // namespace

MatrixFormat format_for_path(const std::string& path) {
  return ends_with(path, ".pcpm") || ends_with(path, ".bin") ? MatrixFormat::Binary
                                                              : MatrixFormat::Csv;
}

Matrix read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  long declared_n = -1;
  long declared_d = -1;
  bool seen_data = false;
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      if (!seen_data && declared_n < 0) {
        std::istringstream hdr(line.substr(first + 1));
        long n = 0, d = 0;
        if (hdr >> n >> d) {
          declared_n = n;
          declared_d = d;
        }
      }
      continue;
    }
    seen_data = true;
    std::vector<double> row = parse_row(line, line_no);
    if (rows == 0) cols = row.size();
    if (row.size() != cols) {
      throw IoError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                    " values, found " + std::to_string(row.size()));
    }
    data.insert(data.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw IoError("csv: no data rows");
  if (declared_n >= 0 && (static_cast<std::size_t>(declared_n) != rows ||
                          static_cast<std::size_t>(declared_d) != cols)) {
    throw IoError("csv: header declares " + std::to_string(declared_n) + "x" +
                  std::to_string(declared_d) + " but data is " + std::to_string(rows) + "x" +
                  std::to_string(cols));
  }
  return Matrix(rows, cols, std::move(data));
}

void write_csv(std::ostream& out, const Matrix& m) {
  out << "# " << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

Matrix read_binary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw IoError("binary matrix: bad magic bytes");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kVersion) {
    throw IoError("binary matrix: unsupported version " + std::to_string(version));
  }
  const auto n = get_le<std::uint64_t>(in);
  const auto d = get_le<std::uint64_t>(in);
  if (n == 0 || d == 0 || n > (1ULL << 32) || d > (1ULL << 32)) {
    throw IoError("binary matrix: implausible shape");
  }
  std::vector<double> data(n * d);
  for (double& x : data) x = get_le<double>(in);
  return Matrix(n, d, std::move(data));
}

void write_binary(std::ostream& out, const Matrix& m) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint64_t>(out, m.rows());
  put_le<std::uint64_t>(out, m.cols());
  for (double x : m.data()) put_le<double>(out, x);
}

Matrix load_matrix(const std::string& path) {
  const bool binary = format_for_path(path) == MatrixFormat::Binary;
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return binary ? read_binary(in) : read_csv(in);
}

void save_matrix(const std::string& path, const Matrix& m) {
  const bool binary = format_for_path(path) == MatrixFormat::Binary;
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  if (binary) write_binary(out, m);
  else write_csv(out, m);
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace pcp
