#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pcp {

/// Dense real matrix stored row-major.
///
/// Factor matrices may legitimately have zero columns (the left factor of a
/// rank-0 matrix, for instance), so the type itself admits empty shapes.
/// User-facing entry points validate inputs with `require_input`.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  /// Takes ownership of `data`; throws InvalidMatrix on a size mismatch or a
  /// non-finite entry.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix diagonal(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::vector<double> col(std::size_t j) const;

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Throws InvalidMatrix unless `a` is at least 1x1 with finite entries.
void require_input(const Matrix& a, const char* what = "matrix");
bool all_finite(const Matrix& a) noexcept;

Matrix transpose(const Matrix& a);
/// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
/// aᵀ * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a * bᵀ
Matrix matmul_nt(const Matrix& a, const Matrix& b);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

double frobenius_norm_sq(const Matrix& a) noexcept;
double frobenius_norm(const Matrix& a) noexcept;
double max_abs(const Matrix& a) noexcept;
/// max |aᵀa − I| entrywise.
double orthonormality_defect(const Matrix& a);

/// The first `count` columns of `a`.
Matrix leading_columns(const Matrix& a, std::size_t count);
Matrix select_columns(const Matrix& a, std::span<const std::size_t> indices);

}  // namespace pcp
