#pragma once

#include <cstddef>
#include <vector>

namespace blockwatch {

/// Dense row-major matrix of doubles. Deliberately minimal: the pipeline
/// moves fixed-schema feature tables around, nothing more.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) out[r] = at(r, c);
    return out;
  }

  Matrix select_columns(const std::vector<std::size_t>& keep) const {
    Matrix out(rows, keep.size());
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < keep.size(); ++j) out.at(r, j) = at(r, keep[j]);
    return out;
  }

  Matrix select_rows(const std::vector<std::size_t>& keep) const {
    Matrix out(keep.size(), cols);
    for (std::size_t i = 0; i < keep.size(); ++i)
      for (std::size_t c = 0; c < cols; ++c) out.at(i, c) = at(keep[i], c);
    return out;
  }

  bool operator==(const Matrix& o) const {
    return rows == o.rows && cols == o.cols && data == o.data;
  }
};

}  // namespace blockwatch
