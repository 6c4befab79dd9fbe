#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace hsevo {

// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  bool square() const { return rows == cols; }

  bool operator==(const Matrix&) const = default;
};

}  // namespace hsevo
