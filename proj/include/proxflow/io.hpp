#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace proxflow {

/// Flat binary matrix format: 16-byte header (8-byte ASCII magic "PROXMAT1",
/// uint32 rows, uint32 cols, little-endian) followed by rows*cols doubles,
/// row-major, little-endian. Vectors are stored as single-column matrices.
struct MatrixFile {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<double> data;
};

void write_matrix_binary(const std::string& path, std::uint32_t rows, std::uint32_t cols,
                         std::span<const double> data);
MatrixFile read_matrix_binary(const std::string& path);

void write_matrix_csv(const std::string& path, std::uint32_t rows, std::uint32_t cols,
                      std::span<const double> data);

}  // namespace proxflow
