#include "proxflow/io.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>

#include "proxflow/errors.hpp"

namespace proxflow {

namespace {
constexpr char kMagic[8] = {'P', 'R', 'O', 'X', 'M', 'A', 'T', '1'};
}

void write_matrix_binary(const std::string& path, std::uint32_t rows, std::uint32_t cols,
                         std::span<const double> data) {
  if (data.size() != static_cast<std::size_t>(rows) * cols)
    throw DimensionError("write_matrix_binary: data size does not match rows*cols");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(kMagic, 8);
  f.write(reinterpret_cast<const char*>(&rows), 4);
  f.write(reinterpret_cast<const char*>(&cols), 4);
  f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * 8));
  if (!f) throw IoError("short write to '" + path + "'");
}

MatrixFile read_matrix_binary(const std::string& path) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) throw IoError("cannot open '" + path + "'");
  const auto file_size = static_cast<std::uint64_t>(f.tellg());
  f.seekg(0);
  char magic[8];
  MatrixFile m;
  f.read(magic, 8);
  f.read(reinterpret_cast<char*>(&m.rows), 4);
  f.read(reinterpret_cast<char*>(&m.cols), 4);
  if (!f || std::memcmp(magic, kMagic, 8) != 0) throw IoError("'" + path + "' is not a proxflow matrix file");
  const std::uint64_t count = static_cast<std::uint64_t>(m.rows) * m.cols;
  if (file_size != 16 + count * 8) throw IoError("'" + path + "' is truncated or corrupt");
  m.data.resize(count);
  f.read(reinterpret_cast<char*>(m.data.data()), static_cast<std::streamsize>(count * 8));
  if (!f) throw IoError("short read from '" + path + "'");
  return m;
}

void write_matrix_csv(const std::string& path, std::uint32_t rows, std::uint32_t cols,
                      std::span<const double> data) {
  if (data.size() != static_cast<std::size_t>(rows) * cols)
    throw DimensionError("write_matrix_csv: data size does not match rows*cols");
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << std::setprecision(17);
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j) {
      if (j) f << ',';
      f << data[static_cast<std::size_t>(i) * cols + j];
    }
    f << '\n';
  }
}

}  // namespace proxflow
