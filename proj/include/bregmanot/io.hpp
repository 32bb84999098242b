#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bregmanot/types.hpp"

namespace bregmanot {

// CSV: comma-separated rows, no header, decimal point, scientific notation
// accepted. Writing uses %.17g so doubles round-trip exactly.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& matrix);

// Single column (or single row) CSV as a vector.
Vector read_vector_csv(const std::string& path);
void write_vector_csv(const std::string& path, const Vector& v);

// PGM, P2 (ASCII) and P5 (binary), maxval up to 65535; P5 stores 16-bit
// samples big-endian. Row-major pixel order as in the format.
struct PgmImage {
  int width = 0, height = 0;
  int maxval = 255;
  std::vector<std::uint16_t> pixels;  // row-major
};

PgmImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const PgmImage& image, bool binary = true);

// Nonnegative matrix rescaled to [0, maxval] (max entry -> maxval) for
// heatmap output; purely a visualization aid.
PgmImage matrix_to_pgm(const Matrix& m, int maxval = 65535);

// Column-major n0 x n0 histogram from a PGM image, normalized to total mass 1.
Histogram pgm_to_histogram(const PgmImage& image);

}  // namespace bregmanot
