#include "bregmanot/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bregmanot {

namespace {

std::vector<std::vector<double>> parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    int col = 1;
    size_t pos = 0;
    while (pos <= line.size()) {
      size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      const std::string cell = line.substr(pos, comma - pos);
      try {
        size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
          ++used;
        if (used != cell.size()) throw std::invalid_argument("trailing junk");
        row.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("bad numeric cell '" + cell + "'", line_no, col);
      }
      pos = comma + 1;
      ++col;
      if (comma == line.size()) break;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("ragged row", line_no, 1);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty file", 1, 1);
  return rows;
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) {
  const auto rows = parse_csv(path);
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_matrix_csv(const std::string& path, const Matrix& matrix) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error("cannot write " + path);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j)
      std::fprintf(f, j + 1 == matrix.cols() ? "%.17g" : "%.17g,", matrix(i, j));
    std::fputc('\n', f);
  }
  std::fclose(f);
}

Vector read_vector_csv(const std::string& path) {
  const Matrix m = read_matrix_csv(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw ParseError("expected a single row or column", 1, 1);
}

void write_vector_csv(const std::string& path, const Vector& v) {
  write_matrix_csv(path, v);
}

namespace {

// Next whitespace/comment-delimited token of a PGM header.
std::string pgm_token(std::istream& in, int& line_no) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      ++line_no;
      continue;
    }
    if (std::isspace(c)) {
      if (c == '\n') ++line_no;
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

int pgm_int(std::istream& in, int& line_no, const char* what) {
  const std::string tok = pgm_token(in, line_no);
  try {
    return std::stoi(tok);
  } catch (const std::exception&) {
    throw ParseError(std::string("bad ") + what + " '" + tok + "'", line_no, 1);
  }
}

}  // namespace

PgmImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  int line_no = 1;
  const std::string magic = pgm_token(in, line_no);
  if (magic != "P2" && magic != "P5")
    throw ParseError("expected P2 or P5, got '" + magic + "'", 1, 1);

  PgmImage img;
  img.width = pgm_int(in, line_no, "width");
  img.height = pgm_int(in, line_no, "height");
  img.maxval = pgm_int(in, line_no, "maxval");
  if (img.width <= 0 || img.height <= 0 || img.maxval <= 0 || img.maxval > 65535)
    throw ParseError("bad dimensions or maxval", line_no, 1);
  const size_t count = static_cast<size_t>(img.width) * img.height;
  img.pixels.resize(count);

  if (magic == "P2") {
    for (size_t i = 0; i < count; ++i) {
      const int v = pgm_int(in, line_no, "pixel");
      if (v < 0 || v > img.maxval) throw ParseError("pixel out of range", line_no, 1);
      img.pixels[i] = static_cast<std::uint16_t>(v);
    }
  } else {
    const int bytes = img.maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(count * static_cast<size_t>(bytes));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size())
      throw ParseError("truncated pixel data", line_no, 1);
    for (size_t i = 0; i < count; ++i) {
      img.pixels[i] = bytes == 2
                          ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1])
                          : raw[i];
      if (img.pixels[i] > img.maxval)
        throw ParseError("pixel out of range", line_no, 1);
    }
  }
  return img;
}

void write_pgm(const std::string& path, const PgmImage& image, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << (binary ? "P5" : "P2") << "\n"
      << image.width << " " << image.height << "\n"
      << image.maxval << "\n";
  if (binary) {
    const int bytes = image.maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw;
    raw.reserve(image.pixels.size() * static_cast<size_t>(bytes));
    for (std::uint16_t v : image.pixels) {
      if (bytes == 2) raw.push_back(static_cast<unsigned char>(v >> 8));
      raw.push_back(static_cast<unsigned char>(v & 0xff));
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
  } else {
    for (size_t i = 0; i < image.pixels.size(); ++i)
      out << image.pixels[i] << ((i + 1) % 16 == 0 ? "\n" : " ");
    out << "\n";
  }
}

PgmImage matrix_to_pgm(const Matrix& m, int maxval) {
  PgmImage img;
  img.width = static_cast<int>(m.cols());
  img.height = static_cast<int>(m.rows());
  img.maxval = maxval;
  img.pixels.resize(static_cast<size_t>(m.size()));
  const double top = m.maxCoeff();
  const double scale = top > 0.0 ? maxval / top : 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = std::max(0.0, m(i, j)) * scale;
      img.pixels[static_cast<size_t>(i) * static_cast<size_t>(img.width) +
                 static_cast<size_t>(j)] =
          static_cast<std::uint16_t>(std::lround(std::min(v, double(maxval))));
    }
  return img;
}

Histogram pgm_to_histogram(const PgmImage& image) {
  if (image.width != image.height)
    throw ShapeMismatch("histogram images must be square");
  const int n0 = image.width;
  Histogram h(static_cast<Eigen::Index>(n0) * n0);
  for (int r = 0; r < n0; ++r)
    for (int c = 0; c < n0; ++c)
      h[r + static_cast<Eigen::Index>(n0) * c] =
          image.pixels[static_cast<size_t>(r) * static_cast<size_t>(n0) +
                       static_cast<size_t>(c)];
  const double total = h.sum();
  if (total <= 0.0) throw ZeroTotalMass("image carries no mass");
  return h / total;
}

}  // namespace bregmanot
