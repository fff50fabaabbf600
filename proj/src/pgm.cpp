#include "malps/pgm.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace malps {

namespace {

// next token skipping whitespace and '#' comment lines
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) {
      tok.push_back(static_cast<char>(c));
      while ((c = in.peek()) != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(in.get()));
      }
      return tok;
    }
  }
  throw std::invalid_argument("pgm: truncated header");
}

}  // namespace

DenseMatrix read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("pgm: cannot open '" + path + "'");
  if (next_token(in) != "P5") {
    throw std::invalid_argument("pgm: expected binary P5 format");
  }
  const long cols = std::stol(next_token(in));
  const long rows = std::stol(next_token(in));
  const long maxval = std::stol(next_token(in));
  if (cols < 1 || rows < 1) throw std::invalid_argument("pgm: bad dimensions");
  if (maxval != 255) throw std::invalid_argument("pgm: maxval must be 255");
  in.get();  // single whitespace after maxval

  std::vector<unsigned char> raw(static_cast<std::size_t>(rows) * cols);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw std::invalid_argument("pgm: truncated pixel data");
  }
  DenseMatrix image(rows, cols);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    image.data()[i] = static_cast<double>(raw[i]);
  }
  return image;
}

void write_pgm(const std::string& path, const DenseMatrix& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("pgm: cannot write '" + path + "'");
  out << "P5\n" << image.cols() << " " << image.rows() << "\n255\n";
  std::vector<unsigned char> raw(static_cast<std::size_t>(image.size()));
  for (Index i = 0; i < image.size(); ++i) {
    const double v = std::round(image.data()[i]);
    raw[static_cast<std::size_t>(i)] =
        static_cast<unsigned char>(std::min(255.0, std::max(0.0, v)));
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
}

}  // namespace malps
