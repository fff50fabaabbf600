#pragma once

#include <string>

#include "malps/types.hpp"

namespace malps {

// Binary PGM (P5), 8-bit, maxval 255. Values are returned as doubles in
// [0, 255]. Throws std::invalid_argument on malformed input.
DenseMatrix read_pgm(const std::string& path);
void write_pgm(const std::string& path, const DenseMatrix& image);

}  // namespace malps
