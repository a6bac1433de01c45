#pragma once

#include "esn/types.hpp"

#include <iosfwd>
#include <string>

namespace esn {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

/// Strict parse of a full token; throws ConfigError on garbage.
double parse_double(const std::string& token, const std::string& context);

/// Square-matrix text format: first line "n", then n rows of n
/// space-separated decimals. Round-trips bit-exactly via format_double.
void write_square_matrix(std::ostream& out, const Matrix& m);
Matrix read_square_matrix(std::istream& in, const std::string& context);

/// Rectangular variant used for input weights: first line "rows cols".
void write_rect_matrix(std::ostream& out, const Matrix& m);
Matrix read_rect_matrix(std::istream& in, const std::string& context);

void save_square_matrix(const std::string& path, const Matrix& m);
Matrix load_square_matrix(const std::string& path);
void save_rect_matrix(const std::string& path, const Matrix& m);
Matrix load_rect_matrix(const std::string& path);

}  // namespace esn
