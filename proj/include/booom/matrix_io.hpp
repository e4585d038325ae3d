#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>

#include "booom/errors.hpp"

namespace booom {

// Plain-text matrix exchange format: a header line "rows cols", then one
// line per row with space-separated decimals written with 17 significant
// digits (doubles round-trip exactly). The reader accepts any whitespace
// between tokens and rejects NaN / Inf entries with InputError.

// Read one matrix from the stream, leaving the stream positioned after the
// last entry. Throws InputError on malformed or non-finite data.
Eigen::MatrixXd read_matrix_text(std::istream& in);

// Read a whole file as one matrix; trailing whitespace is allowed, any
// further token is an error. Throws InputError (including for an unreadable
// path).
Eigen::MatrixXd read_matrix_file(const std::string& path);

void write_matrix_text(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix_file(const std::string& path, const Eigen::MatrixXd& m);
std::string matrix_to_text(const Eigen::MatrixXd& m);

// One double, 17 significant digits; the number formatting used everywhere
// a decimal is emitted (matrix files, CSV cells, subprocess replies).
std::string format_double(double v);

}  // namespace booom
