#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "predreg/dgp.hpp"

namespace predreg {

//! Shortest decimal string that parses back to the same double; "" for NaN.
std::string format_double(double v);
//! Parse a decimal field; empty fields parse as NaN. Throws BadInput.
double parse_double(std::string_view field);

/*!
 * Write `t,x,y` rows for t = 0..n+1. y_0 and x_{n+1} do not exist and are
 * left empty.
 */
void write_sample_csv(std::ostream& out, const Sample& sample);

/*!
 * Read regression data from CSV. Accepts either the `t,x,y` layout written
 * by write_sample_csv (row t holds x_t and y_t) or a `y,x` layout in which
 * each row pairs a response with its lagged predictor. Columns are matched
 * by header name; extra columns are ignored.
 */
Sample read_regression_csv(std::istream& in);

//! Quote a text field if it contains a comma, quote or newline.
std::string csv_quote(std::string_view field);

//! Split one CSV line on commas (no quoting support; headers and numbers only).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace predreg
