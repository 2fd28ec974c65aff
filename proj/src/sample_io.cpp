#include "predreg/sample_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>

#include "predreg/error.hpp"

namespace predreg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<std::size_t> column(const std::vector<std::string>& header, std::string_view name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return {};
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view field) {
  field = trim(field);
  if (field.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw Error(Errc::BadInput, "cannot parse number '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string csv_quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

void write_sample_csv(std::ostream& out, const Sample& sample) {
  const std::size_t n = sample.n();
  out << "t,x,y\n";
  for (std::size_t t = 0; t <= n + 1; ++t) {
    out << t << ',';
    if (t <= n) out << format_double(sample.x[t]);
    out << ',';
    if (t < sample.y.size()) out << format_double(sample.y[t]);
    out << '\n';
  }
}

Sample read_regression_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::BadInput, "empty CSV input");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // BOM
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) std::transform(h.begin(), h.end(), h.begin(), ::tolower);

  const auto xc = column(header, "x");
  const auto yc = column(header, "y");
  const auto tc = column(header, "t");
  if (!xc || !yc) throw Error(Errc::BadInput, "CSV header must name columns x and y");

  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    const std::size_t need = std::max({*xc, *yc, tc.value_or(0)}) + 1;
    if (fields.size() < need) {
      throw Error(Errc::BadInput, "row " + std::to_string(row) + " has too few fields");
    }
    try {
      xs.push_back(parse_double(fields[*xc]));
      ys.push_back(parse_double(fields[*yc]));
    } catch (const Error& e) {
      throw Error(Errc::BadInput, "row " + std::to_string(row) + ": " + e.what());
    }
  }

  if (!tc) {
    // y,x layout: every row is an observed pair.
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (std::isnan(xs[i]) || std::isnan(ys[i])) {
        throw Error(Errc::BadInput, "missing value in data row " + std::to_string(i + 2));
      }
    }
    return Sample::from_pairs(xs, ys);
  }

  // t,x,y layout: row t holds x_t and y_t; y[t+1] pairs with x[t].
  std::size_t last_x = 0;
  while (last_x < xs.size() && !std::isnan(xs[last_x])) ++last_x;
  if (last_x == 0) throw Error(Errc::BadInput, "no x values");
  std::size_t last_y = 1;
  while (last_y < ys.size() && !std::isnan(ys[last_y])) ++last_y;
  // x_0..x_{last_x-1}, y_1..y_{last_y-1}
  const std::size_t n = std::min(last_x - 1, last_y >= 2 ? last_y - 2 : 0);
  if (n < 1) throw Error(Errc::BadInput, "need at least one (x_t, y_{t+1}) pair with t >= 1");
  Sample s;
  s.x.assign(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(n + 1));
  s.y.assign(ys.begin(), ys.begin() + static_cast<std::ptrdiff_t>(n + 2));
  s.y[0] = std::numeric_limits<double>::quiet_NaN();
  return s;
}

}  // namespace predreg
